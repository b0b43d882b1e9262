#include "deepair/queueing.hpp"

#include <cmath>
#include <limits>
#include <vector>

namespace deepair {

void ServingSpec::validate() const {
  if (!(capacity > 0.0)) throw ConfigError("serving capacity must be positive");
}

double local_delay(const TaskProfile& task, double f_user) {
  if (!(f_user > 0.0)) throw DomainError("user capacity must be positive");
  return task.cycles() / f_user;
}

double uav_service_time(const TaskProfile& task, const ServingSpec& spec) {
  if (!(spec.capacity > 0.0)) throw DomainError("serving capacity must be positive");
  return task.cycles() / spec.capacity;
}

namespace {

struct Load {
  double work = 0.0;       // sum D*C
  double work_rate = 0.0;  // sum lambda*D*C
};

Load total_load(std::span<const TaskProfile> users) {
  Load l;
  for (const auto& t : users) {
    l.work += t.cycles();
    l.work_rate += t.arrival_rate * t.cycles();
  }
  return l;
}

double headroom(const Load& load, const ServingSpec& spec) {
  const double h = spec.capacity - load.work_rate;
  if (!(h > 0.0)) {
    throw CapacityExceeded("offered load " + std::to_string(load.work_rate) +
                           " cycles/s exceeds serving capacity " + std::to_string(spec.capacity));
  }
  return h;
}

}  // namespace

double mm1_total_delay(std::span<const TaskProfile> users, const ServingSpec& spec) {
  const Load load = total_load(users);
  return load.work / headroom(load, spec);
}

double mm1_queueing_delay(std::span<const TaskProfile> users, const ServingSpec& spec,
                          std::size_t representative) {
  if (representative >= users.size()) throw DomainError("representative task out of range");
  return mm1_total_delay(users, spec) - uav_service_time(users[representative], spec);
}

double mm1_sojourn_time(const TaskProfile& task, std::span<const TaskProfile> users,
                        const ServingSpec& spec) {
  return task.cycles() / headroom(total_load(users), spec);
}

DelayBreakdown total_task_delay(bool offloaded, const TaskProfile& task, const ServingSpec& spec,
                                std::span<const TaskProfile> co_users, const RadioParams& radio,
                                double f_user) {
  DelayBreakdown b;
  if (offloaded) {
    b.network = transmission_delay(task, radio);
    // T_UAV + T_q collapses to the shared-server total delay.
    const double t_uav = uav_service_time(task, spec);
    const double t_total = mm1_total_delay(co_users, spec);
    b.service = t_uav + (t_total - t_uav);
  } else {
    b.network = 0.0;
    b.service = local_delay(task, f_user);
  }
  b.total = b.network + b.service;
  b.success = b.total <= task.max_delay;
  return b;
}

bool group_feasible(std::span<const TaskProfile> users, const ServingSpec& spec,
                    const RadioParams& radio) {
  if (users.empty()) return true;
  const Load load = total_load(users);
  if (!(spec.capacity - load.work_rate > 0.0)) return false;
  const double server_delay = load.work / (spec.capacity - load.work_rate);
  for (const auto& t : users) {
    if (transmission_delay(t, radio) + server_delay > t.max_delay) return false;
  }
  return true;
}

int max_users_per_uav(const TaskProfile& task, const ServingSpec& spec, const RadioParams& radio) {
  spec.validate();
  const double work = task.cycles();
  const double work_rate = task.arrival_rate * work;
  const double budget = task.max_delay - transmission_delay(task, radio);
  if (budget < 0.0) return 0;

  // n*W/(f - n*lambda*W) <= budget  <=>  n <= budget*f / (W*(1 + budget*lambda)),
  // bounded by stability n*lambda*W < f. Start from the closed form and settle
  // the floating-point edge by direct evaluation.
  double estimate = std::isinf(budget) ? spec.capacity / work_rate
                                       : budget * spec.capacity / (work * (1.0 + budget * task.arrival_rate));
  estimate = std::min(estimate, spec.capacity / work_rate);
  const double cap = static_cast<double>(std::numeric_limits<int>::max() / 2);
  int n = static_cast<int>(std::min(std::floor(estimate), cap));
  n = std::max(n - 2, 0);

  auto fits = [&](int count) {
    const double rate = count * work_rate;
    if (!(spec.capacity - rate > 0.0)) return false;
    return transmission_delay(task, radio) + count * work / (spec.capacity - rate) <=
           task.max_delay;
  };
  while (n > 0 && !fits(n)) --n;
  while (fits(n + 1)) ++n;
  return n;
}

}  // namespace deepair
