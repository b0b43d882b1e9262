#include "deepair/mec_sim.hpp"

#include <queue>
#include <tuple>

namespace deepair {

std::optional<int> choose_uav(const User& user, std::span<const UavQueueState> queues,
                              const RadioParams& radio, double serving_radius, double now,
                              double own_service) {
  std::optional<int> best;
  double best_time = 0.0;
  const double upload = transmission_delay(user.task, radio);
  for (const auto& q : queues) {
    if (!in_coverage(user.position, q.position, serving_radius)) continue;
    const double predicted = upload + q.backlog(now) + own_service;
    if (!best || predicted < best_time || (predicted == best_time && q.uav_id < *best)) {
      best = q.uav_id;
      best_time = predicted;
    }
  }
  return best;
}

namespace {

enum class EventKind { Create = 0, Arrive = 1 };

struct Event {
  double time;
  long sequence;
  EventKind kind;
  int user_id;
  int uav_id;
  double creation_time;
  double service;
};

struct Later {
  bool operator()(const Event& a, const Event& b) const {
    return std::tie(a.time, a.sequence) > std::tie(b.time, b.sequence);
  }
};

}  // namespace

RunMetrics simulate(const DeploymentPlan& plan, const Scenario& scenario,
                    const SimulationConfig& config, Rng& rng) {
  return simulate(plan, scenario, config, rng, nullptr);
}

RunMetrics simulate(const DeploymentPlan& plan, const Scenario& scenario,
                    const SimulationConfig& config, Rng& rng, std::vector<TaskInstance>* trace) {
  if (!(config.duration > 0.0)) throw ConfigError("simulation duration must be positive");
  config.serving.validate();
  config.radio.validate();

  std::vector<UavQueueState> queues;
  queues.reserve(plan.uavs.size());
  for (std::size_t i = 0; i < plan.uavs.size(); ++i) {
    if (plan.uavs[i].id != static_cast<int>(i)) throw DomainError("serving UAV ids must be dense");
    queues.push_back({plan.uavs[i].id, plan.uavs[i].position, 0.0});
  }

  RunMetrics m;
  std::priority_queue<Event, std::vector<Event>, Later> events;
  long sequence = 0;
  auto next_arrival = [&](const User& u, double now) {
    return now + std::exponential_distribution<double>(u.task.arrival_rate)(rng);
  };
  for (const auto& u : scenario.users) {
    events.push({next_arrival(u, 0.0), sequence++, EventKind::Create, u.id, -1, 0.0, 0.0});
  }

  auto area_of = [&](const User& u) { return u.connected_to ? *u.connected_to : -1; };
  double sojourn_sum = 0.0;
  double delay_sum = 0.0;

  while (!events.empty()) {
    const Event e = events.top();
    events.pop();
    const User& user = scenario.user(e.user_id);

    if (e.kind == EventKind::Create) {
      if (e.time >= config.duration) continue;
      events.push({next_arrival(user, e.time), sequence++, EventKind::Create, user.id, -1, 0.0, 0.0});

      const double work = std::exponential_distribution<double>(1.0 / user.task.cycles())(rng);
      const double service = work / config.serving.capacity;
      std::optional<int> target;
      if (user.connected_to) {
        target = choose_uav(user, queues, config.radio, scenario.config.serving_radius, e.time,
                            service);
      }
      if (!target) {
        ++m.generated;
        ++m.per_area[area_of(user)].generated;
        if (trace) trace->push_back({user.id, e.time, std::nullopt, e.time, e.time, {}});
        continue;
      }
      const double upload = transmission_delay(user.task, config.radio);
      events.push({e.time + upload, sequence++, EventKind::Arrive, user.id, *target, e.time, service});
      continue;
    }

    // Arrival at the UAV: FIFO single server.
    UavQueueState& q = queues[static_cast<std::size_t>(e.uav_id)];
    const double start = std::max(e.time, q.busy_until);
    const double departure = start + e.service;
    q.busy_until = departure;
    if (departure > config.duration) continue;

    TaskInstance t;
    t.user_id = user.id;
    t.creation_time = e.creation_time;
    t.uav_id = e.uav_id;
    t.arrival_time = e.time;
    t.departure_time = departure;
    t.breakdown.network = e.time - e.creation_time;
    t.breakdown.service = departure - e.time;
    t.breakdown.total = departure - e.creation_time;
    t.breakdown.success = t.breakdown.total <= user.task.max_delay;

    ++m.generated;
    ++m.offloaded;
    auto& area = m.per_area[area_of(user)];
    ++area.generated;
    if (t.breakdown.success) {
      ++m.succeeded;
      ++area.succeeded;
    }
    sojourn_sum += t.breakdown.service;
    delay_sum += t.breakdown.total;
    if (trace) trace->push_back(t);
  }

  m.success_rate = m.generated > 0 ? static_cast<double>(m.succeeded) / static_cast<double>(m.generated) : 0.0;
  if (m.offloaded > 0) {
    m.mean_sojourn = sojourn_sum / static_cast<double>(m.offloaded);
    m.mean_total_delay = delay_sum / static_cast<double>(m.offloaded);
  }
  return m;
}

}  // namespace deepair
