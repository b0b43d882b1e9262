#pragma once

#include <span>

#include "deepair/radio.hpp"
#include "deepair/scenario.hpp"

namespace deepair {

struct ServingSpec {
  double capacity = 3.0e8;  // cycles/s
  void validate() const;
};

struct DelayBreakdown {
  double network = 0.0;
  double service = 0.0;
  double total = 0.0;
  bool success = false;
};

double local_delay(const TaskProfile& task, double f_user);
double uav_service_time(const TaskProfile& task, const ServingSpec& spec);

/// Delay at a serving UAV shared by `users`, in the summed-numerator form
///   (sum D*C) / (f - sum lambda*D*C).
/// Throws CapacityExceeded when the denominator is not positive.
double mm1_total_delay(std::span<const TaskProfile> users, const ServingSpec& spec);

/// mm1_total_delay minus the service time of users[representative].
double mm1_queueing_delay(std::span<const TaskProfile> users, const ServingSpec& spec,
                          std::size_t representative = 0);

/// Textbook M/M/1 sojourn of one task of `task` on a server loaded by `users`:
///   (D*C) / (f - sum lambda*D*C).  Diagnostic only; planning uses mm1_total_delay.
double mm1_sojourn_time(const TaskProfile& task, std::span<const TaskProfile> users,
                        const ServingSpec& spec);

/// Network + service delay of one task and its deadline verdict. When
/// `offloaded`, `co_users` is every profile sharing the serving UAV (the task's
/// own user included); otherwise the task runs locally at `f_user`.
DelayBreakdown total_task_delay(bool offloaded, const TaskProfile& task, const ServingSpec& spec,
                                std::span<const TaskProfile> co_users, const RadioParams& radio,
                                double f_user);

/// True when `users` on one UAV are stable and each meets its deadline.
bool group_feasible(std::span<const TaskProfile> users, const ServingSpec& spec,
                    const RadioParams& radio);

/// Largest n such that n copies of `task` on one UAV are stable and meet the
/// deadline. Zero means even a lone user misses T_max.
int max_users_per_uav(const TaskProfile& task, const ServingSpec& spec, const RadioParams& radio);

}  // namespace deepair
