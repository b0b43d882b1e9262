#pragma once

#include <map>
#include <optional>
#include <span>
#include <vector>

#include "deepair/allocation.hpp"
#include "deepair/queueing.hpp"
#include "deepair/radio.hpp"
#include "deepair/scenario.hpp"

namespace deepair {

struct TaskInstance {
  int user_id = 0;
  double creation_time = 0.0;
  std::optional<int> uav_id;
  double arrival_time = 0.0;  // at the UAV, after upload
  double departure_time = 0.0;
  DelayBreakdown breakdown;
};

/// FIFO single-server queue of one serving UAV. Work is tracked as the time
/// at which everything already received will be finished.
struct UavQueueState {
  int uav_id = 0;
  Point3 position;
  double busy_until = 0.0;

  double backlog(double now) const { return busy_until > now ? busy_until - now : 0.0; }
};

struct AreaMetrics {
  long generated = 0;
  long succeeded = 0;
};

struct RunMetrics {
  long generated = 0;
  long succeeded = 0;
  double success_rate = 0.0;
  long offloaded = 0;                // completed on a serving UAV
  double mean_sojourn = 0.0;         // arrival at UAV to departure, offloaded tasks
  double mean_total_delay = 0.0;     // creation to departure, offloaded tasks
  std::map<int, AreaMetrics> per_area;  // keyed by area id, -1 = never connected
};

struct SimulationConfig {
  double duration = 1000.0;
  ServingSpec serving;
  RadioParams radio;
};

/// In-coverage UAV with the smallest predicted completion (upload + backlog +
/// own service); ties go to the lowest id. nullopt when no UAV covers the user.
std::optional<int> choose_uav(const User& user, std::span<const UavQueueState> queues,
                              const RadioParams& radio, double serving_radius, double now,
                              double own_service);

/// Event-driven run of the MEC phase. Every user emits Poisson(lambda) tasks
/// with exponential work of mean D*C cycles. Connected users offload to the
/// best covering UAV; other tasks fail. Tasks still in the system at
/// `duration` are dropped from both counts.
RunMetrics simulate(const DeploymentPlan& plan, const Scenario& scenario,
                    const SimulationConfig& config, Rng& rng);

/// Same, also returning every counted task.
RunMetrics simulate(const DeploymentPlan& plan, const Scenario& scenario,
                    const SimulationConfig& config, Rng& rng, std::vector<TaskInstance>* trace);

}  // namespace deepair
