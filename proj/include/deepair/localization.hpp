#pragma once

#include <optional>
#include <span>
#include <vector>

#include "deepair/dqn.hpp"
#include "deepair/radio.hpp"
#include "deepair/rl_env.hpp"
#include "deepair/scenario.hpp"

namespace deepair {

struct DetectorReport {
  int detector_id = 0;
  Point3 hover_position;
  std::vector<int> new_connection_ids;
  std::vector<double> episode_scores;
  bool converged = false;

  int connection_count() const { return static_cast<int>(new_connection_ids.size()); }
};

struct LocalizationResult {
  std::vector<DetectorReport> reports;  // accepted detectors, in dispatch order
  int total_connected = 0;
  // The iteration that ended the search; its connections were rolled back.
  std::optional<DetectorReport> rejected;

  std::vector<Point3> stationed_positions() const;
};

struct LocalizationConfig {
  TrainConfig train;
  EnvParams env;  // stationed_detectors is filled in per iteration
  RadioParams radio;
  int threshold = 1;
  int iteration_cap = 12;

  void validate() const;
};

/// Connects every emitting user within the detector radius of `hover`.
/// Returns the ids of the newly connected users.
std::vector<int> connect_users(Scenario& scenario, const Point3& hover, int detector_id);

/// Reverts connect_users for the given ids.
void disconnect_users(Scenario& scenario, std::span<const int> ids);

/// One dispatch: trains a fresh agent on the current emitting-user field,
/// hovers at the highest-reward state of a greedy rollout and connects the
/// emitting users in range.
DetectorReport run_iteration(Scenario& scenario, std::span<const Point3> stationed,
                             int detector_id, const LocalizationConfig& config, Rng& rng);

/// Dispatches agents until one connects fewer than `threshold` users. That
/// last iteration deploys nothing and its connections are undone.
/// Throws IterationCapReached if the search has not stopped after
/// `iteration_cap` dispatches.
LocalizationResult find_locations(Scenario& scenario, const LocalizationConfig& config, Rng& rng);

}  // namespace deepair
