#include "deepair/localization.hpp"

#include <string>

namespace deepair {

std::vector<Point3> LocalizationResult::stationed_positions() const {
  std::vector<Point3> out;
  out.reserve(reports.size());
  for (const auto& r : reports) out.push_back(r.hover_position);
  return out;
}

void LocalizationConfig::validate() const {
  train.validate();
  env.validate();
  radio.validate();
  if (threshold < 1) throw ConfigError("connection threshold must be at least 1");
  if (iteration_cap < 1) throw ConfigError("iteration cap must be at least 1");
}

std::vector<int> connect_users(Scenario& scenario, const Point3& hover, int detector_id) {
  std::vector<int> ids;
  for (auto& u : scenario.users) {
    if (u.emitting && in_coverage(u.position, hover, scenario.config.detector_radius)) {
      u.connect(detector_id);
      ids.push_back(u.id);
    }
  }
  return ids;
}

void disconnect_users(Scenario& scenario, std::span<const int> ids) {
  for (int id : ids) scenario.user(id).disconnect();
}

namespace {

bool separated(const Point3& p, std::span<const Point3> stationed, double d_min) {
  for (const auto& s : stationed) {
    if (distance(p, s) < d_min) return false;
  }
  return true;
}

}  // namespace

DetectorReport run_iteration(Scenario& scenario, std::span<const Point3> stationed,
                             int detector_id, const LocalizationConfig& config, Rng& rng) {
  DetectorReport report;
  report.detector_id = detector_id;
  report.hover_position = {0.0, 0.0, scenario.config.uav_altitude};
  if (scenario.emitting_count() == 0) return report;

  EnvParams params = config.env;
  params.stationed_detectors.assign(stationed.begin(), stationed.end());
  Environment env(scenario, params, config.radio);
  TrainResult trained = train_agent(env, config.train, rng);
  report.episode_scores = std::move(trained.scores);
  report.converged = trained.converged;

  const auto rollout = greedy_rollout(trained.network, env);
  const RolloutStep* best = nullptr;
  for (const auto& s : rollout) {
    if (best == nullptr || s.reward > best->reward) best = &s;
  }
  report.hover_position = best->state.position;

  if (separated(report.hover_position, stationed, scenario.config.min_uav_separation)) {
    report.new_connection_ids = connect_users(scenario, report.hover_position, detector_id);
  }
  return report;
}

LocalizationResult find_locations(Scenario& scenario, const LocalizationConfig& config, Rng& rng) {
  config.validate();
  LocalizationResult result;
  std::vector<Point3> stationed;
  for (int iteration = 0; iteration < config.iteration_cap; ++iteration) {
    DetectorReport report = run_iteration(scenario, stationed, iteration, config, rng);
    if (report.connection_count() < config.threshold) {
      disconnect_users(scenario, report.new_connection_ids);
      result.rejected = std::move(report);
      return result;
    }
    stationed.push_back(report.hover_position);
    result.total_connected += report.connection_count();
    result.reports.push_back(std::move(report));
  }
  throw IterationCapReached("localization still connecting users after " +
                            std::to_string(config.iteration_cap) + " iterations");
}

}  // namespace deepair
