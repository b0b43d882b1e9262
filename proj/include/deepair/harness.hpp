#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "deepair/allocation.hpp"
#include "deepair/baselines.hpp"
#include "deepair/localization.hpp"
#include "deepair/mec_sim.hpp"
#include "deepair/queueing.hpp"
#include "deepair/scenario.hpp"

namespace deepair {

/// Every tunable of the pipeline, defaulted to the reference parameter set.
struct PipelineConfig {
  ArenaConfig arena;
  TaskProfile task;
  DispersionParams dispersion;
  RadioParams radio;
  ServingSpec serving;
  LocalizationConfig localization;
  double duration = 1000.0;

  void validate() const;
  SimulationConfig simulation() const { return {duration, serving, radio}; }
};

struct ExperimentSpec {
  PlacementMethod method;
  std::vector<int> user_counts{60, 80, 100};
  std::vector<int> fleet_sizes{10};
  std::vector<int> attraction_point_counts{3};
  std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  PipelineConfig pipeline;

  void validate() const;
};

struct ResultRow {
  std::string method;
  std::uint64_t seed = 0;
  int points = 0;
  int users = 0;
  int fleet = 0;
  int detectors_used = 0;
  int connected = 0;
  int serving_deployed = 0;
  RunMetrics metrics;
  bool failed = false;
  std::string error;
};

/// Per-episode training scores of one localization dispatch.
struct ScoreCurve {
  std::string method;
  std::uint64_t seed = 0;
  int points = 0;
  int users = 0;
  int iteration = 0;
  bool accepted = false;
  std::vector<double> scores;
};

struct CellAggregate {
  std::string method;
  int points = 0;
  int users = 0;
  int fleet = 0;
  int runs = 0;
  int failed = 0;
  double mean_success = 0.0;
  double stddev_success = 0.0;
  double mean_detectors = 0.0;
};

struct ResultTable {
  std::vector<ResultRow> rows;
  std::vector<ScoreCurve> curves;

  /// Mean and sample standard deviation per (method, points, users, fleet),
  /// over rows that did not fail. Ordered by key.
  std::vector<CellAggregate> aggregates() const;
  bool any_failed() const;
  void append(const ResultTable& other);
};

/// Independent stream derived from a run seed (splitmix64 mixing).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

/// Places detectors with `method` on `scenario` (mutating its connection
/// state). DeepAir training draws from `rng`; Random-k centers too.
LocalizationResult place_detectors(const PlacementMethod& method, Scenario& scenario,
                                   const PipelineConfig& config, Rng& rng);

/// Allocation for a fleet of `fleet` UAVs on an already localized scenario.
DeploymentPlan plan_deployment(const Scenario& scenario, const LocalizationResult& located,
                               int fleet, const PipelineConfig& config);

using ProgressFn = std::function<void(const ResultRow&)>;

/// Generates, places, allocates and simulates every (points, users, seed)
/// cell for every fleet size. Placement runs once per (points, users, seed)
/// and is shared by the fleet sizes. Library errors mark the affected rows as
/// failed instead of aborting.
ResultTable run_experiment(const ExperimentSpec& spec, const ProgressFn& progress = {});

inline constexpr const char* kRowsHeader = "method,seed,users,fleet,detectors_used,success_rate";

std::string rows_csv(const ResultTable& table);
std::string details_csv(const ResultTable& table);
std::string aggregate_csv(const ResultTable& table);
std::string scores_csv(const ResultTable& table);

/// Writes rows.csv, details.csv, aggregate.csv and scores.csv into `dir`,
/// creating it if needed. Throws IoError with the failing path.
void emit(const ResultTable& table, const std::filesystem::path& dir);

/// Writes `text` to `path`, throwing IoError with the path on failure.
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace deepair
