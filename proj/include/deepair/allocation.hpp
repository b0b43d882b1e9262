#pragma once

#include <span>
#include <vector>

#include "deepair/localization.hpp"
#include "deepair/queueing.hpp"
#include "deepair/scenario.hpp"

namespace deepair {

struct AreaDemand {
  int area_id = 0;  // index of the detector report
  std::vector<int> user_ids;
  int required_uavs = 0;
};

struct ServingUav {
  int id = 0;
  int area_id = 0;
  Point3 position;
  std::vector<int> user_ids;  // nominal assignment; every user is in coverage
};

struct DeploymentPlan {
  std::vector<int> granted;  // per area, same order as the demands
  std::vector<ServingUav> uavs;

  int total_granted() const;
};

/// Splits `count` items into `groups` sizes that differ by at most one,
/// larger groups first.
std::vector<int> balanced_sizes(int count, int groups);

/// Minimal number of serving UAVs such that some balanced split of `users`
/// over them keeps every group stable and within deadline. Starts the search
/// at ceil(n / max_users_per_uav) for homogeneous profiles; mixed profiles
/// are split by exhaustive search with pruning.
/// Throws InfeasibleProfile when a lone user already misses its deadline.
int required_uavs(std::span<const TaskProfile> users, const ServingSpec& spec,
                  const RadioParams& radio);

/// One demand per detector report, built from the users it connected.
std::vector<AreaDemand> area_demands(const Scenario& scenario, const LocalizationResult& located,
                                     const ServingSpec& spec, const RadioParams& radio);

/// Hands out `fleet` UAVs one at a time to the area with the largest unmet
/// need. Tied areas take turns: the one granted least recently goes first,
/// never-granted areas before granted ones, then lower index.
std::vector<int> grant_uavs(std::span<const int> needs, int fleet);

/// Ring positions for `count` UAVs around `center`, pairwise and from the
/// center at least `separation` apart, shifted inward to stay in the arena.
std::vector<Point3> stack_positions(const Point3& center, int count, double separation,
                                    const ArenaConfig& arena);

/// Grants UAVs per grant_uavs, stacks each area's UAVs around its detector's
/// hover point and balances the area's users across them within coverage.
DeploymentPlan deploy(std::span<const AreaDemand> demands, int fleet,
                      std::span<const DetectorReport> reports, const Scenario& scenario);

}  // namespace deepair
