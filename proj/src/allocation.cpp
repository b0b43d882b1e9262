#include "deepair/allocation.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <string>

namespace deepair {

int DeploymentPlan::total_granted() const {
  int n = 0;
  for (int g : granted) n += g;
  return n;
}

std::vector<int> balanced_sizes(int count, int groups) {
  if (groups <= 0) return {};
  std::vector<int> sizes(static_cast<std::size_t>(groups), count / groups);
  for (int i = 0; i < count % groups; ++i) ++sizes[static_cast<std::size_t>(i)];
  return sizes;
}

namespace {

bool homogeneous(std::span<const TaskProfile> users) {
  return std::all_of(users.begin(), users.end(),
                     [&](const TaskProfile& t) { return t == users.front(); });
}

// Is there a split of `users` into k groups with sizes differing by at most
// one where every group is feasible? Backtracking over users in decreasing
// load order; a group that is already infeasible only gets worse as users
// join, so such branches are cut.
bool split_feasible(std::span<const TaskProfile> users, int k, const ServingSpec& spec,
                    const RadioParams& radio) {
  const int n = static_cast<int>(users.size());
  if (homogeneous(users)) {
    const auto largest = static_cast<std::size_t>((n + k - 1) / k);
    return group_feasible(std::vector<TaskProfile>(largest, users.front()), spec, radio);
  }
  std::vector<TaskProfile> order(users.begin(), users.end());
  std::stable_sort(order.begin(), order.end(), [](const TaskProfile& a, const TaskProfile& b) {
    return a.cycles() * a.arrival_rate > b.cycles() * b.arrival_rate;
  });
  const int small = n / k;
  const int big_groups = n % k;  // groups holding small + 1
  std::vector<std::vector<TaskProfile>> groups(static_cast<std::size_t>(k));
  std::function<bool(int, int)> place = [&](int i, int big_used) -> bool {
    if (i == n) return true;
    for (auto& grp : groups) {
      const int size = static_cast<int>(grp.size());
      int next_big = big_used;
      if (size == small) {
        if (big_used == big_groups) continue;
        ++next_big;
      } else if (size > small) {
        continue;
      }
      const bool was_empty = grp.empty();
      grp.push_back(order[static_cast<std::size_t>(i)]);
      const bool ok = group_feasible(grp, spec, radio) && place(i + 1, next_big);
      grp.pop_back();
      if (ok) return true;
      if (was_empty) break;  // empty groups are interchangeable
    }
    return false;
  };
  return place(0, 0);
}

}  // namespace

int required_uavs(std::span<const TaskProfile> users, const ServingSpec& spec,
                  const RadioParams& radio) {
  if (users.empty()) return 0;
  const int n = static_cast<int>(users.size());
  for (const auto& t : users) {
    if (!group_feasible(std::span<const TaskProfile>(&t, 1), spec, radio)) {
      throw InfeasibleProfile("a single user cannot meet its deadline on one serving UAV");
    }
  }
  int k = 1;
  if (homogeneous(users)) {
    const int per_uav = max_users_per_uav(users.front(), spec, radio);
    k = (n + per_uav - 1) / per_uav;
  }
  for (; k < n; ++k) {
    if (split_feasible(users, k, spec, radio)) return k;
  }
  return n;
}

std::vector<AreaDemand> area_demands(const Scenario& scenario, const LocalizationResult& located,
                                     const ServingSpec& spec, const RadioParams& radio) {
  std::vector<AreaDemand> out;
  out.reserve(located.reports.size());
  for (std::size_t a = 0; a < located.reports.size(); ++a) {
    AreaDemand d;
    d.area_id = static_cast<int>(a);
    d.user_ids = located.reports[a].new_connection_ids;
    std::vector<TaskProfile> profiles;
    profiles.reserve(d.user_ids.size());
    for (int id : d.user_ids) profiles.push_back(scenario.user(id).task);
    d.required_uavs = required_uavs(profiles, spec, radio);
    out.push_back(std::move(d));
  }
  return out;
}

std::vector<int> grant_uavs(std::span<const int> needs, int fleet) {
  const std::size_t n = needs.size();
  std::vector<int> granted(n, 0);
  // Tick of the last grant per area; -1 = never granted.
  std::vector<long> last(n, -1);
  for (long tick = 0; tick < fleet; ++tick) {
    std::size_t pick = n;
    for (std::size_t a = 0; a < n; ++a) {
      const int unmet = needs[a] - granted[a];
      if (unmet <= 0) continue;
      if (pick == n) {
        pick = a;
        continue;
      }
      const int best = needs[pick] - granted[pick];
      if (unmet > best || (unmet == best && last[a] < last[pick])) pick = a;
    }
    if (pick == n) break;
    ++granted[pick];
    last[pick] = tick;
  }
  return granted;
}

std::vector<Point3> stack_positions(const Point3& center, int count, double separation,
                                    const ArenaConfig& arena) {
  std::vector<Point3> out;
  if (count <= 0) return out;
  // Chord between ring neighbours is 2 R sin(pi/count); keep it >= separation.
  double radius = separation;
  if (count > 1) {
    radius = std::max(radius, separation / (2.0 * std::sin(std::numbers::pi / count)));
  }
  radius *= 1.0 + 1e-9;
  const double cx = std::clamp(center.x, std::min(radius, arena.x_max / 2), std::max(arena.x_max - radius, arena.x_max / 2));
  const double cy = std::clamp(center.y, std::min(radius, arena.y_max / 2), std::max(arena.y_max - radius, arena.y_max / 2));
  for (int i = 0; i < count; ++i) {
    const double angle = 2.0 * std::numbers::pi * i / count;
    out.push_back({cx + radius * std::cos(angle), cy + radius * std::sin(angle), center.z});
  }
  return out;
}

namespace {

// Balanced assignment of users to UAV slots restricted to coverage, by
// augmenting paths. Returns the UAV index per user, -1 when unmatched.
std::vector<int> assign_within_coverage(const std::vector<Point2>& users,
                                        const std::vector<Point3>& uavs, double radius) {
  const int n_users = static_cast<int>(users.size());
  const auto sizes = balanced_sizes(n_users, static_cast<int>(uavs.size()));
  std::vector<int> slot_owner;  // slot -> uav
  for (std::size_t u = 0; u < sizes.size(); ++u) {
    for (int s = 0; s < sizes[u]; ++s) slot_owner.push_back(static_cast<int>(u));
  }
  std::vector<int> slot_user(slot_owner.size(), -1);
  std::vector<int> user_slot(users.size(), -1);

  std::vector<char> seen;
  std::function<bool(int)> augment = [&](int user) -> bool {
    for (std::size_t s = 0; s < slot_owner.size(); ++s) {
      if (seen[s] || !in_coverage(users[user], uavs[slot_owner[s]], radius)) continue;
      seen[s] = 1;
      if (slot_user[s] < 0 || augment(slot_user[s])) {
        slot_user[s] = user;
        user_slot[user] = static_cast<int>(s);
        return true;
      }
    }
    return false;
  };
  for (int u = 0; u < n_users; ++u) {
    seen.assign(slot_owner.size(), 0);
    augment(u);
  }

  std::vector<int> out(users.size(), -1);
  for (int u = 0; u < n_users; ++u) {
    if (user_slot[u] >= 0) {
      out[u] = slot_owner[user_slot[u]];
      continue;
    }
    // No balanced slot reachable: fall back to the nearest covering UAV.
    double best = radius;
    for (std::size_t k = 0; k < uavs.size(); ++k) {
      const double d = horizontal_distance(users[u], uavs[k]);
      if (d <= best) {
        best = d;
        out[u] = static_cast<int>(k);
      }
    }
  }
  return out;
}

}  // namespace

DeploymentPlan deploy(std::span<const AreaDemand> demands, int fleet,
                      std::span<const DetectorReport> reports, const Scenario& scenario) {
  if (fleet < 0) throw ConfigError("fleet size must be non-negative");
  DeploymentPlan plan;
  std::vector<int> needs;
  needs.reserve(demands.size());
  for (const auto& d : demands) needs.push_back(d.required_uavs);
  plan.granted = grant_uavs(needs, fleet);

  for (std::size_t a = 0; a < demands.size(); ++a) {
    const int count = plan.granted[a];
    if (count == 0) continue;
    const auto area = static_cast<std::size_t>(demands[a].area_id);
    if (area >= reports.size()) throw DomainError("demand refers to an unknown detector report");
    const auto positions = stack_positions(reports[area].hover_position, count,
                                           scenario.config.min_uav_separation, scenario.config);
    std::vector<Point2> users;
    for (int id : demands[a].user_ids) users.push_back(scenario.user(id).position);
    const auto owner = assign_within_coverage(users, positions, scenario.config.serving_radius);

    const int first_id = static_cast<int>(plan.uavs.size());
    for (const auto& p : positions) {
      plan.uavs.push_back({static_cast<int>(plan.uavs.size()), demands[a].area_id, p, {}});
    }
    for (std::size_t u = 0; u < owner.size(); ++u) {
      if (owner[u] >= 0) plan.uavs[first_id + owner[u]].user_ids.push_back(demands[a].user_ids[u]);
    }
  }
  return plan;
}

}  // namespace deepair
