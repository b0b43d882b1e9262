#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "deepair/common.hpp"

namespace deepair {

/// Arena geometry and UAV footprint shared by every module. Lengths in meters.
struct ArenaConfig {
  double x_max = 500.0;
  double y_max = 500.0;
  double uav_altitude = 200.0;
  double detector_radius = 75.0;
  double serving_radius = 75.0;
  double min_uav_separation = 10.0;

  void validate() const;
  bool contains(const Point2& p) const {
    return p.x >= 0.0 && p.x <= x_max && p.y >= 0.0 && p.y <= y_max;
  }
  friend bool operator==(const ArenaConfig&, const ArenaConfig&) = default;
};

/// Per-user task profile: size (bits), cycles per bit, arrivals per second,
/// deadline (seconds).
struct TaskProfile {
  double size_bits = 5.0e5;
  double cycles_per_bit = 90.0;
  double arrival_rate = 0.30;
  double max_delay = 1.0;

  double cycles() const { return size_bits * cycles_per_bit; }
  void validate() const;
  friend bool operator==(const TaskProfile&, const TaskProfile&) = default;
};

/// How users scatter around their attraction point: an isotropic Gaussian
/// with standard deviation `sigma`, resampled until the draw lies inside the
/// arena and, when `cutoff` > 0, within `cutoff` meters of the point.
struct DispersionParams {
  double sigma = 30.0;
  double cutoff = 75.0;
  friend bool operator==(const DispersionParams&, const DispersionParams&) = default;
};

struct User {
  int id = 0;
  Point2 position;
  TaskProfile task;
  int attraction_index = 0;
  bool emitting = true;
  std::optional<int> connected_to;

  void connect(int detector_id) {
    emitting = false;
    connected_to = detector_id;
  }
  void disconnect() {
    emitting = true;
    connected_to.reset();
  }
  friend bool operator==(const User&, const User&) = default;
};

struct AttractionPoint {
  Point2 position;
  int assigned_user_count = 0;
  friend bool operator==(const AttractionPoint&, const AttractionPoint&) = default;
};

/// Hidden ground truth of one run. Localization mutates only the
/// emitting/connected_to fields of users.
struct Scenario {
  ArenaConfig config;
  std::vector<AttractionPoint> attraction_points;
  std::vector<User> users;
  std::uint64_t seed = 0;

  int emitting_count() const;
  int connected_count() const;
  const User& user(int id) const;
  User& user(int id);
  friend bool operator==(const Scenario&, const Scenario&) = default;
};

struct Defaults {
  ArenaConfig arena;
  TaskProfile task;
};

Defaults default_config();

/// Draws attraction points uniformly inside the arena inset by the detector
/// radius, keeping them at least two detector radii apart, then assigns user
/// i to point i mod n_points and scatters it per `dispersion`.
/// Throws GenerationError when the separation cannot be met.
Scenario generate_scenario(std::uint64_t seed, int n_users, int n_attraction_points,
                           const ArenaConfig& config, const TaskProfile& task = {},
                           const DispersionParams& dispersion = {});

void write_scenario(std::ostream& out, const Scenario& scenario);
Scenario read_scenario(std::istream& in);
std::string serialize_scenario(const Scenario& scenario);
Scenario parse_scenario(const std::string& text);

}  // namespace deepair
