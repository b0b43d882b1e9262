#include "deepair/scenario.hpp"

#include <charconv>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>

namespace deepair {

namespace {

constexpr int kPointAttempts = 2000;
constexpr int kPlacementRestarts = 50;
constexpr int kUserAttempts = 10000;
constexpr const char* kScenarioMagic = "deepair-scenario";
constexpr int kScenarioVersion = 1;

bool place_points(Rng& rng, int count, const ArenaConfig& config, std::vector<Point2>& out) {
  const double inset = config.detector_radius;
  const double separation = 2.0 * config.detector_radius;
  std::uniform_real_distribution<double> ux(inset, config.x_max - inset);
  std::uniform_real_distribution<double> uy(inset, config.y_max - inset);
  out.clear();
  for (int i = 0; i < count; ++i) {
    bool placed = false;
    for (int attempt = 0; attempt < kPointAttempts && !placed; ++attempt) {
      const Point2 candidate{ux(rng), uy(rng)};
      bool clear = true;
      for (const auto& p : out) {
        if (horizontal_distance(candidate, p) < separation) {
          clear = false;
          break;
        }
      }
      if (clear) {
        out.push_back(candidate);
        placed = true;
      }
    }
    if (!placed) return false;
  }
  return true;
}

void require(bool ok, const char* what) {
  if (!ok) throw ConfigError(what);
}

}  // namespace

void ArenaConfig::validate() const {
  require(x_max > 0.0 && y_max > 0.0, "arena extents must be positive");
  require(uav_altitude > 0.0, "uav altitude must be positive");
  require(detector_radius > 0.0 && serving_radius > 0.0, "uav radii must be positive");
  require(min_uav_separation > 0.0, "minimum uav separation must be positive");
}

void TaskProfile::validate() const {
  require(size_bits > 0.0, "task size must be positive");
  require(cycles_per_bit > 0.0, "cycles per bit must be positive");
  require(arrival_rate > 0.0, "arrival rate must be positive");
  require(max_delay > 0.0, "maximum tolerable delay must be positive");
}

int Scenario::emitting_count() const {
  int n = 0;
  for (const auto& u : users) n += u.emitting ? 1 : 0;
  return n;
}

int Scenario::connected_count() const {
  return static_cast<int>(users.size()) - emitting_count();
}

const User& Scenario::user(int id) const {
  if (id < 0 || id >= static_cast<int>(users.size()) || users[id].id != id) {
    throw DomainError("unknown user id " + std::to_string(id));
  }
  return users[id];
}

User& Scenario::user(int id) {
  return const_cast<User&>(static_cast<const Scenario&>(*this).user(id));
}

Defaults default_config() { return Defaults{}; }

Scenario generate_scenario(std::uint64_t seed, int n_users, int n_attraction_points,
                           const ArenaConfig& config, const TaskProfile& task,
                           const DispersionParams& dispersion) {
  config.validate();
  task.validate();
  if (n_attraction_points < 1) throw ConfigError("need at least one attraction point");
  if (n_users < n_attraction_points) {
    throw ConfigError("need at least as many users as attraction points");
  }
  if (dispersion.sigma <= 0.0) throw ConfigError("dispersion sigma must be positive");
  if (config.x_max <= 2.0 * config.detector_radius ||
      config.y_max <= 2.0 * config.detector_radius) {
    throw GenerationError("arena too small for the detector-radius inset");
  }

  Rng rng(seed);
  std::vector<Point2> points;
  bool placed = false;
  for (int restart = 0; restart < kPlacementRestarts && !placed; ++restart) {
    placed = place_points(rng, n_attraction_points, config, points);
  }
  if (!placed) {
    throw GenerationError("could not place " + std::to_string(n_attraction_points) +
                          " attraction points with separation " +
                          std::to_string(2.0 * config.detector_radius) + " m");
  }

  Scenario s;
  s.config = config;
  s.seed = seed;
  for (const auto& p : points) s.attraction_points.push_back({p, 0});

  std::normal_distribution<double> spread(0.0, dispersion.sigma);
  s.users.reserve(static_cast<std::size_t>(n_users));
  for (int id = 0; id < n_users; ++id) {
    const int k = id % n_attraction_points;
    const Point2 center = s.attraction_points[k].position;
    Point2 pos = center;
    bool ok = false;
    for (int attempt = 0; attempt < kUserAttempts && !ok; ++attempt) {
      pos = {center.x + spread(rng), center.y + spread(rng)};
      ok = config.contains(pos) &&
           (dispersion.cutoff <= 0.0 || horizontal_distance(pos, center) <= dispersion.cutoff);
    }
    if (!ok) throw GenerationError("could not place user " + std::to_string(id) + " in bounds");
    User u;
    u.id = id;
    u.position = pos;
    u.task = task;
    u.attraction_index = k;
    s.users.push_back(u);
    ++s.attraction_points[k].assigned_user_count;
  }
  return s;
}

void write_scenario(std::ostream& out, const Scenario& s) {
  const auto old_flags = out.flags();
  const auto old_precision = out.precision();
  out << std::setprecision(17);
  out << kScenarioMagic << ' ' << kScenarioVersion << '\n';
  out << "seed " << s.seed << '\n';
  const auto& c = s.config;
  out << "arena " << c.x_max << ' ' << c.y_max << ' ' << c.uav_altitude << ' '
      << c.detector_radius << ' ' << c.serving_radius << ' ' << c.min_uav_separation << '\n';
  for (std::size_t i = 0; i < s.attraction_points.size(); ++i) {
    const auto& p = s.attraction_points[i];
    out << "point " << i << ' ' << p.position.x << ' ' << p.position.y << ' '
        << p.assigned_user_count << '\n';
  }
  for (const auto& u : s.users) {
    out << "user " << u.id << ' ' << u.position.x << ' ' << u.position.y << ' '
        << u.attraction_index << ' ' << u.task.size_bits << ' ' << u.task.cycles_per_bit << ' '
        << u.task.arrival_rate << ' ' << u.task.max_delay << ' ' << (u.emitting ? 1 : 0) << ' '
        << (u.connected_to ? *u.connected_to : -1) << '\n';
  }
  out.flags(old_flags);
  out.precision(old_precision);
}

Scenario read_scenario(std::istream& in) {
  std::string magic;
  int version = 0;
  if (!(in >> magic >> version) || magic != kScenarioMagic) {
    throw IoError("not a scenario file");
  }
  if (version != kScenarioVersion) {
    throw IoError("unsupported scenario version " + std::to_string(version));
  }
  Scenario s;
  std::string tag;
  while (in >> tag) {
    if (tag == "seed") {
      in >> s.seed;
    } else if (tag == "arena") {
      auto& c = s.config;
      in >> c.x_max >> c.y_max >> c.uav_altitude >> c.detector_radius >> c.serving_radius >>
          c.min_uav_separation;
    } else if (tag == "point") {
      std::size_t index = 0;
      AttractionPoint p;
      in >> index >> p.position.x >> p.position.y >> p.assigned_user_count;
      if (index != s.attraction_points.size()) throw IoError("attraction points out of order");
      s.attraction_points.push_back(p);
    } else if (tag == "user") {
      User u;
      int emitting = 1;
      int connected = -1;
      in >> u.id >> u.position.x >> u.position.y >> u.attraction_index >> u.task.size_bits >>
          u.task.cycles_per_bit >> u.task.arrival_rate >> u.task.max_delay >> emitting >> connected;
      if (u.id != static_cast<int>(s.users.size())) throw IoError("user ids out of order");
      u.emitting = emitting != 0;
      if (connected >= 0) u.connected_to = connected;
      s.users.push_back(u);
    } else {
      throw IoError("unknown scenario record '" + tag + "'");
    }
    if (!in) throw IoError("malformed scenario record '" + tag + "'");
  }
  s.config.validate();
  return s;
}

std::string serialize_scenario(const Scenario& scenario) {
  std::ostringstream out;
  write_scenario(out, scenario);
  return out.str();
}

Scenario parse_scenario(const std::string& text) {
  std::istringstream in(text);
  return read_scenario(in);
}

}  // namespace deepair
