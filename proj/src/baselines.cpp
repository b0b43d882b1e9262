#include "deepair/baselines.hpp"

#include <charconv>
#include <cmath>

namespace deepair {

PlacementMethod PlacementMethod::parse(const std::string& text) {
  if (text == "DeepAir") return deep_air();
  const auto dash = text.find('-');
  if (dash != std::string::npos) {
    const std::string prefix = text.substr(0, dash);
    int k = 0;
    const char* first = text.data() + dash + 1;
    const char* last = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(first, last, k);
    if (ec == std::errc() && ptr == last && k >= 1) {
      if (prefix == "CF") return cf(k);
      if (prefix == "Random") return random(k);
    }
  }
  throw ConfigError("unknown placement method '" + text + "' (expected DeepAir, CF-k or Random-k)");
}

std::string PlacementMethod::name() const {
  switch (kind) {
    case Kind::DeepAir: return "DeepAir";
    case Kind::CF: return "CF-" + std::to_string(k);
    case Kind::Random: return "Random-" + std::to_string(k);
  }
  return "?";
}

std::vector<Point2> cf_centers(int k, const ArenaConfig& config) {
  if (k < 1) throw ConfigError("CF needs at least one community");
  int rows = static_cast<int>(std::floor(std::sqrt(static_cast<double>(k))));
  while (k % rows != 0) --rows;
  const int cols = k / rows;
  const double cell_x = config.x_max / rows;
  const double cell_y = config.y_max / cols;
  std::vector<Point2> out;
  out.reserve(static_cast<std::size_t>(k));
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) out.push_back({(i + 0.5) * cell_x, (j + 0.5) * cell_y});
  }
  return out;
}

std::vector<Point2> random_centers(int k, const ArenaConfig& config, Rng& rng) {
  std::uniform_real_distribution<double> ux(0.0, config.x_max);
  std::uniform_real_distribution<double> uy(0.0, config.y_max);
  std::vector<Point2> out;
  for (int i = 0; i < k; ++i) {
    const double x = ux(rng);
    out.push_back({x, uy(rng)});
  }
  return out;
}

LocalizationResult place_and_connect(std::span<const Point2> centers, Scenario& scenario) {
  LocalizationResult result;
  const double altitude = scenario.config.uav_altitude;
  for (std::size_t c = 0; c < centers.size(); ++c) {
    DetectorReport r;
    r.detector_id = static_cast<int>(c);
    r.hover_position = {centers[c].x, centers[c].y, altitude};
    result.reports.push_back(std::move(r));
  }
  for (auto& u : scenario.users) {
    if (!u.emitting || centers.empty()) continue;
    std::size_t nearest = 0;
    double best = horizontal_distance(u.position, centers[0]);
    for (std::size_t c = 1; c < centers.size(); ++c) {
      const double d = horizontal_distance(u.position, centers[c]);
      if (d < best) {
        best = d;
        nearest = c;
      }
    }
    if (best <= scenario.config.detector_radius) {
      u.connect(static_cast<int>(nearest));
      result.reports[nearest].new_connection_ids.push_back(u.id);
      ++result.total_connected;
    }
  }
  return result;
}

}  // namespace deepair
