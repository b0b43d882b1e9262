#pragma once

#include <string>
#include <vector>

#include "deepair/localization.hpp"
#include "deepair/scenario.hpp"

namespace deepair {

/// Detector placement strategy. Serialized as "DeepAir", "CF-16", "Random-8".
struct PlacementMethod {
  enum class Kind { DeepAir, CF, Random };
  Kind kind = Kind::DeepAir;
  int k = 0;  // detector count for the baselines

  static PlacementMethod deep_air() { return {Kind::DeepAir, 0}; }
  static PlacementMethod cf(int k) { return {Kind::CF, k}; }
  static PlacementMethod random(int k) { return {Kind::Random, k}; }
  /// Throws ConfigError on anything other than the three spellings above.
  static PlacementMethod parse(const std::string& text);

  std::string name() const;
  friend bool operator==(const PlacementMethod&, const PlacementMethod&) = default;
};

/// Cell centers of the most-square r x c grid with r * c = k; r (the smaller
/// factor) splits x, c splits y. Ordered x-major.
std::vector<Point2> cf_centers(int k, const ArenaConfig& config);

std::vector<Point2> random_centers(int k, const ArenaConfig& config, Rng& rng);

/// Hovers one detector per center. Each emitting user connects to its nearest
/// center (lowest index on ties) when that center is within detector range.
/// One report per center, in order, including empty ones.
LocalizationResult place_and_connect(std::span<const Point2> centers, Scenario& scenario);

}  // namespace deepair
