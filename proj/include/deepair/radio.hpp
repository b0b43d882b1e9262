#pragma once

#include <span>

#include "deepair/common.hpp"
#include "deepair/scenario.hpp"

namespace deepair {

/// Which user-to-UAV distance enters the free-space path loss.
///   Slant:      full 3D distance, so the UAV altitude bounds the gain.
///   Horizontal: ground-plane distance, floored at `min_horizontal_distance`
///               to keep the gain finite directly above a user.
///   Softened:   sqrt(ground^2 + softening_length^2); like Slant with a lower
///               effective height, so the field peaks sharply over clusters.
enum class DistanceModel { Slant, Horizontal, Softened };

struct RadioParams {
  double channel_power_gain = 1.42e-4;
  double data_rate = 1.0e8;  // bit/s
  double rssi_reward_scale = 4.0e6;
  DistanceModel distance_model = DistanceModel::Softened;
  double min_horizontal_distance = 25.0;
  double softening_length = 75.0;

  void validate() const;
};

/// Slant-range radio: gain = g / d_3d^2.
RadioParams slant_radio();

/// Free-space path loss gain g / d^2 with d chosen per params.distance_model.
/// Throws DomainError when d is zero.
double channel_gain(const Point2& user, const Point3& uav, const RadioParams& params);

/// Sum of channel gains of the users still emitting. Unscaled.
double cumulative_rssi(const Point3& uav, std::span<const User> users, const RadioParams& params);

/// Horizontal footprint test, boundary inclusive.
bool in_coverage(const Point2& user, const Point3& uav, double radius);

/// Upload time D / v in seconds.
double transmission_delay(const TaskProfile& task, const RadioParams& params);

}  // namespace deepair
