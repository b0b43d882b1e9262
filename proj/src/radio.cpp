#include "deepair/radio.hpp"

#include <algorithm>

namespace deepair {

void RadioParams::validate() const {
  if (!(channel_power_gain > 0.0)) throw ConfigError("channel power gain must be positive");
  if (!(data_rate > 0.0)) throw ConfigError("data rate must be positive");
  if (!(rssi_reward_scale > 0.0)) throw ConfigError("rssi reward scale must be positive");
  if (distance_model == DistanceModel::Horizontal && !(min_horizontal_distance > 0.0)) {
    throw ConfigError("horizontal distance floor must be positive");
  }
}

RadioParams slant_radio() {
  RadioParams p;
  p.distance_model = DistanceModel::Slant;
  p.rssi_reward_scale = 1.0e9;
  return p;
}

namespace {

double squared_path_distance(const Point2& user, const Point3& uav, const RadioParams& params) {
  const double dx = user.x - uav.x;
  const double dy = user.y - uav.y;
  const double ground = dx * dx + dy * dy;
  if (params.distance_model == DistanceModel::Slant) return ground + uav.z * uav.z;
  if (params.distance_model == DistanceModel::Softened) {
    return ground + params.softening_length * params.softening_length;
  }
  const double floor = params.min_horizontal_distance;
  return std::max(ground, floor * floor);
}

}  // namespace

double channel_gain(const Point2& user, const Point3& uav, const RadioParams& params) {
  const double d2 = squared_path_distance(user, uav, params);
  if (!(d2 > 0.0)) throw DomainError("channel gain undefined at zero distance");
  return params.channel_power_gain / d2;
}

double cumulative_rssi(const Point3& uav, std::span<const User> users,
                       const RadioParams& params) {
  double h = 0.0;
  for (const auto& u : users) {
    if (u.emitting) h += channel_gain(u.position, uav, params);
  }
  return h;
}

bool in_coverage(const Point2& user, const Point3& uav, double radius) {
  const double dx = user.x - uav.x;
  const double dy = user.y - uav.y;
  return dx * dx + dy * dy <= radius * radius;
}

double transmission_delay(const TaskProfile& task, const RadioParams& params) {
  if (!(params.data_rate > 0.0)) throw DomainError("data rate must be positive");
  return task.size_bits / params.data_rate;
}

}  // namespace deepair
