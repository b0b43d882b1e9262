#include "deepair/rl_env.hpp"

namespace deepair {

std::string_view action_name(Action a) {
  switch (a) {
    case Action::Left: return "Left";
    case Action::Right: return "Right";
    case Action::Up: return "Up";
    case Action::Down: return "Down";
    case Action::NoMove: return "NoMove";
  }
  return "?";
}

void EnvParams::validate() const {
  if (!(step_distance > 0.0)) throw ConfigError("step distance must be positive");
  if (episode_length <= 0) throw ConfigError("episode length must be positive");
}

Point2 heading(Action a) {
  switch (a) {
    case Action::Right: return {1.0, 0.0};
    case Action::Up: return {0.0, 1.0};
    case Action::Left: return {-1.0, 0.0};
    case Action::Down: return {0.0, -1.0};
    case Action::NoMove: return {0.0, 0.0};
  }
  throw DomainError("invalid action");
}

AgentState reset(const Scenario& scenario, const EnvParams&) {
  return AgentState{{0.0, 0.0, scenario.config.uav_altitude}, 0};
}

namespace {

bool keeps_separation(const Point3& p, const EnvParams& params, double d_min) {
  for (const auto& d : params.stationed_detectors) {
    if (distance(p, d) < d_min) return false;
  }
  return true;
}

}  // namespace

StepResult step(const AgentState& state, Action action, const Scenario& scenario,
                const EnvParams& params, const RadioParams& radio) {
  const Point2 h = heading(action);
  const Point3 target{state.position.x + params.step_distance * h.x,
                      state.position.y + params.step_distance * h.y, state.position.z};

  StepResult r;
  r.state.step_index = state.step_index + 1;
  const bool valid = scenario.config.contains(target.ground()) &&
                     keeps_separation(target, params, scenario.config.min_uav_separation);
  if (valid) {
    r.state.position = target;
    r.reward = radio.rssi_reward_scale * cumulative_rssi(target, scenario.users, radio);
  } else {
    r.state.position = state.position;
    r.reward = -1.0;
  }
  r.done = r.state.step_index >= params.episode_length;
  return r;
}

Features observe(const AgentState& state, const ArenaConfig& config) {
  return {state.position.x / config.x_max, state.position.y / config.y_max,
          state.position.z / config.uav_altitude};
}

Environment::Environment(const Scenario& scenario, EnvParams params, RadioParams radio)
    : scenario_(scenario), params_(std::move(params)), radio_(radio) {
  params_.validate();
  radio_.validate();
  state_ = deepair::reset(scenario_, params_);
}

AgentState Environment::reset() {
  state_ = deepair::reset(scenario_, params_);
  return state_;
}

StepResult Environment::step(Action action) {
  StepResult r = deepair::step(state_, action, scenario_, params_, radio_);
  state_ = r.state;
  return r;
}

}  // namespace deepair
