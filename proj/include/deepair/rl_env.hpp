#pragma once

#include <array>
#include <string_view>
#include <vector>

#include "deepair/radio.hpp"
#include "deepair/scenario.hpp"

namespace deepair {

enum class Action : int { Left = 0, Right = 1, Up = 2, Down = 3, NoMove = 4 };

inline constexpr int kActionCount = 5;
inline constexpr int kFeatureCount = 3;

using Features = std::array<double, kFeatureCount>;

std::string_view action_name(Action a);

struct AgentState {
  Point3 position;
  int step_index = 0;
  friend bool operator==(const AgentState&, const AgentState&) = default;
};

struct EnvParams {
  double step_distance = 25.0;
  int episode_length = 100;
  // Detector UAVs already hovering; the agent must keep min_uav_separation from them.
  std::vector<Point3> stationed_detectors;

  void validate() const;
};

struct StepResult {
  AgentState state;
  double reward = 0.0;
  bool done = false;
};

/// Unit ground displacement for an action: Right is angle 0, Up pi/2, Left pi,
/// Down 3pi/2. Exact table so the agent stays on the step lattice.
Point2 heading(Action a);

AgentState reset(const Scenario& scenario, const EnvParams& params);

/// One transition. A move that would leave the arena or come closer than
/// min_uav_separation to a stationed detector leaves the agent in place with
/// reward -1; otherwise the reward is the scaled cumulative RSSI at the new
/// position. `done` once step_index reaches the episode length.
StepResult step(const AgentState& state, Action action, const Scenario& scenario,
                const EnvParams& params, const RadioParams& radio);

/// Network input: position normalized by arena extents and altitude.
Features observe(const AgentState& state, const ArenaConfig& config);

/// Stateful wrapper used by the trainer. Holds references; the scenario must
/// outlive the environment.
class Environment {
 public:
  Environment(const Scenario& scenario, EnvParams params, RadioParams radio);

  AgentState reset();
  StepResult step(Action action);
  Features observe() const { return deepair::observe(state_, scenario_.config); }

  const AgentState& state() const { return state_; }
  const EnvParams& params() const { return params_; }
  const RadioParams& radio() const { return radio_; }
  const Scenario& scenario() const { return scenario_; }

 private:
  const Scenario& scenario_;
  EnvParams params_;
  RadioParams radio_;
  AgentState state_;
};

}  // namespace deepair
