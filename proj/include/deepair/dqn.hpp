#pragma once

#include <array>
#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "deepair/common.hpp"
#include "deepair/rl_env.hpp"

namespace deepair {

using QValues = std::array<double, kActionCount>;

struct DenseLayer {
  Eigen::MatrixXd weights;  // out x in
  Eigen::VectorXd bias;
};

/// Fully connected value network: rectifier on hidden layers, identity on the
/// output. Inputs are kFeatureCount wide, outputs one value per Action.
class QNetwork {
 public:
  struct Gradients {
    std::vector<Eigen::MatrixXd> weights;
    std::vector<Eigen::VectorXd> biases;
  };

  QNetwork() = default;
  /// Glorot-uniform weights in +-sqrt(6/(fan_in+fan_out)), zero biases.
  QNetwork(std::vector<int> layer_sizes, Rng& rng);
  static QNetwork zeros(std::vector<int> layer_sizes);
  static std::vector<int> default_layout();

  const std::vector<int>& layer_sizes() const { return sizes_; }
  std::vector<DenseLayer>& layers() { return layers_; }
  const std::vector<DenseLayer>& layers() const { return layers_; }

  QValues q_values(const Features& features) const;
  /// Batched forward pass; one sample per column. Returns kActionCount x batch.
  Eigen::MatrixXd forward(const Eigen::MatrixXd& inputs) const;

  /// Mean over the batch of (Q(s_i, a_i) - target_i)^2.
  double loss(const Eigen::MatrixXd& inputs, std::span<const int> actions,
              const Eigen::VectorXd& targets) const;
  /// Same loss, plus its gradient with respect to every parameter.
  double loss_and_gradient(const Eigen::MatrixXd& inputs, std::span<const int> actions,
                           const Eigen::VectorXd& targets, Gradients& grad) const;
  void sgd_update(const Gradients& grad, double learning_rate);
  static double gradient_norm(const Gradients& grad);
  static void scale_gradients(Gradients& grad, double factor);

  bool all_finite() const;
  std::size_t parameter_count() const;
  std::vector<double> flat_parameters() const;
  void set_flat_parameters(std::span<const double> values);

  void save(std::ostream& out) const;
  static QNetwork load(std::istream& in);

  friend bool operator==(const QNetwork& a, const QNetwork& b);

 private:
  explicit QNetwork(std::vector<int> layer_sizes);
  void check_input(const Eigen::MatrixXd& inputs, std::size_t actions, Eigen::Index targets) const;

  std::vector<int> sizes_;
  std::vector<DenseLayer> layers_;
};

struct Transition {
  Features state{};
  Action action = Action::NoMove;
  double reward = 0.0;
  Features next_state{};
  bool done = false;
};

/// Fixed-capacity FIFO of transitions; the oldest entry is overwritten first.
class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::size_t capacity);

  void push(const Transition& t);
  std::size_t size() const { return data_.size(); }
  std::size_t capacity() const { return capacity_; }
  /// i-th stored transition, oldest first.
  const Transition& operator[](std::size_t i) const;
  /// `count` distinct indices drawn uniformly. Requires count <= size().
  std::vector<std::size_t> sample_indices(std::size_t count, Rng& rng) const;

 private:
  std::size_t capacity_;
  std::size_t head_ = 0;  // next slot to overwrite once full
  std::vector<Transition> data_;
};

struct TrainConfig {
  double learning_rate = 0.005;
  double discount = 0.99;
  double epsilon_start = 1.0;
  double epsilon_decay = 0.99;
  double epsilon_min = 0.01;
  int batch_size = 64;
  std::size_t replay_capacity = 1'000'000;
  int max_episodes = 300;
  int plateau_window = 20;
  double plateau_tolerance = 0.01;
  // Global L2 norm cap on each minibatch gradient; 0 disables clipping.
  double max_grad_norm = 10.0;
  // When true, the episode horizon is stored as terminal; otherwise the last
  // transition of an episode still bootstraps from the next state.
  bool horizon_is_terminal = true;
  // Return the parameters whose greedy rollout scored best across episodes
  // instead of the last ones.
  bool keep_best_greedy = true;
  std::vector<int> hidden_layers{128, 128, 128};

  void validate() const;
  std::vector<int> layout() const;
};

/// Epsilon-greedy choice; greedy ties go to the lowest action index.
Action select_action(const QNetwork& net, const Features& features, double epsilon, Rng& rng);
Action greedy_action(const QValues& q);

/// r + gamma * Q(s', argmax_a' Q(s', a')) with the same network for selection
/// and evaluation; just r on terminal transitions.
double td_target(const QNetwork& net, const Transition& t, double gamma);

/// One SGD step on a uniformly sampled minibatch. Returns the pre-update loss,
/// or nullopt (and leaves the network untouched) when the buffer holds fewer
/// than batch_size transitions.
std::optional<double> train_step(QNetwork& net, const ReplayBuffer& buffer,
                                 const TrainConfig& config, Rng& rng);

/// Epsilon after `episodes` per-episode decays.
double epsilon_after(const TrainConfig& config, int episodes);

/// True once the `window`-episode moving average has stayed within a relative
/// band of `tolerance` for the last `window` episodes.
bool has_plateaued(std::span<const double> scores, int window, double tolerance);

struct TrainResult {
  QNetwork network;
  std::vector<double> scores;         // epsilon-greedy score per episode
  std::vector<double> greedy_scores;  // greedy evaluation after each episode
  int best_episode = -1;              // episode whose parameters were kept
  bool converged = false;
};

TrainResult train_agent(Environment& env, const TrainConfig& config, Rng& rng);

struct RolloutStep {
  AgentState state;
  double reward = 0.0;
};

/// Runs one full episode with epsilon = 0 from a reset.
std::vector<RolloutStep> greedy_rollout(const QNetwork& net, Environment& env);

}  // namespace deepair
