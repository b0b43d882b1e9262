#include "deepair/dqn.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <numeric>
#include <ostream>
#include <string>

namespace deepair {

namespace {

constexpr const char* kNetworkMagic = "deepair-qnet";
constexpr int kNetworkVersion = 1;

void check_layout(const std::vector<int>& sizes) {
  if (sizes.size() < 2) throw ConfigError("network needs at least an input and an output layer");
  if (sizes.front() != kFeatureCount) throw ConfigError("network input must match feature count");
  if (sizes.back() != kActionCount) throw ConfigError("network output must match action count");
  for (int s : sizes) {
    if (s <= 0) throw ConfigError("layer sizes must be positive");
  }
}

Eigen::MatrixXd relu(const Eigen::MatrixXd& z) { return z.cwiseMax(0.0); }

Eigen::MatrixXd features_matrix(std::span<const Features> rows) {
  Eigen::MatrixXd m(kFeatureCount, static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (int k = 0; k < kFeatureCount; ++k) m(k, static_cast<Eigen::Index>(i)) = rows[i][k];
  }
  return m;
}

}  // namespace

QNetwork::QNetwork(std::vector<int> layer_sizes) : sizes_(std::move(layer_sizes)) {
  check_layout(sizes_);
  for (std::size_t l = 1; l < sizes_.size(); ++l) {
    layers_.push_back({Eigen::MatrixXd::Zero(sizes_[l], sizes_[l - 1]),
                       Eigen::VectorXd::Zero(sizes_[l])});
  }
}

QNetwork::QNetwork(std::vector<int> layer_sizes, Rng& rng) : QNetwork(std::move(layer_sizes)) {
  for (auto& layer : layers_) {
    const double limit = std::sqrt(6.0 / static_cast<double>(layer.weights.rows() + layer.weights.cols()));
    std::uniform_real_distribution<double> init(-limit, limit);
    // Row-major fill order keeps the draw sequence independent of Eigen's storage.
    for (Eigen::Index r = 0; r < layer.weights.rows(); ++r) {
      for (Eigen::Index c = 0; c < layer.weights.cols(); ++c) layer.weights(r, c) = init(rng);
    }
  }
}

QNetwork QNetwork::zeros(std::vector<int> layer_sizes) { return QNetwork(std::move(layer_sizes)); }

std::vector<int> QNetwork::default_layout() { return {kFeatureCount, 128, 128, 128, kActionCount}; }

QValues QNetwork::q_values(const Features& features) const {
  Eigen::VectorXd a(kFeatureCount);
  for (int k = 0; k < kFeatureCount; ++k) a(k) = features[k];
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    Eigen::VectorXd z = layers_[l].weights * a + layers_[l].bias;
    a = (l + 1 < layers_.size()) ? Eigen::VectorXd(z.cwiseMax(0.0)) : z;
  }
  QValues q{};
  for (int k = 0; k < kActionCount; ++k) q[k] = a(k);
  return q;
}

Eigen::MatrixXd QNetwork::forward(const Eigen::MatrixXd& inputs) const {
  if (inputs.rows() != sizes_.front()) throw DomainError("feature dimension mismatch");
  Eigen::MatrixXd a = inputs;
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    Eigen::MatrixXd z = layers_[l].weights * a;
    z.colwise() += layers_[l].bias;
    a = (l + 1 < layers_.size()) ? relu(z) : std::move(z);
  }
  return a;
}

void QNetwork::check_input(const Eigen::MatrixXd& inputs, std::size_t actions,
                           Eigen::Index targets) const {
  if (inputs.rows() != sizes_.front()) throw DomainError("feature dimension mismatch");
  if (static_cast<Eigen::Index>(actions) != inputs.cols() || targets != inputs.cols()) {
    throw DomainError("batch size mismatch");
  }
  if (inputs.cols() == 0) throw DomainError("empty batch");
}

double QNetwork::loss(const Eigen::MatrixXd& inputs, std::span<const int> actions,
                      const Eigen::VectorXd& targets) const {
  check_input(inputs, actions.size(), targets.size());
  const Eigen::MatrixXd q = forward(inputs);
  double sum = 0.0;
  for (Eigen::Index i = 0; i < q.cols(); ++i) {
    const double e = q(actions[i], i) - targets(i);
    sum += e * e;
  }
  return sum / static_cast<double>(q.cols());
}

double QNetwork::loss_and_gradient(const Eigen::MatrixXd& inputs, std::span<const int> actions,
                                   const Eigen::VectorXd& targets, Gradients& grad) const {
  check_input(inputs, actions.size(), targets.size());
  const std::size_t n_layers = layers_.size();
  const Eigen::Index batch = inputs.cols();

  // activations[0] is the input; activations[l+1] is the output of layer l.
  std::vector<Eigen::MatrixXd> activations;
  activations.reserve(n_layers + 1);
  activations.push_back(inputs);
  for (std::size_t l = 0; l < n_layers; ++l) {
    Eigen::MatrixXd z = layers_[l].weights * activations.back();
    z.colwise() += layers_[l].bias;
    activations.push_back(l + 1 < n_layers ? relu(z) : std::move(z));
  }

  const Eigen::MatrixXd& q = activations.back();
  Eigen::MatrixXd delta = Eigen::MatrixXd::Zero(q.rows(), batch);
  double sum = 0.0;
  const double scale = 2.0 / static_cast<double>(batch);
  for (Eigen::Index i = 0; i < batch; ++i) {
    const int a = actions[i];
    if (a < 0 || a >= kActionCount) throw DomainError("action index out of range");
    const double e = q(a, i) - targets(i);
    sum += e * e;
    delta(a, i) = scale * e;
  }

  grad.weights.resize(n_layers);
  grad.biases.resize(n_layers);
  for (std::size_t l = n_layers; l-- > 0;) {
    grad.weights[l].noalias() = delta * activations[l].transpose();
    grad.biases[l] = delta.rowwise().sum();
    if (l > 0) {
      Eigen::MatrixXd back = layers_[l].weights.transpose() * delta;
      // Rectifier derivative, taken as 0 at the kink.
      delta = back.cwiseProduct((activations[l].array() > 0.0).cast<double>().matrix());
    }
  }
  return sum / static_cast<double>(batch);
}

void QNetwork::sgd_update(const Gradients& grad, double learning_rate) {
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    layers_[l].weights -= learning_rate * grad.weights[l];
    layers_[l].bias -= learning_rate * grad.biases[l];
  }
}

double QNetwork::gradient_norm(const Gradients& grad) {
  double sq = 0.0;
  for (const auto& w : grad.weights) sq += w.squaredNorm();
  for (const auto& b : grad.biases) sq += b.squaredNorm();
  return std::sqrt(sq);
}

void QNetwork::scale_gradients(Gradients& grad, double factor) {
  for (auto& w : grad.weights) w *= factor;
  for (auto& b : grad.biases) b *= factor;
}

bool QNetwork::all_finite() const {
  return std::all_of(layers_.begin(), layers_.end(), [](const DenseLayer& layer) {
    return layer.weights.allFinite() && layer.bias.allFinite();
  });
}

std::size_t QNetwork::parameter_count() const {
  std::size_t n = 0;
  for (const auto& layer : layers_) {
    n += static_cast<std::size_t>(layer.weights.size() + layer.bias.size());
  }
  return n;
}

std::vector<double> QNetwork::flat_parameters() const {
  std::vector<double> out;
  out.reserve(parameter_count());
  for (const auto& layer : layers_) {
    for (Eigen::Index r = 0; r < layer.weights.rows(); ++r) {
      for (Eigen::Index c = 0; c < layer.weights.cols(); ++c) out.push_back(layer.weights(r, c));
    }
    for (Eigen::Index r = 0; r < layer.bias.size(); ++r) out.push_back(layer.bias(r));
  }
  return out;
}

void QNetwork::set_flat_parameters(std::span<const double> values) {
  if (values.size() != parameter_count()) throw DomainError("parameter count mismatch");
  std::size_t i = 0;
  for (auto& layer : layers_) {
    for (Eigen::Index r = 0; r < layer.weights.rows(); ++r) {
      for (Eigen::Index c = 0; c < layer.weights.cols(); ++c) layer.weights(r, c) = values[i++];
    }
    for (Eigen::Index r = 0; r < layer.bias.size(); ++r) layer.bias(r) = values[i++];
  }
}

void QNetwork::save(std::ostream& out) const {
  const auto old_precision = out.precision();
  out << std::setprecision(17);
  out << kNetworkMagic << ' ' << kNetworkVersion << '\n';
  out << "layers " << sizes_.size();
  for (int s : sizes_) out << ' ' << s;
  out << '\n';
  const auto params = flat_parameters();
  for (std::size_t i = 0; i < params.size(); ++i) {
    out << params[i] << ((i + 1) % 8 == 0 || i + 1 == params.size() ? '\n' : ' ');
  }
  out.precision(old_precision);
}

QNetwork QNetwork::load(std::istream& in) {
  std::string magic;
  int version = 0;
  if (!(in >> magic >> version) || magic != kNetworkMagic) throw IoError("not a network file");
  if (version != kNetworkVersion) {
    throw IoError("unsupported network version " + std::to_string(version));
  }
  std::string tag;
  std::size_t count = 0;
  if (!(in >> tag >> count) || tag != "layers" || count < 2 || count > 64) {
    throw IoError("malformed network layout");
  }
  std::vector<int> sizes(count);
  for (auto& s : sizes) {
    if (!(in >> s)) throw IoError("malformed network layout");
  }
  QNetwork net(std::move(sizes));
  std::vector<double> params(net.parameter_count());
  for (auto& p : params) {
    if (!(in >> p)) throw IoError("truncated network parameters");
  }
  net.set_flat_parameters(params);
  return net;
}

bool operator==(const QNetwork& a, const QNetwork& b) {
  return a.sizes_ == b.sizes_ && a.flat_parameters() == b.flat_parameters();
}

ReplayBuffer::ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
  if (capacity == 0) throw ConfigError("replay capacity must be positive");
}

void ReplayBuffer::push(const Transition& t) {
  if (data_.size() < capacity_) {
    data_.push_back(t);
    return;
  }
  data_[head_] = t;
  head_ = (head_ + 1) % capacity_;
}

const Transition& ReplayBuffer::operator[](std::size_t i) const {
  if (i >= data_.size()) throw DomainError("replay index out of range");
  return data_[(head_ + i) % data_.size()];
}

std::vector<std::size_t> ReplayBuffer::sample_indices(std::size_t count, Rng& rng) const {
  if (count > data_.size()) throw DomainError("sample larger than replay buffer");
  std::uniform_int_distribution<std::size_t> pick(0, data_.size() - 1);
  std::vector<std::size_t> out;
  out.reserve(count);
  while (out.size() < count) {
    const std::size_t i = pick(rng);
    if (std::find(out.begin(), out.end(), i) == out.end()) out.push_back(i);
  }
  return out;
}

void TrainConfig::validate() const {
  if (!(learning_rate > 0.0)) throw ConfigError("learning rate must be positive");
  if (!(discount >= 0.0 && discount <= 1.0)) throw ConfigError("discount must lie in [0, 1]");
  for (double e : {epsilon_start, epsilon_decay, epsilon_min}) {
    if (!(e >= 0.0 && e <= 1.0)) throw ConfigError("exploration parameters must lie in [0, 1]");
  }
  if (batch_size <= 0) throw ConfigError("batch size must be positive");
  if (replay_capacity < static_cast<std::size_t>(batch_size)) {
    throw ConfigError("replay capacity smaller than batch");
  }
  if (max_episodes <= 0) throw ConfigError("max episodes must be positive");
  if (plateau_window <= 0) throw ConfigError("plateau window must be positive");
}

std::vector<int> TrainConfig::layout() const {
  std::vector<int> sizes{kFeatureCount};
  sizes.insert(sizes.end(), hidden_layers.begin(), hidden_layers.end());
  sizes.push_back(kActionCount);
  return sizes;
}

Action greedy_action(const QValues& q) {
  int best = 0;
  for (int k = 1; k < kActionCount; ++k) {
    if (q[k] > q[best]) best = k;
  }
  return static_cast<Action>(best);
}

Action select_action(const QNetwork& net, const Features& features, double epsilon, Rng& rng) {
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) throw DomainError("epsilon must lie in [0, 1]");
  if (uniform01(rng) < epsilon) {
    return static_cast<Action>(std::uniform_int_distribution<int>(0, kActionCount - 1)(rng));
  }
  return greedy_action(net.q_values(features));
}

double td_target(const QNetwork& net, const Transition& t, double gamma) {
  if (t.done) return t.reward;
  const QValues next = net.q_values(t.next_state);
  const int best = static_cast<int>(greedy_action(next));
  return t.reward + gamma * next[best];
}

std::optional<double> train_step(QNetwork& net, const ReplayBuffer& buffer,
                                 const TrainConfig& config, Rng& rng) {
  const auto batch = static_cast<std::size_t>(config.batch_size);
  if (buffer.size() < batch) return std::nullopt;

  const auto picked = buffer.sample_indices(batch, rng);
  std::vector<Features> states(batch);
  std::vector<Features> next_states(batch);
  std::vector<int> actions(batch);
  for (std::size_t i = 0; i < batch; ++i) {
    const Transition& t = buffer[picked[i]];
    states[i] = t.state;
    next_states[i] = t.next_state;
    actions[i] = static_cast<int>(t.action);
  }

  // Targets come from the pre-update parameters and carry no gradient.
  const Eigen::MatrixXd next_q = net.forward(features_matrix(next_states));
  Eigen::VectorXd targets(static_cast<Eigen::Index>(batch));
  for (std::size_t i = 0; i < batch; ++i) {
    const Transition& t = buffer[picked[i]];
    const auto col = static_cast<Eigen::Index>(i);
    if (t.done) {
      targets(col) = t.reward;
    } else {
      Eigen::Index best = 0;
      for (Eigen::Index k = 1; k < kActionCount; ++k) {
        if (next_q(k, col) > next_q(best, col)) best = k;
      }
      targets(col) = t.reward + config.discount * next_q(best, col);
    }
  }

  QNetwork::Gradients grad;
  const double loss = net.loss_and_gradient(features_matrix(states), actions, targets, grad);
  if (config.max_grad_norm > 0.0) {
    const double norm = QNetwork::gradient_norm(grad);
    if (norm > config.max_grad_norm) QNetwork::scale_gradients(grad, config.max_grad_norm / norm);
  }
  net.sgd_update(grad, config.learning_rate);
  return loss;
}

double epsilon_after(const TrainConfig& config, int episodes) {
  double eps = config.epsilon_start;
  for (int i = 0; i < episodes; ++i) eps = std::max(config.epsilon_min, eps * config.epsilon_decay);
  return eps;
}

bool has_plateaued(std::span<const double> scores, int window, double tolerance) {
  if (window <= 0) return false;
  const auto w = static_cast<std::size_t>(window);
  if (scores.size() < 2 * w) return false;
  double lo = 0.0;
  double hi = 0.0;
  double total = 0.0;
  for (std::size_t end = scores.size() - w + 1; end <= scores.size(); ++end) {
    const double avg = std::accumulate(scores.begin() + static_cast<std::ptrdiff_t>(end - w),
                                       scores.begin() + static_cast<std::ptrdiff_t>(end), 0.0) /
                       static_cast<double>(w);
    if (end == scores.size() - w + 1) {
      lo = hi = avg;
    } else {
      lo = std::min(lo, avg);
      hi = std::max(hi, avg);
    }
    total += avg;
  }
  const double mean = total / static_cast<double>(w);
  return hi - lo <= tolerance * std::abs(mean);
}

TrainResult train_agent(Environment& env, const TrainConfig& config, Rng& rng) {
  config.validate();
  TrainResult result;
  result.network = QNetwork(config.layout(), rng);
  ReplayBuffer buffer(config.replay_capacity);

  QNetwork best;
  double best_greedy = 0.0;
  int best_episode = -1;
  double epsilon = config.epsilon_start;
  for (int episode = 0; episode < config.max_episodes; ++episode) {
    env.reset();
    double score = 0.0;
    bool done = false;
    while (!done) {
      const Features s = env.observe();
      const Action a = select_action(result.network, s, epsilon, rng);
      const StepResult r = env.step(a);
      buffer.push({s, a, r.reward, env.observe(), r.done && config.horizon_is_terminal});
      train_step(result.network, buffer, config, rng);
      score += r.reward;
      done = r.done;
    }
    result.scores.push_back(score);
    if (config.keep_best_greedy) {
      double greedy = 0.0;
      for (const auto& st : greedy_rollout(result.network, env)) greedy += st.reward;
      result.greedy_scores.push_back(greedy);
      if (best_episode < 0 || greedy > best_greedy) {
        best_greedy = greedy;
        best_episode = episode;
        best = result.network;
      }
    }
    epsilon = std::max(config.epsilon_min, epsilon * config.epsilon_decay);
    if (has_plateaued(result.scores, config.plateau_window, config.plateau_tolerance)) {
      result.converged = true;
      break;
    }
  }
  if (best_episode >= 0) {
    result.network = std::move(best);
    result.best_episode = best_episode;
  } else {
    result.best_episode = static_cast<int>(result.scores.size()) - 1;
  }
  return result;
}

std::vector<RolloutStep> greedy_rollout(const QNetwork& net, Environment& env) {
  std::vector<RolloutStep> out;
  env.reset();
  bool done = false;
  while (!done) {
    const Action a = greedy_action(net.q_values(env.observe()));
    const StepResult r = env.step(a);
    out.push_back({r.state, r.reward});
    done = r.done;
  }
  return out;
}

}  // namespace deepair
