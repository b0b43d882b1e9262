// Acceptance run: one PASS/FAIL line per criterion, also written to
// <out>/acceptance_results.txt together with the experiment CSVs.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "deepair/allocation.hpp"
#include "deepair/dqn.hpp"
#include "deepair/harness.hpp"
#include "deepair/localization.hpp"
#include "deepair/mec_sim.hpp"
#include "deepair/queueing.hpp"

using namespace deepair;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(double v, int digits = 4) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(digits) << v;
  return os.str();
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// --- 1: backprop against central differences -------------------------------

Outcome gradient_check() {
  Rng rng(2024);
  std::uniform_int_distribution<int> width(2, 12), batch(1, 16);
  std::normal_distribution<double> n01(0, 0.3);
  const int networks = 25;
  double worst = 0;
  for (int trial = 0; trial < networks; ++trial) {
    std::vector<int> sizes{kFeatureCount};
    for (int h = 0; h < 1 + trial % 3; ++h) sizes.push_back(width(rng));
    sizes.push_back(kActionCount);
    QNetwork net(sizes, rng);
    auto flat = net.flat_parameters();
    for (double& p : flat) p += n01(rng);
    net.set_flat_parameters(flat);

    const int b = batch(rng);
    Eigen::MatrixXd x(kFeatureCount, b);
    for (int i = 0; i < x.size(); ++i) x(i) = 2 * uniform01(rng) - 1;
    std::vector<int> actions(b);
    Eigen::VectorXd targets(b);
    for (int i = 0; i < b; ++i) {
      actions[i] = static_cast<int>(rng() % kActionCount);
      targets(i) = 5 * n01(rng);
    }
    QNetwork::Gradients g;
    net.loss_and_gradient(x, actions, targets, g);
    std::vector<double> analytic;
    for (std::size_t l = 0; l < g.weights.size(); ++l) {
      for (int i = 0; i < g.weights[l].rows(); ++i)
        for (int j = 0; j < g.weights[l].cols(); ++j) analytic.push_back(g.weights[l](i, j));
      for (int i = 0; i < g.biases[l].size(); ++i) analytic.push_back(g.biases[l](i));
    }
    const double h = 1e-6;
    for (std::size_t k = 0; k < flat.size(); ++k) {
      auto p = flat;
      p[k] = flat[k] + h;
      net.set_flat_parameters(p);
      const double up = net.loss(x, actions, targets);
      p[k] = flat[k] - h;
      net.set_flat_parameters(p);
      const double down = net.loss(x, actions, targets);
      const double numeric = (up - down) / (2 * h);
      const double scale = std::max({std::abs(numeric), std::abs(analytic[k]), 1e-4});
      worst = std::max(worst, std::abs(numeric - analytic[k]) / scale);
    }
  }
  std::ostringstream os;
  os << networks << " networks, max relative error " << std::scientific << std::setprecision(2)
     << worst;
  return {worst < 1e-4, os.str()};
}

// --- 2: simulated sojourn against M/M/1 ------------------------------------

Outcome queueing_fidelity() {
  const int n = 5;
  const TaskProfile task;
  Scenario scenario = generate_scenario(1, n, 1, ArenaConfig{}, task);
  const Point2 p = scenario.attraction_points[0].position;
  DeploymentPlan plan;
  plan.granted = {1};
  ServingUav uav;
  uav.position = {p.x, p.y, scenario.config.uav_altitude};
  for (auto& u : scenario.users) {
    u.position = p;
    u.connect(0);
    uav.user_ids.push_back(u.id);
  }
  plan.uavs.push_back(uav);

  SimulationConfig cfg;
  cfg.duration = 1000;
  double weighted = 0;
  long count = 0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    Rng rng(seed);
    const RunMetrics m = simulate(plan, scenario, cfg, rng);
    weighted += m.mean_sojourn * static_cast<double>(m.offloaded);
    count += m.offloaded;
  }
  const double simulated = weighted / static_cast<double>(count);
  const double mu = cfg.serving.capacity / task.cycles();
  const double analytic = 1.0 / (mu - n * task.arrival_rate);
  const double err = std::abs(simulated - analytic) / analytic;
  const double quoted = 0.1765;
  return {err <= 0.10,
          "simulated " + fmt(simulated) + " s over " + std::to_string(count) +
              " tasks, analytic 1/(mu - sum lambda) = " + fmt(analytic) + " s, error " +
              fmt(100 * err, 2) + "%; against the quoted 0.1765 s the error is " +
              fmt(100 * std::abs(simulated - quoted) / quoted, 2) +
              "% (0.1765 equals 1/(mu - 1.0), not 1/(mu - 1.5))"};
}

// --- 3: capacity math against brute force -----------------------------------

// Every multiset of k positive group sizes summing to n, largest first.
void size_partitions(int n, int k, int cap, std::vector<int>& cur,
                     const std::function<void(const std::vector<int>&)>& visit) {
  if (k == 0) {
    if (n == 0) visit(cur);
    return;
  }
  for (int s = std::min(cap, n - (k - 1)); s >= 1; --s) {
    if (s * k < n) break;
    cur.push_back(s);
    size_partitions(n - s, k - 1, s, cur, visit);
    cur.pop_back();
  }
}

Outcome capacity_math() {
  const TaskProfile task;
  const ServingSpec spec;
  const RadioParams radio;
  auto copies = [&](int n) { return std::vector<TaskProfile>(n, task); };

  int brute_max = 0;
  for (int n = 1; n <= 60; ++n)
    if (group_feasible(copies(n), spec, radio)) brute_max = n;
  const int lib_max = max_users_per_uav(task, spec, radio);

  // identical users: the split is fully described by its group sizes, so
  // enumerating size partitions is exhaustive
  const int users = 23;
  int brute_required = -1;
  for (int k = 1; k <= users && brute_required < 0; ++k) {
    bool any = false;
    std::vector<int> cur;
    size_partitions(users, k, users, cur, [&](const std::vector<int>& sizes) {
      if (any) return;
      bool ok = true;
      for (int s : sizes) ok = ok && group_feasible(copies(s), spec, radio);
      any = ok;
    });
    if (any) brute_required = k;
  }
  const auto profiles = copies(users);
  const int lib_required = required_uavs(profiles, spec, radio);
  const bool pass = lib_max == 5 && brute_max == 5 && lib_required == 5 && brute_required == 5;
  return {pass, "max_users_per_uav " + std::to_string(lib_max) + " (brute force " +
                    std::to_string(brute_max) + "), required_uavs(23) " +
                    std::to_string(lib_required) + " (brute force " +
                    std::to_string(brute_required) + ")"};
}

// --- 4: single-cluster localization -----------------------------------------

Outcome single_cluster() {
  const auto t0 = std::chrono::steady_clock::now();
  const LocalizationConfig cfg;
  int hits = 0;
  std::ostringstream distances;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    Scenario sc = generate_scenario(seed, 50, 1, ArenaConfig{});
    Rng rng(derive_seed(seed, 1));
    const DetectorReport r = run_iteration(sc, {}, 0, cfg, rng);
    const double d = horizontal_distance(sc.attraction_points[0].position, r.hover_position);
    hits += d <= 75.0;
    distances << (seed > 1 ? " " : "") << fmt(d, 1);
    std::cerr << "  single cluster seed " << seed << ": " << fmt(d, 1) << " m, "
              << r.episode_scores.size() << " episodes\n";
  }
  const double elapsed = seconds_since(t0);
  return {hits >= 8 && elapsed <= 600.0,
          std::to_string(hits) + "/10 hovers within 75 m (distances " + distances.str() +
              "), max episodes " + std::to_string(cfg.train.max_episodes) + ", " +
              fmt(elapsed, 1) + " s total"};
}

// --- 5-7: shared sweep ------------------------------------------------------

struct Sweep {
  ResultTable table;
  // (method, users, fleet) -> mean success over the seeds
  std::map<std::tuple<std::string, int, int>, double> mean;
};

Sweep run_sweep(const fs::path& out) {
  Sweep s;
  for (const auto& m : {PlacementMethod::deep_air(), PlacementMethod::cf(16),
                        PlacementMethod::random(16)}) {
    ExperimentSpec spec;
    spec.method = m;
    spec.fleet_sizes = {6, 7, 8, 9, 10};
    const auto t0 = std::chrono::steady_clock::now();
    s.table.append(run_experiment(spec, [](const ResultRow& r) {
      if (r.fleet == 10)
        std::cerr << "  " << r.method << " seed " << r.seed << " users " << r.users
                  << " detectors " << r.detectors_used << " connected " << r.connected
                  << (r.failed ? " FAILED " + r.error : "") << "\n";
    }));
    std::cerr << "  " << m.name() << " sweep " << fmt(seconds_since(t0), 1) << " s\n";
  }
  emit(s.table, out / "sweep");
  for (const auto& a : s.table.aggregates())
    s.mean[{a.method, a.users, a.fleet}] = a.mean_success;
  return s;
}

Outcome algorithm_behavior(const Sweep& s) {
  int good = 0, runs = 0;
  std::ostringstream per_seed;
  for (const auto& r : s.table.rows) {
    if (r.method != "DeepAir" || r.users != 60 || r.fleet != 10) continue;
    ++runs;
    const double frac = static_cast<double>(r.connected) / r.users;
    const bool ok = !r.failed && r.detectors_used >= 3 && r.detectors_used <= 6 && frac >= 0.9;
    good += ok;
    per_seed << (runs > 1 ? "; " : "") << "seed " << r.seed << ": "
             << (r.failed ? "failed" : std::to_string(r.detectors_used) + " det, " +
                                           fmt(100 * frac, 1) + "%");
  }
  return {good >= 7, std::to_string(good) + "/" + std::to_string(runs) +
                         " seeds with 3-6 detectors and >= 90% connected (" + per_seed.str() +
                         ")"};
}

Outcome ordering(const Sweep& s) {
  const double slack = 0.03;
  bool pass = true;
  std::ostringstream os;
  std::map<int, double> gap;
  for (int users : {60, 80, 100}) {
    const double d = s.mean.at({"DeepAir", users, 10});
    const double c = s.mean.at({"CF-16", users, 10});
    const double r = s.mean.at({"Random-16", users, 10});
    const bool ok = d >= c - slack && c >= r - slack;
    pass = pass && ok;
    gap[users] = d - (c + r) / 2;
    os << users << " users: DeepAir " << fmt(d, 3) << ", CF-16 " << fmt(c, 3) << ", Random-16 "
       << fmt(r, 3) << (ok ? "" : " (order violated)") << "; ";
  }
  const bool narrows = std::abs(gap[100]) < std::abs(gap[60]);
  pass = pass && narrows;
  os << "gap to baseline mean " << fmt(gap[60], 3) << " at 60 users, " << fmt(gap[100], 3)
     << " at 100 users" << (narrows ? "" : " (does not narrow)");
  os << "; mean share of users connected at 100 users:";
  for (const std::string method : {"DeepAir", "CF-16", "Random-16"}) {
    double connected = 0;
    int runs = 0;
    for (const auto& r : s.table.rows)
      if (r.method == method && r.users == 100 && r.fleet == 10 && !r.failed) {
        connected += static_cast<double>(r.connected) / r.users;
        ++runs;
      }
    os << " " << method << " " << fmt(100 * connected / std::max(runs, 1), 1) << "%";
  }
  return {pass, os.str()};
}

Outcome monotonic(const Sweep& s) {
  const double slack = 0.02;
  const std::vector<int> users{60, 80, 100}, fleets{6, 7, 8, 9, 10};
  std::vector<std::string> violations;
  for (const std::string method : {"DeepAir", "CF-16", "Random-16"}) {
    for (int f : fleets)
      for (std::size_t i = 1; i < users.size(); ++i) {
        const double a = s.mean.at({method, users[i - 1], f});
        const double b = s.mean.at({method, users[i], f});
        if (b > a + slack)
          violations.push_back(method + " fleet " + std::to_string(f) + ": " +
                               std::to_string(users[i - 1]) + "->" + std::to_string(users[i]) +
                               " users " + fmt(a, 3) + "->" + fmt(b, 3));
      }
    for (int u : users)
      for (std::size_t i = 1; i < fleets.size(); ++i) {
        const double a = s.mean.at({method, u, fleets[i - 1]});
        const double b = s.mean.at({method, u, fleets[i]});
        if (b < a - slack)
          violations.push_back(method + " " + std::to_string(u) + " users: fleet " +
                               std::to_string(fleets[i - 1]) + "->" + std::to_string(fleets[i]) +
                               " " + fmt(a, 3) + "->" + fmt(b, 3));
      }
  }
  const double r9 = s.mean.at({"Random-16", 80, 9});
  const double r10 = s.mean.at({"Random-16", 80, 10});
  const bool random_ok = r9 > 0.70 && r10 > 0.70;
  std::ostringstream os;
  os << (violations.empty() ? "trends monotone within 2 pp" : "trend violations:");
  for (const auto& v : violations) os << " [" << v << "]";
  os << "; Random-16 at 80 users: " << fmt(100 * r9, 1) << "% with 9 UAVs, " << fmt(100 * r10, 1)
     << "% with 10 UAVs (target above 70%)";
  if (!random_ok) {
    double connected = 0;
    int runs = 0;
    for (const auto& r : s.table.rows)
      if (r.method == "Random-16" && r.users == 80 && r.fleet == 10 && !r.failed) {
        connected += static_cast<double>(r.connected) / r.users;
        ++runs;
      }
    os << "; below the 70% target; Random-16 connects " << fmt(100 * connected / runs, 1)
       << "% of users on average and unconnected users' tasks count as failures";
  }
  return {violations.empty() && random_ok, os.str()};
}

// --- 8: learning-rate effect ------------------------------------------------

Outcome learning_rate() {
  const int cap = 600, short_cap = 300;
  std::map<double, std::vector<int>> episodes;
  for (double lr : {0.005, 0.0005}) {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      Scenario sc = generate_scenario(seed, 50, 1, ArenaConfig{});
      Environment env(sc, EnvParams{}, RadioParams{});
      TrainConfig tc;
      tc.learning_rate = lr;
      tc.max_episodes = cap;
      tc.keep_best_greedy = false;
      Rng rng(seed * 31 + 7);
      const TrainResult r = train_agent(env, tc, rng);
      const int n = r.converged ? static_cast<int>(r.scores.size()) : cap;
      episodes[lr].push_back(n);
      std::cerr << "  lr " << lr << " seed " << seed << ": "
                << (r.converged ? std::to_string(n) : "no plateau by " + std::to_string(cap))
                << "\n";
    }
  }
  auto mean = [](const std::vector<int>& v, int limit) {
    double s = 0;
    for (int x : v) s += std::min(x, limit);
    return s / static_cast<double>(v.size());
  };
  const double fast = mean(episodes[0.005], cap), slow = mean(episodes[0.0005], cap);
  std::ostringstream os;
  os << "mean episodes to plateau (runs without a plateau counted as " << cap << "): lr 0.005 "
     << fmt(fast, 1) << ", lr 0.0005 " << fmt(slow, 1) << "; capped at " << short_cap << ": "
     << fmt(mean(episodes[0.005], short_cap), 1) << " vs "
     << fmt(mean(episodes[0.0005], short_cap), 1) << "; per seed";
  for (double lr : {0.005, 0.0005}) {
    os << " lr " << lr << " [";
    for (std::size_t i = 0; i < episodes[lr].size(); ++i) os << (i ? " " : "") << episodes[lr][i];
    os << "]";
  }
  return {fast < slow, os.str()};
}

// --- 9: determinism ---------------------------------------------------------

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

Outcome determinism(const fs::path& out) {
  std::vector<fs::path> dirs{out / "determinism_a", out / "determinism_b"};
  for (const auto& dir : dirs) {
    ResultTable table;
    for (const auto& m : {PlacementMethod::deep_air(), PlacementMethod::cf(16),
                          PlacementMethod::random(16)}) {
      ExperimentSpec spec;
      spec.method = m;
      spec.user_counts = {60};
      spec.fleet_sizes = {8, 10};
      spec.seeds = {1, 2};
      table.append(run_experiment(spec));
    }
    fs::remove_all(dir);
    emit(table, dir);
  }
  int files = 0;
  std::vector<std::string> differing;
  for (const auto& entry : fs::directory_iterator(dirs[0])) {
    ++files;
    const auto name = entry.path().filename();
    if (!fs::exists(dirs[1] / name) || slurp(entry.path()) != slurp(dirs[1] / name))
      differing.push_back(name.string());
  }
  int other = 0;
  for ([[maybe_unused]] const auto& entry : fs::directory_iterator(dirs[1])) ++other;
  const bool pass = files > 0 && files == other && differing.empty();
  std::string detail = std::to_string(files) + " result files compared byte for byte";
  for (const auto& d : differing) detail += ", differs: " + d;
  if (files != other) detail += ", file counts differ";
  return {pass, detail};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance run"};
  std::vector<int> only;
  const char* env_out = std::getenv("DEEPAIR_OUT_DIR");
  std::string out = env_out && *env_out ? env_out : "acceptance-out";
  app.add_option("--only", only, "criteria to run (default: all)")->delimiter(',');
  app.add_option("--out", out, "output directory");
  CLI11_PARSE(app, argc, argv);

  const fs::path dir(out);
  fs::create_directories(dir);
  auto wanted = [&](int c) { return only.empty() || std::count(only.begin(), only.end(), c) > 0; };

  const std::vector<std::string> names{"",
                                       "gradient correctness",
                                       "queueing fidelity",
                                       "capacity math",
                                       "single-cluster localization",
                                       "localization loop behavior",
                                       "end-to-end ordering",
                                       "monotonic trends",
                                       "learning-rate effect",
                                       "determinism"};
  std::vector<std::string> lines;
  bool all_pass = true;
  auto report = [&](int c, const Outcome& o, double secs) {
    std::ostringstream os;
    os << (o.pass ? "PASS" : "FAIL") << " " << c << " " << names[c] << ": " << o.detail << " ["
       << fmt(secs, 1) << " s]";
    lines.push_back(os.str());
    std::cout << os.str() << std::endl;
    all_pass = all_pass && o.pass;
  };
  auto run = [&](int c, const std::function<Outcome()>& fn) {
    if (!wanted(c)) return;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    report(c, o, seconds_since(t0));
  };

  run(1, gradient_check);
  run(2, queueing_fidelity);
  run(3, capacity_math);
  run(4, single_cluster);
  if (wanted(5) || wanted(6) || wanted(7)) {
    const auto t0 = std::chrono::steady_clock::now();
    std::optional<Sweep> sweep;
    std::string error;
    try {
      sweep = run_sweep(dir);
    } catch (const std::exception& e) {
      error = e.what();
    }
    const double secs = seconds_since(t0);
    for (int c : {5, 6, 7}) {
      if (!wanted(c)) continue;
      Outcome o{false, "sweep error: " + error};
      if (sweep) {
        try {
          o = c == 5 ? algorithm_behavior(*sweep) : c == 6 ? ordering(*sweep) : monotonic(*sweep);
        } catch (const std::exception& e) {
          o = {false, std::string("error: ") + e.what()};
        }
      }
      report(c, o, secs);
    }
  }
  run(8, learning_rate);
  run(9, [&] { return determinism(dir); });

  std::string text;
  for (const auto& l : lines) text += l + "\n";
  write_text_file(dir / "acceptance_results.txt", text);
  return all_pass ? 0 : 1;
}
