// deepair: command line front end for the localization / MEC pipeline.
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "deepair/harness.hpp"
#include "deepair/io.hpp"

namespace fs = std::filesystem;
using namespace deepair;

namespace {

fs::path default_out_dir() {
  const char* env = std::getenv("DEEPAIR_OUT_DIR");
  return env && *env ? fs::path(env) : fs::path("deepair-out");
}

struct Common {
  std::string config_path;
  std::string out;
  std::uint64_t seed = 1;
  int users = 60;
  int points = 3;
  std::string scenario_path;

  PipelineConfig config() const {
    PipelineConfig c;
    if (!config_path.empty()) c = load_pipeline_config(config_path);
    c.localization.radio = c.radio;
    c.validate();
    return c;
  }

  fs::path out_dir() const {
    fs::path dir = out.empty() ? default_out_dir() : fs::path(out);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
    return dir;
  }

  Scenario scenario(const PipelineConfig& c) const {
    if (!scenario_path.empty()) {
      std::ifstream in(scenario_path);
      if (!in) throw IoError("cannot open " + scenario_path);
      return read_scenario(in);
    }
    return generate_scenario(seed, users, points, c.arena, c.task, c.dispersion);
  }
};

void add_config(CLI::App* app, Common& c) {
  app->add_option("--config", c.config_path, "JSON file overriding the default parameters")
      ->check(CLI::ExistingFile);
  app->add_option("--out", c.out, "output directory (default $DEEPAIR_OUT_DIR or ./deepair-out)");
}

void add_scenario(CLI::App* app, Common& c) {
  app->add_option("--seed", c.seed, "run seed");
  app->add_option("--users", c.users, "number of users")->check(CLI::NonNegativeNumber);
  app->add_option("--points", c.points, "number of attraction points")->check(CLI::PositiveNumber);
  app->add_option("--scenario", c.scenario_path, "scenario file instead of generating one")
      ->check(CLI::ExistingFile);
}

void print_localization(const LocalizationResult& r) {
  std::cout << "detectors " << r.reports.size() << ", connected " << r.total_connected << "\n";
  for (const auto& rep : r.reports) {
    std::cout << "  #" << rep.detector_id << " at (" << rep.hover_position.x << ", " << rep.hover_position.y
              << ") connects " << rep.connection_count() << "\n";
  }
}

std::string scores_file(const std::vector<DetectorReport>& reports) {
  std::ostringstream os;
  os << "detector,episode,score\n";
  os.precision(10);
  for (const auto& r : reports)
    for (std::size_t e = 0; e < r.episode_scores.size(); ++e)
      os << r.detector_id << ',' << e << ',' << r.episode_scores[e] << '\n';
  return os.str();
}

int cmd_generate(const Common& c) {
  const auto cfg = c.config();
  const Scenario s = c.scenario(cfg);
  const fs::path path = c.out_dir() / "scenario.txt";
  write_text_file(path, serialize_scenario(s));
  std::cout << "wrote " << path.string() << " (" << s.users.size() << " users, "
            << s.attraction_points.size() << " points)\n";
  return 0;
}

int cmd_train(const Common& c) {
  const auto cfg = c.config();
  const Scenario s = c.scenario(cfg);
  Environment env(s, cfg.localization.env, cfg.radio);
  Rng rng(derive_seed(c.seed, 1));
  TrainResult trained = train_agent(env, cfg.localization.train, rng);
  const auto rollout = greedy_rollout(trained.network, env);
  const RolloutStep* best = &rollout.front();
  for (const auto& st : rollout)
    if (st.reward > best->reward) best = &st;

  const fs::path dir = c.out_dir();
  std::ostringstream net;
  trained.network.save(net);
  write_text_file(dir / "qnet.txt", net.str());
  DetectorReport rep;
  rep.episode_scores = trained.scores;
  write_text_file(dir / "scores.csv", scores_file({rep}));
  std::cout << "episodes " << trained.scores.size() << (trained.converged ? " (plateau)" : " (cap)")
            << ", hover (" << best->state.position.x << ", " << best->state.position.y << "), reward "
            << best->reward << "\n";
  return 0;
}

int cmd_localize(const Common& c, const std::string& method_text) {
  const auto cfg = c.config();
  Scenario s = c.scenario(cfg);
  const auto method = PlacementMethod::parse(method_text);
  Rng rng(derive_seed(c.seed, 1));
  const LocalizationResult r = place_detectors(method, s, cfg, rng);
  const fs::path dir = c.out_dir();
  write_text_file(dir / "localization.json", to_json(r).dump(2) + "\n");
  write_text_file(dir / "scenario.txt", serialize_scenario(s));
  write_text_file(dir / "scores.csv", scores_file(r.reports));
  print_localization(r);
  return 0;
}

int cmd_plan(const Common& c, const std::string& localization_path, int fleet) {
  const auto cfg = c.config();
  const Scenario s = c.scenario(cfg);
  const auto located = localization_from_json(read_json_file(localization_path));
  const DeploymentPlan plan = plan_deployment(s, located, fleet, cfg);
  const fs::path path = c.out_dir() / "plan.json";
  write_text_file(path, to_json(plan).dump(2) + "\n");
  std::cout << "granted";
  for (int g : plan.granted) std::cout << ' ' << g;
  std::cout << " (" << plan.uavs.size() << " of " << fleet << " UAVs)\n";
  return 0;
}

int cmd_simulate(const Common& c, const std::string& plan_path, double duration) {
  auto cfg = c.config();
  if (duration > 0.0) cfg.duration = duration;
  const Scenario s = c.scenario(cfg);
  const DeploymentPlan plan = plan_from_json(read_json_file(plan_path));
  Rng rng(derive_seed(c.seed, 2));
  const RunMetrics m = simulate(plan, s, cfg.simulation(), rng);
  write_text_file(c.out_dir() / "metrics.json", to_json(m).dump(2) + "\n");
  std::cout << "success " << m.succeeded << "/" << m.generated << " = " << m.success_rate << "\n";
  return 0;
}

struct ExperimentArgs {
  std::vector<std::string> methods{"DeepAir"};
  std::vector<int> users{60, 80, 100};
  std::vector<int> fleet{10};
  std::vector<int> points{3};
  std::vector<std::uint64_t> seeds;
  int seed_count = 10;
  double duration = 0.0;
};

int cmd_experiment(const Common& c, const ExperimentArgs& a) {
  auto cfg = c.config();
  if (a.duration > 0.0) cfg.duration = a.duration;
  std::vector<std::uint64_t> seeds = a.seeds;
  if (seeds.empty())
    for (int i = 1; i <= a.seed_count; ++i) seeds.push_back(static_cast<std::uint64_t>(i));

  ResultTable all;
  for (const auto& m : a.methods) {
    ExperimentSpec spec;
    spec.method = PlacementMethod::parse(m);
    spec.user_counts = a.users;
    spec.fleet_sizes = a.fleet;
    spec.attraction_point_counts = a.points;
    spec.seeds = seeds;
    spec.pipeline = cfg;
    all.append(run_experiment(spec, [](const ResultRow& r) {
      std::cerr << r.method << " seed " << r.seed << " users " << r.users << " fleet " << r.fleet << ": ";
      if (r.failed)
        std::cerr << "FAILED " << r.error << "\n";
      else
        std::cerr << r.metrics.success_rate << " (" << r.detectors_used << " detectors)\n";
    }));
  }
  const fs::path dir = c.out_dir();
  emit(all, dir);
  write_text_file(dir / "config.json", to_json(cfg).dump(2) + "\n");

  std::cout << std::left << std::setw(12) << "method" << std::setw(8) << "users" << std::setw(8) << "fleet"
            << std::setw(12) << "success" << "stddev\n";
  for (const auto& g : all.aggregates()) {
    std::cout << std::setw(12) << g.method << std::setw(8) << g.users << std::setw(8) << g.fleet
              << std::setw(12) << g.mean_success << g.stddev_success << "\n";
  }
  std::cout << "wrote " << dir.string() << "\n";
  if (all.any_failed()) {
    std::cerr << "some cells failed, see details.csv\n";
    return 1;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"UAV user localization and MEC offloading simulator"};
  app.require_subcommand(1);

  Common common;
  std::string method = "DeepAir";
  std::string localization_path, plan_path;
  int fleet = 10;
  double duration = 0.0;
  ExperimentArgs ex;

  auto* gen = app.add_subcommand("generate", "write a random scenario");
  add_config(gen, common);
  add_scenario(gen, common);

  auto* train = app.add_subcommand("train", "train one detector agent from the base");
  add_config(train, common);
  add_scenario(train, common);

  auto* loc = app.add_subcommand("localize", "place detectors and connect users");
  add_config(loc, common);
  add_scenario(loc, common);
  loc->add_option("--method", method, "DeepAir, CF-k or Random-k");

  auto* plan = app.add_subcommand("plan", "allocate serving UAVs to localized areas");
  add_config(plan, common);
  add_scenario(plan, common);
  plan->add_option("--localization", localization_path, "localization.json from localize")
      ->required()
      ->check(CLI::ExistingFile);
  plan->add_option("--fleet", fleet, "serving UAVs available")->check(CLI::NonNegativeNumber);

  auto* sim = app.add_subcommand("simulate", "run the offloading simulation for a plan");
  add_config(sim, common);
  add_scenario(sim, common);
  sim->add_option("--plan", plan_path, "plan.json from plan")->required()->check(CLI::ExistingFile);
  sim->add_option("--duration", duration, "simulated seconds")->check(CLI::PositiveNumber);

  auto* exp = app.add_subcommand("experiment", "sweep methods, user counts, fleets and seeds");
  add_config(exp, common);
  exp->add_option("--method", ex.methods, "placement methods (repeatable)");
  exp->add_option("--users", ex.users, "user counts")->delimiter(',');
  exp->add_option("--fleet", ex.fleet, "serving fleet sizes")->delimiter(',');
  exp->add_option("--points", ex.points, "attraction point counts")->delimiter(',');
  exp->add_option("--seed", ex.seeds, "explicit seeds")->delimiter(',');
  exp->add_option("--seeds", ex.seed_count, "use seeds 1..N when --seed is absent")
      ->check(CLI::PositiveNumber);
  exp->add_option("--duration", ex.duration, "simulated seconds")->check(CLI::PositiveNumber);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*gen) return cmd_generate(common);
    if (*train) return cmd_train(common);
    if (*loc) return cmd_localize(common, method);
    if (*plan) return cmd_plan(common, localization_path, fleet);
    if (*sim) return cmd_simulate(common, plan_path, duration);
    if (*exp) return cmd_experiment(common, ex);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
