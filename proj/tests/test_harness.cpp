#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "deepair/harness.hpp"

using namespace deepair;
namespace fs = std::filesystem;

namespace {

ExperimentSpec baseline_spec(const std::string& method) {
  ExperimentSpec spec;
  spec.method = PlacementMethod::parse(method);
  spec.pipeline.duration = 200;
  return spec;
}

int lines(const std::string& text) {
  int n = 0;
  for (char c : text) n += c == '\n';
  return n;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("deepair_test_" + name);
  fs::remove_all(p);
  return p;
}

}  // namespace

TEST_CASE("one row per cell and seed") {
  const ResultTable t = run_experiment(baseline_spec("CF-16"));
  CHECK(t.rows.size() == 30);
  CHECK_FALSE(t.any_failed());
  CHECK(t.curves.empty());
  CHECK(lines(rows_csv(t)) == 31);
  const auto agg = t.aggregates();
  REQUIRE(agg.size() == 3);
  for (const auto& a : agg) CHECK(a.runs == 10);
}

TEST_CASE("rerunning a spec reproduces every file") {
  ExperimentSpec spec = baseline_spec("Random-16");
  spec.fleet_sizes = {5, 10};
  const ResultTable a = run_experiment(spec);
  const ResultTable b = run_experiment(spec);
  CHECK(rows_csv(a) == rows_csv(b));
  CHECK(details_csv(a) == details_csv(b));
  CHECK(aggregate_csv(a) == aggregate_csv(b));

  const fs::path d1 = scratch("det1"), d2 = scratch("det2");
  emit(a, d1);
  emit(b, d2);
  for (const char* f : {"rows.csv", "details.csv", "aggregate.csv", "scores.csv"})
    CHECK(slurp(d1 / f) == slurp(d2 / f));
  fs::remove_all(d1);
  fs::remove_all(d2);
}

TEST_CASE("aggregates recompute from rows") {
  ExperimentSpec spec = baseline_spec("Random-8");
  spec.user_counts = {40};
  spec.seeds = {3, 4, 5, 6};
  const ResultTable t = run_experiment(spec);
  double sum = 0;
  for (const auto& r : t.rows) sum += r.metrics.success_rate;
  const double mean = sum / 4;
  double ss = 0;
  for (const auto& r : t.rows) ss += (r.metrics.success_rate - mean) * (r.metrics.success_rate - mean);
  const auto agg = t.aggregates();
  REQUIRE(agg.size() == 1);
  CHECK(agg[0].mean_success == doctest::Approx(mean).epsilon(1e-12));
  CHECK(agg[0].stddev_success == doctest::Approx(std::sqrt(ss / 3)).epsilon(1e-12));
}

TEST_CASE("rows csv layout") {
  ResultTable empty;
  CHECK(rows_csv(empty) == std::string(kRowsHeader) + "\n");
  ResultTable t;
  ResultRow r;
  r.method = "CF-16";
  r.seed = 3;
  r.users = 60;
  r.fleet = 10;
  r.detectors_used = 7;
  r.metrics.success_rate = 0.5;
  t.rows.push_back(r);
  CHECK(rows_csv(t) == "method,seed,users,fleet,detectors_used,success_rate\nCF-16,3,60,10,7,0.5\n");
}

TEST_CASE("failed cells are recorded, not thrown") {
  ExperimentSpec spec = baseline_spec("CF-4");
  spec.user_counts = {2, 20};  // 2 users cannot cover 3 attraction points
  spec.seeds = {1, 2};
  const ResultTable t = run_experiment(spec);
  CHECK(t.rows.size() == 4);
  CHECK(t.any_failed());
  int failed = 0;
  for (const auto& r : t.rows) failed += r.failed;
  CHECK(failed == 2);
  for (const auto& a : t.aggregates()) CHECK(a.failed == (a.users == 2 ? 2 : 0));
  CHECK(rows_csv(t).find("nan") != std::string::npos);
}

TEST_CASE("invalid specs are rejected up front") {
  ExperimentSpec spec = baseline_spec("CF-4");
  spec.seeds.clear();
  CHECK_THROWS_AS(run_experiment(spec), ConfigError);
  spec = baseline_spec("CF-4");
  spec.pipeline.duration = 0;
  CHECK_THROWS_AS(run_experiment(spec), ConfigError);
}

TEST_CASE("community flying beats random placement") {
  ExperimentSpec cf = baseline_spec("CF-16");
  ExperimentSpec rnd = baseline_spec("Random-16");
  cf.pipeline.duration = rnd.pipeline.duration = 500;
  double a = 0, b = 0;
  for (const auto& g : run_experiment(cf).aggregates()) a += g.mean_success;
  for (const auto& g : run_experiment(rnd).aggregates()) b += g.mean_success;
  CHECK(a >= b);
}

TEST_CASE("learned placement exports score curves") {
  ExperimentSpec spec;
  spec.method = PlacementMethod::deep_air();
  spec.user_counts = {12};
  spec.seeds = {1};
  spec.attraction_point_counts = {1};
  spec.pipeline.duration = 100;
  auto& t = spec.pipeline.localization.train;
  t.max_episodes = 3;
  t.hidden_layers = {8};
  t.batch_size = 8;
  spec.pipeline.localization.env.episode_length = 30;
  const ResultTable table = run_experiment(spec);
  REQUIRE(table.rows.size() == 1);
  REQUIRE(!table.curves.empty());
  CHECK(table.curves.back().accepted == false);
  for (const auto& c : table.curves) CHECK(c.scores.size() <= 3);
  CHECK(lines(scores_csv(table)) >= 2);
}

TEST_CASE("emit surfaces the failing path") {
  const fs::path base = scratch("emit");
  fs::create_directories(base);
  std::ofstream(base / "file") << "x";
  try {
    emit(ResultTable{}, base / "file" / "sub");
    FAIL("expected an IoError");
  } catch (const IoError& e) {
    CHECK(std::string(e.what()).find("file") != std::string::npos);
  }
  emit(ResultTable{}, base / "ok");
  CHECK(slurp(base / "ok" / "rows.csv") == std::string(kRowsHeader) + "\n");
  fs::remove_all(base);
}

TEST_CASE("derived seeds are distinct per stream") {
  CHECK(derive_seed(1, 1) != derive_seed(1, 2));
  CHECK(derive_seed(1, 1) != derive_seed(2, 1));
  CHECK(derive_seed(5, 3) == derive_seed(5, 3));
}
