#include "deepair/harness.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <tuple>

namespace deepair {

void PipelineConfig::validate() const {
  arena.validate();
  task.validate();
  radio.validate();
  serving.validate();
  localization.validate();
  if (!(dispersion.sigma > 0.0) || dispersion.cutoff < 0.0)
    throw ConfigError("dispersion sigma must be positive and cutoff non-negative");
  if (!(duration > 0.0)) throw ConfigError("duration must be positive");
}

void ExperimentSpec::validate() const {
  if (user_counts.empty() || fleet_sizes.empty() || attraction_point_counts.empty() || seeds.empty())
    throw ConfigError("experiment lists must be non-empty");
  for (int n : user_counts)
    if (n < 0) throw ConfigError("user count must be non-negative");
  for (int f : fleet_sizes)
    if (f < 0) throw ConfigError("fleet size must be non-negative");
  for (int p : attraction_point_counts)
    if (p < 1) throw ConfigError("attraction point count must be at least 1");
  if ((method.kind != PlacementMethod::Kind::DeepAir) && method.k < 0)
    throw ConfigError("baseline detector count must be non-negative");
  pipeline.validate();
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

LocalizationResult place_detectors(const PlacementMethod& method, Scenario& scenario,
                                   const PipelineConfig& config, Rng& rng) {
  switch (method.kind) {
    case PlacementMethod::Kind::DeepAir: {
      LocalizationConfig lc = config.localization;
      lc.radio = config.radio;
      return find_locations(scenario, lc, rng);
    }
    case PlacementMethod::Kind::CF: {
      const auto centers = cf_centers(method.k, scenario.config);
      return place_and_connect(centers, scenario);
    }
    case PlacementMethod::Kind::Random: {
      const auto centers = random_centers(method.k, scenario.config, rng);
      return place_and_connect(centers, scenario);
    }
  }
  throw ConfigError("unknown placement method");
}

DeploymentPlan plan_deployment(const Scenario& scenario, const LocalizationResult& located,
                               int fleet, const PipelineConfig& config) {
  const auto demands = area_demands(scenario, located, config.serving, config.radio);
  return deploy(demands, fleet, located.reports, scenario);
}

namespace {

enum Stream : std::uint64_t { kPlacement = 1, kSimulation = 2 };

int detectors_used(const LocalizationResult& located) {
  int n = 0;
  for (const auto& r : located.reports) n += r.connection_count() > 0;
  return n;
}

}  // namespace

ResultTable run_experiment(const ExperimentSpec& spec, const ProgressFn& progress) {
  spec.validate();
  const PipelineConfig& pc = spec.pipeline;
  const std::string name = spec.method.name();
  ResultTable table;

  for (int points : spec.attraction_point_counts) {
    for (int users : spec.user_counts) {
      for (std::uint64_t seed : spec.seeds) {
        auto failed_rows = [&](const std::string& what) {
          for (int fleet : spec.fleet_sizes) {
            ResultRow row;
            row.method = name;
            row.seed = seed;
            row.points = points;
            row.users = users;
            row.fleet = fleet;
            row.failed = true;
            row.error = what;
            table.rows.push_back(row);
            if (progress) progress(row);
          }
        };

        Scenario scenario;
        LocalizationResult located;
        try {
          scenario = generate_scenario(seed, users, points, pc.arena, pc.task, pc.dispersion);
          Rng rng(derive_seed(seed, kPlacement));
          located = place_detectors(spec.method, scenario, pc, rng);
        } catch (const Error& e) {
          failed_rows(e.what());
          continue;
        }

        if (spec.method.kind == PlacementMethod::Kind::DeepAir) {
          int it = 0;
          auto add_curve = [&](const DetectorReport& r, bool accepted) {
            table.curves.push_back({name, seed, points, users, it++, accepted, r.episode_scores});
          };
          for (const auto& r : located.reports) add_curve(r, true);
          if (located.rejected) add_curve(*located.rejected, false);
        }

        for (int fleet : spec.fleet_sizes) {
          ResultRow row;
          row.method = name;
          row.seed = seed;
          row.points = points;
          row.users = users;
          row.fleet = fleet;
          row.detectors_used = detectors_used(located);
          row.connected = located.total_connected;
          try {
            const DeploymentPlan plan = plan_deployment(scenario, located, fleet, pc);
            row.serving_deployed = static_cast<int>(plan.uavs.size());
            // Same stream for every fleet size: fleets are compared on
            // identical task arrivals.
            Rng rng(derive_seed(seed, kSimulation));
            row.metrics = simulate(plan, scenario, pc.simulation(), rng);
          } catch (const Error& e) {
            row.failed = true;
            row.error = e.what();
          }
          table.rows.push_back(row);
          if (progress) progress(row);
        }
      }
    }
  }
  return table;
}

namespace {

using CellKey = std::tuple<std::string, int, int, int>;

CellKey key_of(const ResultRow& r) { return {r.method, r.points, r.users, r.fleet}; }

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(10);
  os << v;
  return os.str();
}

// Error messages go into a quoted CSV field.
std::string quoted(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += (c == '\n' || c == '\r') ? ' ' : c;
  }
  return out + "\"";
}

}  // namespace

std::vector<CellAggregate> ResultTable::aggregates() const {
  std::map<CellKey, std::vector<const ResultRow*>> cells;
  for (const auto& r : rows) cells[key_of(r)].push_back(&r);

  std::vector<CellAggregate> out;
  for (const auto& [key, members] : cells) {
    CellAggregate a;
    std::tie(a.method, a.points, a.users, a.fleet) = key;
    double sum = 0.0, det = 0.0;
    for (const ResultRow* r : members) {
      if (r->failed) {
        ++a.failed;
        continue;
      }
      ++a.runs;
      sum += r->metrics.success_rate;
      det += r->detectors_used;
    }
    if (a.runs > 0) {
      a.mean_success = sum / a.runs;
      a.mean_detectors = det / a.runs;
    }
    if (a.runs > 1) {
      double ss = 0.0;
      for (const ResultRow* r : members)
        if (!r->failed) ss += (r->metrics.success_rate - a.mean_success) * (r->metrics.success_rate - a.mean_success);
      a.stddev_success = std::sqrt(ss / (a.runs - 1));
    }
    out.push_back(a);
  }
  return out;
}

bool ResultTable::any_failed() const {
  return std::any_of(rows.begin(), rows.end(), [](const ResultRow& r) { return r.failed; });
}

void ResultTable::append(const ResultTable& other) {
  rows.insert(rows.end(), other.rows.begin(), other.rows.end());
  curves.insert(curves.end(), other.curves.begin(), other.curves.end());
}

std::string rows_csv(const ResultTable& table) {
  std::ostringstream os;
  os << kRowsHeader << '\n';
  for (const auto& r : table.rows) {
    os << r.method << ',' << r.seed << ',' << r.users << ',' << r.fleet << ',' << r.detectors_used << ',';
    if (r.failed)
      os << "nan";
    else
      os << fmt(r.metrics.success_rate);
    os << '\n';
  }
  return os.str();
}

std::string details_csv(const ResultTable& table) {
  std::ostringstream os;
  os << "method,seed,points,users,fleet,detectors_used,connected,serving_deployed,generated,succeeded,"
        "offloaded,success_rate,mean_sojourn,mean_total_delay,failed,error\n";
  for (const auto& r : table.rows) {
    const auto& m = r.metrics;
    os << r.method << ',' << r.seed << ',' << r.points << ',' << r.users << ',' << r.fleet << ','
       << r.detectors_used << ',' << r.connected << ',' << r.serving_deployed << ',' << m.generated << ','
       << m.succeeded << ',' << m.offloaded << ',' << fmt(m.success_rate) << ',' << fmt(m.mean_sojourn) << ','
       << fmt(m.mean_total_delay) << ',' << (r.failed ? 1 : 0) << ',' << quoted(r.error) << '\n';
  }
  return os.str();
}

std::string aggregate_csv(const ResultTable& table) {
  std::ostringstream os;
  os << "method,points,users,fleet,runs,failed,mean_success_rate,stddev_success_rate,mean_detectors_used\n";
  for (const auto& a : table.aggregates()) {
    os << a.method << ',' << a.points << ',' << a.users << ',' << a.fleet << ',' << a.runs << ',' << a.failed
       << ',' << fmt(a.mean_success) << ',' << fmt(a.stddev_success) << ',' << fmt(a.mean_detectors) << '\n';
  }
  return os.str();
}

std::string scores_csv(const ResultTable& table) {
  std::ostringstream os;
  os << "method,seed,points,users,iteration,accepted,episode,score\n";
  for (const auto& c : table.curves)
    for (std::size_t e = 0; e < c.scores.size(); ++e)
      os << c.method << ',' << c.seed << ',' << c.points << ',' << c.users << ',' << c.iteration << ','
         << (c.accepted ? 1 : 0) << ',' << e << ',' << fmt(c.scores[e]) << '\n';
  return os.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << text;
  out.close();
  if (!out) throw IoError("write failed: " + path.string());
}

void emit(const ResultTable& table, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
  write_text_file(dir / "rows.csv", rows_csv(table));
  write_text_file(dir / "details.csv", details_csv(table));
  write_text_file(dir / "aggregate.csv", aggregate_csv(table));
  write_text_file(dir / "scores.csv", scores_csv(table));
}

}  // namespace deepair
