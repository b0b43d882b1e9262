#include "deepair/io.hpp"

#include <fstream>
#include <set>

namespace deepair {

namespace {

// Reads the listed keys of one config section, rejecting anything else.
class Section {
 public:
  Section(const Json& j, std::string name) : j_(j), name_(std::move(name)) {
    if (!j_.is_object()) throw ConfigError("config section '" + name_ + "' must be an object");
  }

  template <class T>
  Section& get(const char* key, T& field) {
    seen_.insert(key);
    auto it = j_.find(key);
    if (it == j_.end()) return *this;
    try {
      field = it->template get<T>();
    } catch (const Json::exception& e) {
      throw ConfigError(name_ + "." + key + ": " + e.what());
    }
    return *this;
  }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it)
      if (!seen_.count(it.key())) throw ConfigError("unknown config key " + name_ + "." + it.key());
  }

 private:
  const Json& j_;
  std::string name_;
  std::set<std::string> seen_;
};

Json point(const Point3& p) { return Json::array({p.x, p.y, p.z}); }

Point3 point3(const Json& j) {
  if (!j.is_array() || j.size() != 3) throw ConfigError("expected [x, y, z]");
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

Json report_json(const DetectorReport& r) {
  return {{"detector_id", r.detector_id},
          {"hover_position", point(r.hover_position)},
          {"new_connection_ids", r.new_connection_ids},
          {"converged", r.converged},
          {"episode_scores", r.episode_scores}};
}

DetectorReport report_from(const Json& j) {
  DetectorReport r;
  r.detector_id = j.at("detector_id").get<int>();
  r.hover_position = point3(j.at("hover_position"));
  r.new_connection_ids = j.at("new_connection_ids").get<std::vector<int>>();
  r.converged = j.value("converged", false);
  r.episode_scores = j.value("episode_scores", std::vector<double>{});
  return r;
}

}  // namespace

std::string distance_model_name(DistanceModel m) {
  switch (m) {
    case DistanceModel::Slant: return "slant";
    case DistanceModel::Horizontal: return "horizontal";
    case DistanceModel::Softened: return "softened";
  }
  return "?";
}

DistanceModel parse_distance_model(const std::string& text) {
  if (text == "slant") return DistanceModel::Slant;
  if (text == "horizontal") return DistanceModel::Horizontal;
  if (text == "softened") return DistanceModel::Softened;
  throw ConfigError("unknown distance model '" + text + "'");
}

void apply_overrides(PipelineConfig& c, const Json& o) {
  Section top(o, "config");
  if (o.contains("arena")) {
    auto& a = c.arena;
    Section(o["arena"], "arena")
        .get("x_max", a.x_max)
        .get("y_max", a.y_max)
        .get("uav_altitude", a.uav_altitude)
        .get("detector_radius", a.detector_radius)
        .get("serving_radius", a.serving_radius)
        .get("min_uav_separation", a.min_uav_separation)
        .finish();
  }
  if (o.contains("task")) {
    auto& t = c.task;
    Section(o["task"], "task")
        .get("size_bits", t.size_bits)
        .get("cycles_per_bit", t.cycles_per_bit)
        .get("arrival_rate", t.arrival_rate)
        .get("max_delay", t.max_delay)
        .finish();
  }
  if (o.contains("dispersion")) {
    Section(o["dispersion"], "dispersion")
        .get("sigma", c.dispersion.sigma)
        .get("cutoff", c.dispersion.cutoff)
        .finish();
  }
  if (o.contains("radio")) {
    auto& r = c.radio;
    std::string model = distance_model_name(r.distance_model);
    Section(o["radio"], "radio")
        .get("channel_power_gain", r.channel_power_gain)
        .get("data_rate", r.data_rate)
        .get("rssi_reward_scale", r.rssi_reward_scale)
        .get("distance_model", model)
        .get("min_horizontal_distance", r.min_horizontal_distance)
        .get("softening_length", r.softening_length)
        .finish();
    r.distance_model = parse_distance_model(model);
  }
  if (o.contains("serving")) {
    Section(o["serving"], "serving").get("capacity", c.serving.capacity).finish();
  }
  if (o.contains("train")) {
    auto& t = c.localization.train;
    Section(o["train"], "train")
        .get("learning_rate", t.learning_rate)
        .get("discount", t.discount)
        .get("epsilon_start", t.epsilon_start)
        .get("epsilon_decay", t.epsilon_decay)
        .get("epsilon_min", t.epsilon_min)
        .get("batch_size", t.batch_size)
        .get("replay_capacity", t.replay_capacity)
        .get("max_episodes", t.max_episodes)
        .get("plateau_window", t.plateau_window)
        .get("plateau_tolerance", t.plateau_tolerance)
        .get("max_grad_norm", t.max_grad_norm)
        .get("horizon_is_terminal", t.horizon_is_terminal)
        .get("keep_best_greedy", t.keep_best_greedy)
        .get("hidden_layers", t.hidden_layers)
        .finish();
  }
  if (o.contains("env")) {
    auto& e = c.localization.env;
    Section(o["env"], "env")
        .get("step_distance", e.step_distance)
        .get("episode_length", e.episode_length)
        .finish();
  }
  if (o.contains("localization")) {
    auto& l = c.localization;
    Section(o["localization"], "localization")
        .get("threshold", l.threshold)
        .get("iteration_cap", l.iteration_cap)
        .finish();
  }
  Json ignored;
  top.get("arena", ignored)
      .get("task", ignored)
      .get("dispersion", ignored)
      .get("radio", ignored)
      .get("serving", ignored)
      .get("train", ignored)
      .get("env", ignored)
      .get("localization", ignored)
      .get("duration", c.duration)
      .finish();
  c.localization.radio = c.radio;
  c.validate();
}

Json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

PipelineConfig load_pipeline_config(const std::filesystem::path& path) {
  PipelineConfig c;
  apply_overrides(c, read_json_file(path));
  return c;
}

Json to_json(const PipelineConfig& c) {
  const auto& t = c.localization.train;
  const auto& e = c.localization.env;
  return {
      {"arena",
       {{"x_max", c.arena.x_max},
        {"y_max", c.arena.y_max},
        {"uav_altitude", c.arena.uav_altitude},
        {"detector_radius", c.arena.detector_radius},
        {"serving_radius", c.arena.serving_radius},
        {"min_uav_separation", c.arena.min_uav_separation}}},
      {"task",
       {{"size_bits", c.task.size_bits},
        {"cycles_per_bit", c.task.cycles_per_bit},
        {"arrival_rate", c.task.arrival_rate},
        {"max_delay", c.task.max_delay}}},
      {"dispersion", {{"sigma", c.dispersion.sigma}, {"cutoff", c.dispersion.cutoff}}},
      {"radio",
       {{"channel_power_gain", c.radio.channel_power_gain},
        {"data_rate", c.radio.data_rate},
        {"rssi_reward_scale", c.radio.rssi_reward_scale},
        {"distance_model", distance_model_name(c.radio.distance_model)},
        {"min_horizontal_distance", c.radio.min_horizontal_distance},
        {"softening_length", c.radio.softening_length}}},
      {"serving", {{"capacity", c.serving.capacity}}},
      {"train",
       {{"learning_rate", t.learning_rate},
        {"discount", t.discount},
        {"epsilon_start", t.epsilon_start},
        {"epsilon_decay", t.epsilon_decay},
        {"epsilon_min", t.epsilon_min},
        {"batch_size", t.batch_size},
        {"replay_capacity", t.replay_capacity},
        {"max_episodes", t.max_episodes},
        {"plateau_window", t.plateau_window},
        {"plateau_tolerance", t.plateau_tolerance},
        {"max_grad_norm", t.max_grad_norm},
        {"horizon_is_terminal", t.horizon_is_terminal},
        {"keep_best_greedy", t.keep_best_greedy},
        {"hidden_layers", t.hidden_layers}}},
      {"env", {{"step_distance", e.step_distance}, {"episode_length", e.episode_length}}},
      {"localization",
       {{"threshold", c.localization.threshold}, {"iteration_cap", c.localization.iteration_cap}}},
      {"duration", c.duration}};
}

Json to_json(const LocalizationResult& result) {
  Json reports = Json::array();
  for (const auto& r : result.reports) reports.push_back(report_json(r));
  Json j = {{"total_connected", result.total_connected}, {"reports", reports}};
  j["rejected"] = result.rejected ? report_json(*result.rejected) : Json(nullptr);
  return j;
}

LocalizationResult localization_from_json(const Json& j) {
  try {
    LocalizationResult r;
    for (const auto& rep : j.at("reports")) r.reports.push_back(report_from(rep));
    r.total_connected = j.at("total_connected").get<int>();
    if (j.contains("rejected") && !j["rejected"].is_null()) r.rejected = report_from(j["rejected"]);
    return r;
  } catch (const Json::exception& e) {
    throw ConfigError(std::string("malformed localization result: ") + e.what());
  }
}

Json to_json(const DeploymentPlan& plan) {
  Json uavs = Json::array();
  for (const auto& u : plan.uavs)
    uavs.push_back({{"id", u.id}, {"area_id", u.area_id}, {"position", point(u.position)}, {"user_ids", u.user_ids}});
  return {{"granted", plan.granted}, {"uavs", uavs}};
}

DeploymentPlan plan_from_json(const Json& j) {
  try {
    DeploymentPlan p;
    p.granted = j.at("granted").get<std::vector<int>>();
    for (const auto& u : j.at("uavs")) {
      ServingUav s;
      s.id = u.at("id").get<int>();
      s.area_id = u.at("area_id").get<int>();
      s.position = point3(u.at("position"));
      s.user_ids = u.at("user_ids").get<std::vector<int>>();
      p.uavs.push_back(std::move(s));
    }
    return p;
  } catch (const Json::exception& e) {
    throw ConfigError(std::string("malformed deployment plan: ") + e.what());
  }
}

Json to_json(const RunMetrics& m) {
  Json areas = Json::object();
  for (const auto& [id, a] : m.per_area)
    areas[std::to_string(id)] = {{"generated", a.generated}, {"succeeded", a.succeeded}};
  return {{"generated", m.generated},
          {"succeeded", m.succeeded},
          {"success_rate", m.success_rate},
          {"offloaded", m.offloaded},
          {"mean_sojourn", m.mean_sojourn},
          {"mean_total_delay", m.mean_total_delay},
          {"per_area", areas}};
}

}  // namespace deepair
