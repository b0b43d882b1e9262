#include "doctest.h"

#include "deepair/io.hpp"

using namespace deepair;

TEST_CASE("overrides touch only the given keys") {
  PipelineConfig c;
  apply_overrides(c, Json::parse(R"({"task": {"arrival_rate": 0.5}, "train": {"learning_rate": 0.0005},
                                     "radio": {"distance_model": "slant", "rssi_reward_scale": 1e9},
                                     "duration": 50})"));
  CHECK(c.task.arrival_rate == 0.5);
  CHECK(c.task.size_bits == 5e5);
  CHECK(c.localization.train.learning_rate == 0.0005);
  CHECK(c.localization.train.discount == 0.99);
  CHECK(c.radio.distance_model == DistanceModel::Slant);
  CHECK(c.localization.radio.rssi_reward_scale == 1e9);
  CHECK(c.duration == 50);
}

TEST_CASE("bad overrides are config errors") {
  PipelineConfig c;
  CHECK_THROWS_AS(apply_overrides(c, Json::parse(R"({"task": {"arival_rate": 1}})")), ConfigError);
  CHECK_THROWS_AS(apply_overrides(c, Json::parse(R"({"tasks": {}})")), ConfigError);
  CHECK_THROWS_AS(apply_overrides(c, Json::parse(R"({"task": {"arrival_rate": "fast"}})")), ConfigError);
  CHECK_THROWS_AS(apply_overrides(c, Json::parse(R"({"task": {"arrival_rate": -1}})")), ConfigError);
  CHECK_THROWS_AS(apply_overrides(c, Json::parse(R"({"radio": {"distance_model": "3d"}})")), ConfigError);
  CHECK_THROWS_AS(load_pipeline_config("/nonexistent/config.json"), IoError);
}

TEST_CASE("config json round trip") {
  PipelineConfig c;
  c.arena.x_max = 800;
  c.localization.train.hidden_layers = {32, 32};
  c.localization.threshold = 2;
  const Json j = to_json(c);
  PipelineConfig d;
  apply_overrides(d, j);
  CHECK(to_json(d) == j);
  CHECK(d.arena.x_max == 800);
  CHECK(d.localization.train.hidden_layers == std::vector<int>{32, 32});
}

TEST_CASE("localization result round trip") {
  LocalizationResult r;
  DetectorReport a;
  a.detector_id = 0;
  a.hover_position = {125, 75, 200};
  a.new_connection_ids = {1, 4, 9};
  a.episode_scores = {1.5, 2.25};
  a.converged = true;
  r.reports.push_back(a);
  r.total_connected = 3;
  DetectorReport rej;
  rej.detector_id = 1;
  r.rejected = rej;
  const LocalizationResult back = localization_from_json(Json::parse(to_json(r).dump()));
  REQUIRE(back.reports.size() == 1);
  CHECK(back.reports[0].hover_position == a.hover_position);
  CHECK(back.reports[0].new_connection_ids == a.new_connection_ids);
  CHECK(back.reports[0].episode_scores == a.episode_scores);
  CHECK(back.reports[0].converged);
  CHECK(back.total_connected == 3);
  REQUIRE(back.rejected.has_value());
  CHECK(back.rejected->detector_id == 1);
  CHECK_THROWS_AS(localization_from_json(Json::parse("{}")), ConfigError);
}

TEST_CASE("plan round trip") {
  DeploymentPlan p;
  p.granted = {2, 0};
  p.uavs.push_back({0, 0, {10, 20, 200}, {3, 4}});
  p.uavs.push_back({1, 0, {20, 20, 200}, {5}});
  const DeploymentPlan back = plan_from_json(Json::parse(to_json(p).dump()));
  CHECK(back.granted == p.granted);
  REQUIRE(back.uavs.size() == 2);
  CHECK(back.uavs[1].position == p.uavs[1].position);
  CHECK(back.uavs[0].user_ids == p.uavs[0].user_ids);
}

TEST_CASE("metrics json") {
  RunMetrics m;
  m.generated = 10;
  m.succeeded = 7;
  m.success_rate = 0.7;
  m.per_area[-1] = {3, 0};
  const Json j = to_json(m);
  CHECK(j["success_rate"] == 0.7);
  CHECK(j["per_area"]["-1"]["generated"] == 3);
}
