#pragma once

#include <filesystem>
#include <string>

#include "json.hpp"

#include "deepair/allocation.hpp"
#include "deepair/harness.hpp"
#include "deepair/localization.hpp"
#include "deepair/mec_sim.hpp"

namespace deepair {

using Json = nlohmann::json;

/// Applies the keys present in `overrides` on top of `config`. Sections:
/// arena, task, dispersion, radio, serving, train, env, localization, plus a
/// top-level duration. Unknown keys throw ConfigError.
void apply_overrides(PipelineConfig& config, const Json& overrides);
PipelineConfig load_pipeline_config(const std::filesystem::path& path);
Json to_json(const PipelineConfig& config);

Json to_json(const LocalizationResult& result);
LocalizationResult localization_from_json(const Json& j);

Json to_json(const DeploymentPlan& plan);
DeploymentPlan plan_from_json(const Json& j);

Json to_json(const RunMetrics& metrics);

std::string distance_model_name(DistanceModel m);
DistanceModel parse_distance_model(const std::string& text);

Json read_json_file(const std::filesystem::path& path);

}  // namespace deepair
