// JSON configuration files. Every section patches the reference defaults:
// keys that are absent keep their default, unknown keys are rejected.
// Schema: docs/config.md.

#pragma once

#include <filesystem>
#include <stdexcept>

#include <json.hpp>

#include "contactnav/benchmark.hpp"

namespace contactnav {

class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

void apply_json(ArmModel& arm, const nlohmann::json& j);
void apply_json(GridSpec& spec, const nlohmann::json& j);
void apply_json(DynParams& dyn, const nlohmann::json& j);
void apply_json(CpfParams& cpf, const nlohmann::json& j);
void apply_json(PredictorConfig& pred, const nlohmann::json& j);
void apply_json(CostModel& cm, const nlohmann::json& j);
void apply_json(SceneParams& sp, const nlohmann::json& j);
void apply_json(ScenarioTemplate& t, const nlohmann::json& j);

Variant variant_from_json(const nlohmann::json& j);

/// Scenario file for the `episode` command: {"domain": ..., <template keys>,
/// "world": {"file": path} | {"empty": true} | {"seed": n}}. Scenes are
/// generated from the episode seed unless the world section pins one.
Scenario scenario_from_json(const nlohmann::json& j, std::uint64_t seed, const std::filesystem::path& base_dir = {});

BenchmarkConfig benchmark_from_json(const nlohmann::json& j);

nlohmann::json load_json(const std::filesystem::path& path);

}  // namespace contactnav
