#pragma once

#include "vborder/eval.hpp"

#include <filesystem>
#include <vector>

namespace vborder {

/// Experiment description read from a suite file.
struct Suite
{
    std::vector<ExperimentScenario> scenarios;
    ExperimentConfig config;
};

/* Paths inside the suite are resolved against the suite file's directory.
 * Throws ParseError and ValueError. */
Suite load_suite(const std::filesystem::path& path);

Suite suite_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir);

void apply_json(const nlohmann::json& j, GeneratorConfig& config);

} // namespace vborder
