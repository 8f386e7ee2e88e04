#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include <json.hpp>

#include "glwalk/ensemble.hpp"

namespace glwalk {

// Experiment configuration: JSON with an ensemble block, a mandatory seed
// (no wall-clock default), and per-command blocks kept as raw JSON for the
// command handlers to validate. See README for the documented grammar.
struct ExperimentConfig {
    EnsembleSpec ensemble;
    std::uint64_t seed = 0;
    int workers = 1;
    std::string output_dir = "out";
    std::int64_t budget = 10'000'000'000LL; // max matrix-multiply count
    int burn_in = 200;
    double invariance_level = 0.05;
    nlohmann::json raw;

    static ExperimentConfig load(const std::filesystem::path& path);
    static ExperimentConfig from_json(const nlohmann::json& j);

    // Command block access; throws ConfigError when the block is missing.
    const nlohmann::json& block(const std::string& name) const;
};

EnsembleSpec ensemble_from_json(const nlohmann::json& j);

} // namespace glwalk
