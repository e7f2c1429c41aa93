#pragma once

#include <filesystem>
#include <string>

#include "coss/simgen.hpp"

namespace coss {

/// Load a SimulationConfig from a JSON file. Keys mirror the struct fields;
/// absent keys keep their defaults, unknown keys are rejected with the key
/// path in the message. Schema:
///   {
///     "relationship": "linear" | "quadratic",
///     "a": 1, "b": 2, "c": 1, "mu": 1, "eps0": 1, "eps1": 3,
///     "population": 10000, "sample_size": 200, "replications": 5000,
///     "seed": 42, "coss_treat_first": false,
///     "covariate": {"dist": "uniform", "lo": -6, "hi": 4}
///                | {"dist": "normal", "mean": 0, "sd": 1}
///   }
SimulationConfig load_config_json(const std::filesystem::path& path);

SimulationConfig parse_config_json(const std::string& text, const std::string& source_name);

std::string config_to_json(const SimulationConfig& config);

}  // namespace coss
