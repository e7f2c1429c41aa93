#pragma once

#include <string>
#include <vector>

#include "coss/harness.hpp"

namespace coss {

/// Bundled simulation scenarios:
///   linear.paper    - linear DGP, reference Table-1-style expectations
///   quadratic.paper - quadratic DGP at the same coefficients
///   quadratic.b0    - quadratic with b = 0 (zero covariate-outcome
///                     correlation regime)
///   aa.default      - no-effect configuration for type-1-error runs
std::vector<std::string> preset_names();
bool is_preset(const std::string& name);
SimulationConfig preset_config(const std::string& name);  ///< ConfigError if unknown

struct ReferenceCheck {
    std::string label;
    double observed = 0.0;
    std::string expected;  ///< human-readable band, e.g. "[0.787, 0.961]"
    bool pass = false;
};

/// Compare a study result against the preset's bundled reference tolerances.
/// Empty for presets without reference values (aa.default).
std::vector<ReferenceCheck> reference_checks(const std::string& preset_name,
                                             const StudyResult& result);

bool all_pass(const std::vector<ReferenceCheck>& checks);

}  // namespace coss
