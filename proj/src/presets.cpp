#include "coss/presets.hpp"

#include <cmath>
#include <cstdio>

#include "coss/errors.hpp"

namespace coss {
namespace {

SimulationConfig base_config() {
    SimulationConfig cfg;  // defaults already carry a=1, b=2, c=1, mu=1, eps 1/3
    cfg.covariate = CovariateDistribution::uniform(-6.0, 4.0);
    cfg.population = 10000;
    cfg.sample_size = 200;
    cfg.replications = 5000;
    cfg.seed = kDefaultSeed;
    cfg.coss_treat_first = false;
    return cfg;
}

std::string band_text(double lo, double hi) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "[%.4g, %.4g]", lo, hi);
    return buf;
}

ReferenceCheck in_band(const std::string& label, double observed, double lo, double hi) {
    return {label, observed, band_text(lo, hi), observed >= lo && observed <= hi};
}

ReferenceCheck within_rel(const std::string& label, double observed, double target,
                          double rel_tol) {
    return in_band(label, observed, target * (1.0 - rel_tol), target * (1.0 + rel_tol));
}

ReferenceCheck at_most(const std::string& label, double observed, double limit) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "<= %.4g", limit);
    return {label, observed, buf, observed <= limit};
}

double se_of(const StudyResult& r, StudyMethod m) {
    const auto it = r.find(m);
    if (it == r.end() || !it->second.se) {
        throw InvalidParameterError("reference checks need RCT, CUPED and COSS runs with >= 2 "
                                    "replications");
    }
    return *it->second.se;
}

double mean_of(const StudyResult& r, StudyMethod m) {
    const auto it = r.find(m);
    if (it == r.end()) {
        throw InvalidParameterError("reference checks need RCT, CUPED and COSS runs");
    }
    return it->second.mean;
}

}  // namespace

std::vector<std::string> preset_names() {
    return {"linear.paper", "quadratic.paper", "quadratic.b0", "aa.default"};
}

bool is_preset(const std::string& name) {
    for (const std::string& n : preset_names()) {
        if (n == name) return true;
    }
    return false;
}

SimulationConfig preset_config(const std::string& name) {
    if (name == "linear.paper") {
        SimulationConfig cfg = base_config();
        cfg.relationship = Relationship::Linear;
        return cfg;
    }
    if (name == "quadratic.paper") {
        // Covariate centred on the parabola's vertex (-b/2a = -1): the regime
        // where the covariate-outcome correlation vanishes and only the
        // ordered design, not a linear adjustment, can remove variance.
        SimulationConfig cfg = base_config();
        cfg.relationship = Relationship::Quadratic;
        return cfg;
    }
    if (name == "quadratic.b0") {
        // Pure-quadratic variant: with b = 0 and a covariate symmetric about
        // the vertex, corr(x, y) is exactly zero whatever the spread, so a
        // normal covariate exercises the same regime with a different shape.
        SimulationConfig cfg = base_config();
        cfg.relationship = Relationship::Quadratic;
        cfg.b = 0.0;
        cfg.covariate = CovariateDistribution::normal(0.0, 3.0);
        return cfg;
    }
    if (name == "aa.default") {
        SimulationConfig cfg = base_config();
        cfg.relationship = Relationship::Linear;
        cfg.mu = 0.0;
        cfg.eps0 = 3.0;
        cfg.eps1 = 3.0;
        cfg.sample_size = 400;
        cfg.replications = 2000;
        return cfg;
    }
    throw ConfigError("unknown preset '" + name + "'");
}

std::vector<ReferenceCheck> reference_checks(const std::string& preset_name,
                                             const StudyResult& result) {
    std::vector<ReferenceCheck> checks;
    if (preset_name == "linear.paper") {
        checks.push_back(within_rel("se(RCT) ~ 0.874", se_of(result, StudyMethod::Rct), 0.874, 0.10));
        checks.push_back(
            within_rel("se(CUPED) ~ 0.313", se_of(result, StudyMethod::Cuped), 0.313, 0.10));
        checks.push_back(
            within_rel("se(COSS) ~ 0.318", se_of(result, StudyMethod::Coss), 0.318, 0.10));
        checks.push_back(in_band("mean(RCT)", mean_of(result, StudyMethod::Rct), 0.95, 1.05));
        checks.push_back(in_band("mean(CUPED)", mean_of(result, StudyMethod::Cuped), 0.95, 1.05));
        checks.push_back(in_band("mean(COSS)", mean_of(result, StudyMethod::Coss), 0.88, 1.05));
    } else if (preset_name == "quadratic.paper") {
        checks.push_back(
            within_rel("se(COSS) ~ 0.318", se_of(result, StudyMethod::Coss), 0.318, 0.15));
        checks.push_back(in_band("se(CUPED)/se(RCT)",
                                 se_of(result, StudyMethod::Cuped) / se_of(result, StudyMethod::Rct),
                                 0.90, 1.05));
        checks.push_back(
            in_band("mean(COSS)", mean_of(result, StudyMethod::Coss), 1.002 - 0.05, 1.002 + 0.05));
    } else if (preset_name == "quadratic.b0") {
        checks.push_back(in_band("se(CUPED)/se(RCT)",
                                 se_of(result, StudyMethod::Cuped) / se_of(result, StudyMethod::Rct),
                                 0.95, 1.05));
        checks.push_back(at_most("se(COSS)/se(RCT)",
                                 se_of(result, StudyMethod::Coss) / se_of(result, StudyMethod::Rct),
                                 0.60));
    }
    return checks;
}

bool all_pass(const std::vector<ReferenceCheck>& checks) {
    for (const ReferenceCheck& c : checks) {
        if (!c.pass) return false;
    }
    return true;
}

}  // namespace coss
