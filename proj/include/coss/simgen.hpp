#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "coss/estimation.hpp"
#include "coss/rng.hpp"
#include "coss/units.hpp"

namespace coss {

enum class Relationship { Linear, Quadratic };

inline const char* to_string(Relationship r) {
    return r == Relationship::Linear ? "linear" : "quadratic";
}

struct CovariateDistribution {
    enum class Kind { Uniform, Normal };
    Kind kind = Kind::Uniform;
    double lo = -6.0;    // Uniform bounds
    double hi = 4.0;
    double mean = 0.0;   // Normal parameters
    double sd = 1.0;

    static CovariateDistribution uniform(double lo, double hi) {
        CovariateDistribution d;
        d.kind = Kind::Uniform;
        d.lo = lo;
        d.hi = hi;
        return d;
    }
    static CovariateDistribution normal(double mean, double sd) {
        CovariateDistribution d;
        d.kind = Kind::Normal;
        d.mean = mean;
        d.sd = sd;
        return d;
    }

    double sample(Rng& rng) const {
        return kind == Kind::Uniform ? lo + (hi - lo) * rng.next_unit()
                                     : rng.next_normal(mean, sd);
    }
    void validate() const;
};

/// Data-generating process for the simulation studies.
///   Linear:    y0 = b x + c + N(0, eps0^2),        y1 = b x + c + mu + N(0, eps1^2)
///   Quadratic: y0 = a x^2 + b x + c + N(0, eps0^2), y1 adds mu likewise
/// eps0/eps1 are standard deviations; the y0 and y1 noise draws are
/// independent. The default covariate is the width-10 uniform centred on the
/// quadratic's vertex, the regime the bundled reference tables correspond to.
struct SimulationConfig {
    Relationship relationship = Relationship::Linear;
    double a = 1.0;
    double b = 2.0;
    double c = 1.0;
    double mu = 1.0;
    double eps0 = 1.0;
    double eps1 = 3.0;
    CovariateDistribution covariate{};
    std::size_t population = 10000;
    std::size_t sample_size = 200;
    std::size_t replications = 5000;
    std::uint64_t seed = kDefaultSeed;
    /// Parity handed to the COSS allocator. The reference tables were
    /// produced with the top-ranked unit in Control, hence the default.
    bool coss_treat_first = false;

    void validate() const;  ///< throws ConfigError naming the offending key
};

/// One population member with both potential outcomes.
struct PopulationUnit {
    std::string id;
    double x = 0.0;
    double y0 = 0.0;  ///< untreated outcome
    double y1 = 0.0;  ///< treated outcome
};

std::vector<PopulationUnit> generate_population(const SimulationConfig& config);

/// Uniform sample without replacement; deterministic given seed.
std::vector<PopulationUnit> draw_sample(const std::vector<PopulationUnit>& population,
                                        std::size_t sample_size, std::uint64_t seed);

std::vector<ExperimentUnit> to_experiment_units(const std::vector<PopulationUnit>& units);
ValueMap covariates_of(const std::vector<PopulationUnit>& units);

/// The revealed-outcome rule: Treatment units expose y1, Control units y0.
/// Estimators only ever see this map, never the counterfactual.
ValueMap reveal_outcomes(const AllocationPlan& plan, const std::vector<PopulationUnit>& units);

}  // namespace coss
