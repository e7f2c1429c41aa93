#include "coss/simgen.hpp"

#include <cmath>
#include <cstdio>

#include "coss/errors.hpp"

namespace coss {
namespace {

constexpr std::uint64_t kPopulationStream = 0x1909;
constexpr std::uint64_t kSampleStream = 0x5A3F;

std::string unit_id(std::size_t index) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "u%06zu", index);
    return buf;
}

}  // namespace

void CovariateDistribution::validate() const {
    if (kind == Kind::Uniform) {
        if (!(lo < hi)) throw ConfigError("covariate.lo must be < covariate.hi");
    } else {
        if (!(sd >= 0.0)) throw ConfigError("covariate.sd must be >= 0");
    }
}

void SimulationConfig::validate() const {
    if (population < 1) throw ConfigError("population must be >= 1");
    if (sample_size < 2) throw ConfigError("sample_size must be >= 2");
    if (sample_size > population) throw ConfigError("sample_size must be <= population");
    if (sample_size % 2 != 0) throw ConfigError("sample_size must be even");
    if (replications < 1) throw ConfigError("replications must be >= 1");
    if (!(eps0 >= 0.0)) throw ConfigError("eps0 must be >= 0");
    if (!(eps1 >= 0.0)) throw ConfigError("eps1 must be >= 0");
    if (!std::isfinite(a) || !std::isfinite(b) || !std::isfinite(c) || !std::isfinite(mu)) {
        throw ConfigError("a, b, c, mu must be finite");
    }
    covariate.validate();
}

std::vector<PopulationUnit> generate_population(const SimulationConfig& config) {
    config.validate();
    Rng rng(Rng::derive(config.seed, kPopulationStream));
    std::vector<PopulationUnit> pop;
    pop.reserve(config.population);
    const bool quadratic = config.relationship == Relationship::Quadratic;
    for (std::size_t i = 0; i < config.population; ++i) {
        PopulationUnit u;
        u.id = unit_id(i);
        u.x = config.covariate.sample(rng);
        const double base = (quadratic ? config.a * u.x * u.x : 0.0) + config.b * u.x + config.c;
        const double n0 = rng.next_normal();
        const double n1 = rng.next_normal();
        u.y0 = base + config.eps0 * n0;
        u.y1 = base + config.mu + config.eps1 * n1;
        pop.push_back(std::move(u));
    }
    return pop;
}

std::vector<PopulationUnit> draw_sample(const std::vector<PopulationUnit>& population,
                                        std::size_t sample_size, std::uint64_t seed) {
    if (sample_size > population.size()) {
        throw SampleTooLargeError("sample_size exceeds population size");
    }
    Rng rng(Rng::derive(seed, kSampleStream));
    const std::vector<std::size_t> idx = sample_indices(population.size(), sample_size, rng);
    std::vector<PopulationUnit> sample;
    sample.reserve(sample_size);
    for (const std::size_t i : idx) sample.push_back(population[i]);
    return sample;
}

std::vector<ExperimentUnit> to_experiment_units(const std::vector<PopulationUnit>& units) {
    std::vector<ExperimentUnit> out;
    out.reserve(units.size());
    for (const PopulationUnit& u : units) out.push_back({u.id, u.x, std::nullopt});
    return out;
}

ValueMap covariates_of(const std::vector<PopulationUnit>& units) {
    ValueMap covs;
    covs.reserve(units.size());
    for (const PopulationUnit& u : units) covs.emplace(u.id, u.x);
    return covs;
}

ValueMap reveal_outcomes(const AllocationPlan& plan, const std::vector<PopulationUnit>& units) {
    ValueMap revealed;
    revealed.reserve(units.size());
    for (const PopulationUnit& u : units) {
        const PlanEntry* entry = plan.find(u.id);
        if (entry == nullptr) continue;  // unit not in this plan
        revealed.emplace(u.id, entry->arm == Arm::Treatment ? u.y1 : u.y0);
    }
    return revealed;
}

}  // namespace coss
