#include "coss/theory.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>
#include <vector>

#include "coss/errors.hpp"
#include "coss/rng.hpp"
#include "coss/stats.hpp"

namespace coss {

double bias_rate(const BiasRateSpec& spec) {
    if (spec.n_pairs < 3) throw NTooSmallError("bias_rate requires n_pairs >= 3");
    const double n = static_cast<double>(spec.n_pairs);
    switch (spec.distribution) {
        case BiasDistribution::Uniform:
            return 1.0 / n;
        case BiasDistribution::Normal:
            return std::sqrt(2.0 * std::log(n)) / n;
        case BiasDistribution::ShiftedPoisson:
            return std::log(n) / (n * std::log(std::log(n)));
    }
    throw InvalidParameterError("unknown bias distribution");
}

MonteCarloEstimate bias_bound_mc(const DgpModel& model, std::size_t n_pairs, std::size_t reps,
                                 std::uint64_t seed) {
    if (n_pairs < 1) throw InvalidParameterError("n_pairs must be >= 1");
    if (reps < 100) throw InvalidParameterError("bias_bound_mc requires reps >= 100");
    const std::size_t draws = 2 * n_pairs;
    RunningMoments acc;
    for (std::size_t r = 0; r < reps; ++r) {
        Rng rng(Rng::derive(seed, r));
        double max_f = -std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < draws; ++i) {
            max_f = std::max(max_f, model.f(rng.next_normal()));
        }
        acc.add(max_f / static_cast<double>(n_pairs));
    }
    return {acc.mean(), acc.std_error_of_mean()};
}

MonteCarloEstimate empirical_bias(const DgpModel& model, std::size_t n_pairs, std::size_t reps,
                                  std::uint64_t seed) {
    if (n_pairs < 1) throw InvalidParameterError("n_pairs must be >= 1");
    if (reps < 1000) throw InvalidParameterError("empirical_bias requires reps >= 1000");
    const std::size_t draws = 2 * n_pairs;
    std::vector<std::pair<double, double>> xy(draws);  // (x, y)
    RunningMoments acc;
    for (std::size_t r = 0; r < reps; ++r) {
        Rng rng(Rng::derive(seed, r));
        for (auto& [x, y] : xy) {
            x = rng.next_normal();
            y = model.f(x) + model.noise_sd * rng.next_normal();
        }
        std::sort(xy.begin(), xy.end(),
                  [](const auto& a, const auto& b) { return a.first > b.first; });
        double even_sum = 0.0, odd_sum = 0.0;
        for (std::size_t i = 0; i < draws; ++i) {
            (i % 2 == 0 ? even_sum : odd_sum) += xy[i].second;
        }
        // Mean-difference delta of the alternating split; zero true effect.
        acc.add((even_sum - odd_sum) / static_cast<double>(n_pairs));
    }
    return {acc.mean(), acc.std_error_of_mean()};
}

VarianceDecomposition variance_decomposition(const DgpModel& model, std::size_t n_pairs,
                                             std::size_t reps, std::uint64_t seed) {
    if (n_pairs < 2) throw InvalidParameterError("n_pairs must be >= 2");
    if (reps < 100) throw InvalidParameterError("variance_decomposition requires reps >= 100");
    const double n = static_cast<double>(n_pairs);
    const std::size_t draws = 2 * n_pairs;

    RunningMoments f_of_max, f_of_min;
    for (std::size_t r = 0; r < reps; ++r) {
        Rng rng(Rng::derive(seed, r));
        double lo = std::numeric_limits<double>::infinity();
        double hi = -std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < draws; ++i) {
            const double x = rng.next_normal();
            lo = std::min(lo, x);
            hi = std::max(hi, x);
        }
        f_of_max.add(model.f(hi));
        f_of_min.add(model.f(lo));
    }

    VarianceDecomposition out;
    out.leading_term = model.outcome_variance() * (1.0 - model.r_squared()) / (2.0 * n);
    out.pair_term_bound =
        (f_of_max.sample_variance() + f_of_min.sample_variance()) / (4.0 * n * n);
    return out;
}

}  // namespace coss
