#pragma once

#include <cstddef>
#include <cstdint>

namespace coss {

// Closed-form and Monte Carlo diagnostics for the bias and variance of the
// covariate-ordered design.
//
// Convention note: bias_rate, bias_bound_mc and variance_decomposition are
// stated for the half-sum effect estimator D = (sum_T Y - sum_C Y)/(2N). The
// mean-difference estimator used by the estimation module equals 2D, so its
// bias bound is twice bias_bound_mc and its variance four times the
// decomposition terms. Callers comparing against mean-difference empirics
// must apply that scaling (empirical_bias below already reports the
// mean-difference convention, matching the estimators).

enum class BiasDistribution { Uniform, Normal, ShiftedPoisson };

struct BiasRateSpec {
    BiasDistribution distribution = BiasDistribution::Uniform;
    std::size_t n_pairs = 0;
};

/// Asymptotic bias decay rate at N = n_pairs:
///   Uniform: 1/N, Normal: sqrt(2 ln N)/N, ShiftedPoisson: ln N/(N ln ln N).
/// Requires n_pairs >= 3 (ln ln N positive).
double bias_rate(const BiasRateSpec& spec);

/// Outcome model y = f_slope * x + f_intercept + noise with x ~ Normal(0,1):
/// the standardized setting of the diagnostics below.
struct DgpModel {
    double f_slope = 1.0;
    double f_intercept = 0.0;
    double noise_sd = 0.0;

    double f(double x) const { return f_slope * x + f_intercept; }
    double fx_variance() const { return f_slope * f_slope; }
    double outcome_variance() const { return fx_variance() + noise_sd * noise_sd; }
    double r_squared() const {
        const double vy = outcome_variance();
        return vy <= 0.0 ? 0.0 : fx_variance() / vy;
    }
};

struct MonteCarloEstimate {
    double value = 0.0;
    double std_error = 0.0;  ///< Monte Carlo standard error of `value`
};

/// Monte Carlo estimate of E[max f(X) over 2N draws]/N, the half-sum bias
/// bound. Requires reps >= 100.
MonteCarloEstimate bias_bound_mc(const DgpModel& model, std::size_t n_pairs, std::size_t reps,
                                 std::uint64_t seed);

/// Mean over `reps` fresh simulations (no treatment effect) of the
/// mean-difference delta of the covariate-ordered split: the design's
/// empirical bias, with its Monte Carlo standard error. Requires
/// reps >= 1000.
MonteCarloEstimate empirical_bias(const DgpModel& model, std::size_t n_pairs, std::size_t reps,
                                  std::uint64_t seed);

struct VarianceDecomposition {
    double leading_term = 0.0;     ///< Var(Y)(1 - r^2)/(2N)
    double pair_term_bound = 0.0;  ///< (Var f(X_(1)) + Var f(X_(2N)))/(4N^2), MC estimate
};

inline constexpr std::uint64_t kTheoryDefaultSeed = 20240;

VarianceDecomposition variance_decomposition(const DgpModel& model, std::size_t n_pairs,
                                             std::size_t reps = 4096,
                                             std::uint64_t seed = kTheoryDefaultSeed);

}  // namespace coss
