#pragma once

#include <cstdint>
#include <optional>
#include <span>

#include "coss/estimation.hpp"
#include "coss/units.hpp"

namespace coss {

enum class TestFamily { TTestIndependent, TTestPaired, BootstrapIndependent, BootstrapPaired };

inline const char* to_string(TestFamily f) {
    switch (f) {
        case TestFamily::TTestIndependent: return "t-independent";
        case TestFamily::TTestPaired: return "t-paired";
        case TestFamily::BootstrapIndependent: return "bootstrap-independent";
        case TestFamily::BootstrapPaired: return "bootstrap-paired";
    }
    return "?";
}

struct InferenceResult {
    double statistic = 0.0;  ///< t statistic, or the observed delta for bootstrap tests
    double p_value = 1.0;    ///< two-sided
    std::optional<double> df;
    TestFamily family = TestFamily::TTestIndependent;
    std::size_t n_resamples = 0;  ///< bootstrap only
};

/// Welch two-sample t-test (unequal variances, Welch-Satterthwaite df).
InferenceResult t_test_independent(std::span<const double> treatment,
                                   std::span<const double> control);

/// One-sample t-test on within-pair differences; df = n_pairs - 1. Constant
/// differences are a ZeroVarianceError, not a silent p = 1.
InferenceResult t_test_paired(std::span<const double> treatment,
                              std::span<const double> control);

/// Percentile bootstrap p-value for the difference in means. Pairs are the
/// resampling atoms when `paired` (COSS plans); arms resample independently
/// otherwise. Two-sided with the finite-sample correction:
///   p = min(1, 2 min[(1+#{d*<=0})/(B+1), (1+#{d*>=0})/(B+1)]).
/// Resample k draws from child stream k of `seed`, so the result is
/// independent of evaluation order.
InferenceResult bootstrap_p(const AllocationPlan& plan, const ValueMap& outcomes, bool paired,
                            std::size_t n_resamples, std::uint64_t seed);

/// Sample variance of an estimator's delta over bootstrap resamples. COSS
/// plans resample pairs as atoms (the unpaired tail unit of an odd input is
/// excluded); RCT plans resample each arm independently. CUPED refits theta
/// on every resample.
double bootstrap_variance(const AllocationPlan& plan, const ValueMap& covariates,
                          const ValueMap& outcomes, EstimatorMethod method,
                          std::size_t n_resamples, std::uint64_t seed);

/// Two-sided p-value from the Student t distribution.
double student_t_two_sided_p(double statistic, double df);

}  // namespace coss
