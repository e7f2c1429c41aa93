#pragma once

#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "coss/units.hpp"

namespace coss {

using ValueMap = std::unordered_map<std::string, double>;

enum class EstimatorMethod { DiffMeans, Cuped, RegressionAdj };

inline const char* to_string(EstimatorMethod m) {
    switch (m) {
        case EstimatorMethod::DiffMeans: return "diff-means";
        case EstimatorMethod::Cuped: return "cuped";
        case EstimatorMethod::RegressionAdj: return "regression";
    }
    return "?";
}

struct EffectEstimate {
    double delta = 0.0;
    double se = 0.0;
    EstimatorMethod method = EstimatorMethod::DiffMeans;
    std::size_t n_treat = 0;
    std::size_t n_control = 0;
};

struct CupedAdjustment {
    double theta = 0.0;           ///< cov(X,Y)/var(X) on the fitting set
    double covariate_mean = 0.0;  ///< pooled sample mean of X
    double r_squared = 0.0;       ///< squared covariate-outcome correlation
};

/// Ordinary least squares line y = beta0 + beta1 x.
struct RegressionFit {
    double beta0 = 0.0;
    double beta1 = 0.0;
    double residual_variance = 0.0;  ///< RSS / (n - 2), 0 when n <= 2
};

/// Outcome values of both arms, in plan-entry order.
struct ArmValues {
    std::vector<double> treatment;
    std::vector<double> control;
};

/// Paired outcome values in pair_index order (COSS plans; unpaired units are
/// skipped). treatment[i] and control[i] belong to pair i.
struct PairedValues {
    std::vector<double> treatment;
    std::vector<double> control;
};

ArmValues arm_outcomes(const AllocationPlan& plan, const ValueMap& outcomes);
PairedValues paired_outcomes(const AllocationPlan& plan, const ValueMap& outcomes);

/// delta = mean(Y | Treatment) - mean(Y | Control); se combines the unpooled
/// (Welch-style) arm variances.
EffectEstimate diff_means(const AllocationPlan& plan, const ValueMap& outcomes);

/// Variance-minimising theta = cov(X,Y)/var(X), fitted pooled over every unit
/// present in both maps. Requires at least 3 units and non-constant X.
CupedAdjustment fit_cuped(const ValueMap& covariates, const ValueMap& outcomes);

/// Y' = Y - theta (X - E[X]) applied to every assigned unit.
ValueMap cuped_adjusted_outcomes(const AllocationPlan& plan, const ValueMap& covariates,
                                 const ValueMap& outcomes, const CupedAdjustment& adj);

/// diff_means on CUPED-adjusted outcomes.
EffectEstimate cuped_estimate(const AllocationPlan& plan, const ValueMap& covariates,
                              const ValueMap& outcomes, const CupedAdjustment& adj);

/// OLS of Y on [1, treatment indicator, X]; delta is the indicator
/// coefficient, se its conventional OLS standard error.
EffectEstimate regression_adjust(const AllocationPlan& plan, const ValueMap& covariates,
                                 const ValueMap& outcomes);

RegressionFit fit_line(std::span<const double> x, std::span<const double> y);

}  // namespace coss
