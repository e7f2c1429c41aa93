#include "coss/estimation.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>

#include "coss/errors.hpp"
#include "coss/stats.hpp"

namespace coss {
namespace {

double outcome_of(const ValueMap& outcomes, const std::string& id) {
    const auto it = outcomes.find(id);
    if (it == outcomes.end()) throw MissingOutcomeError("missing outcome for unit '" + id + "'");
    return it->second;
}

double covariate_of(const ValueMap& covariates, const std::string& id) {
    const auto it = covariates.find(id);
    if (it == covariates.end()) {
        throw MissingCovariateError("missing covariate for unit '" + id + "'");
    }
    return it->second;
}

}  // namespace

ArmValues arm_outcomes(const AllocationPlan& plan, const ValueMap& outcomes) {
    ArmValues arms;
    arms.treatment.reserve(plan.n_treatment());
    arms.control.reserve(plan.n_control());
    for (const PlanEntry& e : plan.entries()) {
        const double y = outcome_of(outcomes, e.id);
        (e.arm == Arm::Treatment ? arms.treatment : arms.control).push_back(y);
    }
    return arms;
}

PairedValues paired_outcomes(const AllocationPlan& plan, const ValueMap& outcomes) {
    const std::size_t n_pairs = plan.n_pairs();
    PairedValues pairs;
    pairs.treatment.assign(n_pairs, 0.0);
    pairs.control.assign(n_pairs, 0.0);
    std::vector<int> treat_seen(n_pairs, 0), control_seen(n_pairs, 0);
    for (const PlanEntry& e : plan.entries()) {
        if (!e.pair_index) continue;
        if (*e.pair_index >= n_pairs) {
            throw InvalidParameterError("pair_index " + std::to_string(*e.pair_index) +
                                        " out of range (incomplete pairs)");
        }
        const double y = outcome_of(outcomes, e.id);
        if (e.arm == Arm::Treatment) {
            pairs.treatment[*e.pair_index] = y;
            ++treat_seen[*e.pair_index];
        } else {
            pairs.control[*e.pair_index] = y;
            ++control_seen[*e.pair_index];
        }
    }
    for (std::size_t i = 0; i < n_pairs; ++i) {
        if (treat_seen[i] != 1 || control_seen[i] != 1) {
            throw InvalidParameterError("pair " + std::to_string(i) +
                                        " does not have one Treatment and one Control member");
        }
    }
    return pairs;
}

EffectEstimate diff_means(const AllocationPlan& plan, const ValueMap& outcomes) {
    const ArmValues arms = arm_outcomes(plan, outcomes);
    if (arms.treatment.empty() || arms.control.empty()) {
        throw EmptyArmError("both arms must be non-empty");
    }
    EffectEstimate est;
    est.method = EstimatorMethod::DiffMeans;
    est.n_treat = arms.treatment.size();
    est.n_control = arms.control.size();
    est.delta = mean(arms.treatment) - mean(arms.control);
    est.se = std::sqrt(sample_variance(arms.treatment) / static_cast<double>(est.n_treat) +
                       sample_variance(arms.control) / static_cast<double>(est.n_control));
    return est;
}

CupedAdjustment fit_cuped(const ValueMap& covariates, const ValueMap& outcomes) {
    // Intersection of the two maps in sorted-id order, so the fit is
    // independent of hash-map iteration order.
    std::vector<std::string> ids;
    ids.reserve(covariates.size());
    for (const auto& [id, x] : covariates) {
        (void)x;
        if (outcomes.count(id) != 0) ids.push_back(id);
    }
    std::sort(ids.begin(), ids.end());
    if (ids.size() < 3) throw TooFewUnitsError("fit_cuped needs at least 3 units");

    std::vector<double> xs, ys;
    xs.reserve(ids.size());
    ys.reserve(ids.size());
    for (const std::string& id : ids) {
        xs.push_back(covariates.at(id));
        ys.push_back(outcomes.at(id));
    }
    const double var_x = sample_variance(xs);
    const double mean_x = mean(xs);
    if (variance_is_degenerate(var_x, mean_x)) {
        throw DegenerateCovariateError("covariate is constant; cannot fit theta");
    }
    const double cov_xy = sample_covariance(xs, ys);
    const double var_y = sample_variance(ys);

    CupedAdjustment adj;
    adj.theta = cov_xy / var_x;
    adj.covariate_mean = mean_x;
    adj.r_squared = variance_is_degenerate(var_y, mean(ys))
                        ? 0.0
                        : (cov_xy * cov_xy) / (var_x * var_y);
    return adj;
}

ValueMap cuped_adjusted_outcomes(const AllocationPlan& plan, const ValueMap& covariates,
                                 const ValueMap& outcomes, const CupedAdjustment& adj) {
    ValueMap adjusted;
    adjusted.reserve(plan.size());
    for (const PlanEntry& e : plan.entries()) {
        const double y = outcome_of(outcomes, e.id);
        const double x = covariate_of(covariates, e.id);
        adjusted.emplace(e.id, y - adj.theta * (x - adj.covariate_mean));
    }
    return adjusted;
}

EffectEstimate cuped_estimate(const AllocationPlan& plan, const ValueMap& covariates,
                              const ValueMap& outcomes, const CupedAdjustment& adj) {
    EffectEstimate est = diff_means(plan, cuped_adjusted_outcomes(plan, covariates, outcomes, adj));
    est.method = EstimatorMethod::Cuped;
    return est;
}

EffectEstimate regression_adjust(const AllocationPlan& plan, const ValueMap& covariates,
                                 const ValueMap& outcomes) {
    const std::size_t n = plan.size();
    if (n < 4) throw TooFewUnitsError("regression_adjust needs at least 4 units");

    // Accumulate the 3x3 normal equations for [1, treated, x].
    Eigen::Matrix3d xtx = Eigen::Matrix3d::Zero();
    Eigen::Vector3d xty = Eigen::Vector3d::Zero();
    std::size_t n_treat = 0;
    for (const PlanEntry& e : plan.entries()) {
        const double y = outcome_of(outcomes, e.id);
        const double x = covariate_of(covariates, e.id);
        const double t = e.arm == Arm::Treatment ? 1.0 : 0.0;
        n_treat += e.arm == Arm::Treatment ? 1 : 0;
        const Eigen::Vector3d row(1.0, t, x);
        xtx += row * row.transpose();
        xty += row * y;
    }
    if (n_treat == 0 || n_treat == n) throw EmptyArmError("both arms must be non-empty");

    Eigen::FullPivLU<Eigen::Matrix3d> lu(xtx);
    if (!lu.isInvertible()) {
        throw DegenerateDesignError("singular design matrix (constant covariate?)");
    }
    const Eigen::Vector3d beta = lu.solve(xty);

    double rss = 0.0;
    for (const PlanEntry& e : plan.entries()) {
        const double y = outcomes.at(e.id);
        const double x = covariates.at(e.id);
        const double t = e.arm == Arm::Treatment ? 1.0 : 0.0;
        const double r = y - (beta(0) + beta(1) * t + beta(2) * x);
        rss += r * r;
    }
    const double sigma2 = std::max(0.0, rss / static_cast<double>(n - 3));
    const Eigen::Matrix3d xtx_inv = lu.inverse();

    EffectEstimate est;
    est.method = EstimatorMethod::RegressionAdj;
    est.n_treat = n_treat;
    est.n_control = n - n_treat;
    est.delta = beta(1);
    est.se = std::sqrt(std::max(0.0, sigma2 * xtx_inv(1, 1)));
    return est;
}

RegressionFit fit_line(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw InvalidParameterError("fit_line: size mismatch");
    if (x.size() < 2) throw TooFewUnitsError("fit_line needs at least 2 points");
    const double var_x = sample_variance(x);
    if (variance_is_degenerate(var_x, mean(x))) {
        throw DegenerateCovariateError("fit_line: x is constant");
    }
    RegressionFit fit;
    fit.beta1 = sample_covariance(x, y) / var_x;
    fit.beta0 = mean(y) - fit.beta1 * mean(x);
    double rss = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double r = y[i] - (fit.beta0 + fit.beta1 * x[i]);
        rss += r * r;
    }
    fit.residual_variance = x.size() > 2 ? rss / static_cast<double>(x.size() - 2) : 0.0;
    return fit;
}

}  // namespace coss
