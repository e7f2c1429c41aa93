#include "coss/inference.hpp"

#include <boost/math/distributions/students_t.hpp>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "coss/errors.hpp"
#include "coss/rng.hpp"
#include "coss/stats.hpp"

namespace coss {
namespace {

constexpr std::uint64_t kBootstrapStream = 0xB007;

struct Obs {
    Arm arm;
    double x;
    double y;
};

// Plan-ordered observations; covariates optional (only pulled when needed).
std::vector<Obs> collect_observations(const AllocationPlan& plan, const ValueMap& covariates,
                                      const ValueMap& outcomes, bool need_covariates) {
    std::vector<Obs> obs;
    obs.reserve(plan.size());
    for (const PlanEntry& e : plan.entries()) {
        const auto yit = outcomes.find(e.id);
        if (yit == outcomes.end()) {
            throw MissingOutcomeError("missing outcome for unit '" + e.id + "'");
        }
        double x = 0.0;
        if (need_covariates) {
            const auto xit = covariates.find(e.id);
            if (xit == covariates.end()) {
                throw MissingCovariateError("missing covariate for unit '" + e.id + "'");
            }
            x = xit->second;
        }
        obs.push_back({e.arm, x, yit->second});
    }
    return obs;
}

double delta_of(EstimatorMethod method, std::span<const Obs> obs) {
    switch (method) {
        case EstimatorMethod::DiffMeans: {
            double st = 0.0, sc = 0.0;
            std::size_t nt = 0, nc = 0;
            for (const Obs& o : obs) {
                if (o.arm == Arm::Treatment) { st += o.y; ++nt; }
                else { sc += o.y; ++nc; }
            }
            if (nt == 0 || nc == 0) throw EmptyArmError("resample produced an empty arm");
            return st / static_cast<double>(nt) - sc / static_cast<double>(nc);
        }
        case EstimatorMethod::Cuped: {
            std::vector<double> xs, ys;
            xs.reserve(obs.size());
            ys.reserve(obs.size());
            for (const Obs& o : obs) { xs.push_back(o.x); ys.push_back(o.y); }
            const double var_x = sample_variance(xs);
            if (variance_is_degenerate(var_x, mean(xs))) {
                throw DegenerateCovariateError("constant covariate in resample");
            }
            const double theta = sample_covariance(xs, ys) / var_x;
            const double mx = mean(xs);
            double st = 0.0, sc = 0.0;
            std::size_t nt = 0, nc = 0;
            for (const Obs& o : obs) {
                const double adj = o.y - theta * (o.x - mx);
                if (o.arm == Arm::Treatment) { st += adj; ++nt; }
                else { sc += adj; ++nc; }
            }
            if (nt == 0 || nc == 0) throw EmptyArmError("resample produced an empty arm");
            return st / static_cast<double>(nt) - sc / static_cast<double>(nc);
        }
        case EstimatorMethod::RegressionAdj: {
            // Normal equations for [1, treated, x], solved by Cramer's rule.
            double n = 0, st = 0, sx = 0, stt = 0, stx = 0, sxx = 0;
            double sy = 0, sty = 0, sxy = 0;
            for (const Obs& o : obs) {
                const double t = o.arm == Arm::Treatment ? 1.0 : 0.0;
                n += 1; st += t; sx += o.x; stt += t * t; stx += t * o.x; sxx += o.x * o.x;
                sy += o.y; sty += t * o.y; sxy += o.x * o.y;
            }
            const double a11 = n, a12 = st, a13 = sx;
            const double a22 = stt, a23 = stx, a33 = sxx;
            const double det = a11 * (a22 * a33 - a23 * a23) - a12 * (a12 * a33 - a23 * a13) +
                               a13 * (a12 * a23 - a22 * a13);
            const double scale = a11 * a22 * a33 + 1.0;
            if (std::abs(det) <= 1e-12 * scale) {
                throw DegenerateDesignError("singular design matrix in resample");
            }
            // beta1 by Cramer: replace column 2 with X'y.
            const double det1 = a11 * (sty * a33 - a23 * sxy) - sy * (a12 * a33 - a23 * a13) +
                                a13 * (a12 * sxy - sty * a13);
            return det1 / det;
        }
    }
    throw InvalidParameterError("unknown estimator method");
}

}  // namespace

double student_t_two_sided_p(double statistic, double df) {
    const boost::math::students_t dist(df);
    return 2.0 * boost::math::cdf(dist, -std::abs(statistic));
}

InferenceResult t_test_independent(std::span<const double> treatment,
                                   std::span<const double> control) {
    if (treatment.size() < 2 || control.size() < 2) {
        throw TooFewSamplesError("each arm needs at least 2 values");
    }
    const double vt = sample_variance(treatment);
    const double vc = sample_variance(control);
    const double mt = mean(treatment);
    const double mc = mean(control);
    if (variance_is_degenerate(vt + vc, std::max(std::abs(mt), std::abs(mc)))) {
        throw ZeroVarianceError("both arms have zero variance");
    }
    const double nt = static_cast<double>(treatment.size());
    const double nc = static_cast<double>(control.size());
    const double a = vt / nt;
    const double b = vc / nc;
    const double se = std::sqrt(a + b);
    const double df = (a + b) * (a + b) / (a * a / (nt - 1.0) + b * b / (nc - 1.0));

    InferenceResult r;
    r.family = TestFamily::TTestIndependent;
    r.statistic = (mt - mc) / se;
    r.df = df;
    r.p_value = student_t_two_sided_p(r.statistic, df);
    return r;
}

InferenceResult t_test_paired(std::span<const double> treatment,
                              std::span<const double> control) {
    if (treatment.size() != control.size()) {
        throw InvalidParameterError("t_test_paired: arm size mismatch");
    }
    const std::size_t n = treatment.size();
    if (n < 2) throw TooFewPairsError("t_test_paired needs at least 2 pairs");

    std::vector<double> diffs(n);
    for (std::size_t i = 0; i < n; ++i) diffs[i] = treatment[i] - control[i];
    const double md = mean(diffs);
    const double vd = sample_variance(diffs);
    if (variance_is_degenerate(vd, md)) {
        throw ZeroVarianceError("within-pair differences are constant");
    }
    const double df = static_cast<double>(n - 1);

    InferenceResult r;
    r.family = TestFamily::TTestPaired;
    r.statistic = md / std::sqrt(vd / static_cast<double>(n));
    r.df = df;
    r.p_value = student_t_two_sided_p(r.statistic, df);
    return r;
}

InferenceResult bootstrap_p(const AllocationPlan& plan, const ValueMap& outcomes, bool paired,
                            std::size_t n_resamples, std::uint64_t seed) {
    if (n_resamples < 1) throw InvalidParameterError("n_resamples must be >= 1");
    const std::uint64_t boot_seed = Rng::derive(seed, kBootstrapStream);

    std::size_t n_le = 0, n_ge = 0;
    double observed = 0.0;

    if (paired) {
        const PairedValues pv = paired_outcomes(plan, outcomes);
        const std::size_t n = pv.treatment.size();
        if (n < 2) throw TooFewPairsError("paired bootstrap needs at least 2 pairs");
        std::vector<double> diffs(n);
        for (std::size_t i = 0; i < n; ++i) diffs[i] = pv.treatment[i] - pv.control[i];
        if (variance_is_degenerate(sample_variance(diffs), mean(diffs))) {
            throw ZeroVarianceError("within-pair differences are constant");
        }
        observed = mean(diffs);
        for (std::size_t k = 0; k < n_resamples; ++k) {
            Rng rng(Rng::derive(boot_seed, k));
            double s = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                s += diffs[static_cast<std::size_t>(rng.next_below(n))];
            }
            const double d = s / static_cast<double>(n);
            if (d <= 0.0) ++n_le;
            if (d >= 0.0) ++n_ge;
        }
    } else {
        const ArmValues arms = arm_outcomes(plan, outcomes);
        const std::size_t nt = arms.treatment.size();
        const std::size_t nc = arms.control.size();
        if (nt < 2 || nc < 2) throw TooFewSamplesError("each arm needs at least 2 values");
        if (variance_is_degenerate(sample_variance(arms.treatment) + sample_variance(arms.control),
                                   std::max(std::abs(mean(arms.treatment)),
                                            std::abs(mean(arms.control))))) {
            throw ZeroVarianceError("both arms have zero variance");
        }
        observed = mean(arms.treatment) - mean(arms.control);
        for (std::size_t k = 0; k < n_resamples; ++k) {
            Rng rng(Rng::derive(boot_seed, k));
            double st = 0.0, sc = 0.0;
            for (std::size_t i = 0; i < nt; ++i) {
                st += arms.treatment[static_cast<std::size_t>(rng.next_below(nt))];
            }
            for (std::size_t i = 0; i < nc; ++i) {
                sc += arms.control[static_cast<std::size_t>(rng.next_below(nc))];
            }
            const double d = st / static_cast<double>(nt) - sc / static_cast<double>(nc);
            if (d <= 0.0) ++n_le;
            if (d >= 0.0) ++n_ge;
        }
    }

    const double denom = static_cast<double>(n_resamples + 1);
    const double p_lo = (1.0 + static_cast<double>(n_le)) / denom;
    const double p_hi = (1.0 + static_cast<double>(n_ge)) / denom;

    InferenceResult r;
    r.family = paired ? TestFamily::BootstrapPaired : TestFamily::BootstrapIndependent;
    r.statistic = observed;
    r.n_resamples = n_resamples;
    r.p_value = std::min(1.0, 2.0 * std::min(p_lo, p_hi));
    return r;
}

double bootstrap_variance(const AllocationPlan& plan, const ValueMap& covariates,
                          const ValueMap& outcomes, EstimatorMethod method,
                          std::size_t n_resamples, std::uint64_t seed) {
    if (n_resamples < 2) throw InvalidParameterError("n_resamples must be >= 2");
    const bool need_x = method != EstimatorMethod::DiffMeans;
    const std::vector<Obs> base = collect_observations(plan, covariates, outcomes, need_x);
    const std::uint64_t boot_seed = Rng::derive(seed, kBootstrapStream);

    const bool paired = plan.strategy() == AllocationStrategy::Coss;
    std::vector<std::pair<std::size_t, std::size_t>> pairs;  // entry indices per pair
    if (paired) {
        const std::size_t none = plan.size();
        pairs.assign(plan.n_pairs(), {none, none});
        for (std::size_t i = 0; i < plan.size(); ++i) {
            const PlanEntry& e = plan.entries()[i];
            if (!e.pair_index) continue;
            if (*e.pair_index >= pairs.size()) {
                throw InvalidParameterError("pair_index out of range (incomplete pairs)");
            }
            auto& p = pairs[*e.pair_index];
            (p.first == none ? p.first : p.second) = i;
        }
        for (const auto& p : pairs) {
            if (p.first == none || p.second == none) {
                throw InvalidParameterError("plan has an incomplete pair");
            }
        }
        if (pairs.empty()) throw TooFewPairsError("plan has no pairs");
    }

    std::vector<std::size_t> treat_idx, control_idx;
    if (!paired) {
        for (std::size_t i = 0; i < base.size(); ++i) {
            (base[i].arm == Arm::Treatment ? treat_idx : control_idx).push_back(i);
        }
        if (treat_idx.empty() || control_idx.empty()) {
            throw EmptyArmError("both arms must be non-empty");
        }
    }

    std::vector<Obs> resample;
    resample.reserve(base.size());
    std::vector<double> deltas;
    deltas.reserve(n_resamples);
    for (std::size_t k = 0; k < n_resamples; ++k) {
        Rng rng(Rng::derive(boot_seed, k));
        resample.clear();
        if (paired) {
            const std::size_t np = pairs.size();
            for (std::size_t i = 0; i < np; ++i) {
                const auto& p = pairs[static_cast<std::size_t>(rng.next_below(np))];
                resample.push_back(base[p.first]);
                resample.push_back(base[p.second]);
            }
        } else {
            for (std::size_t i = 0; i < treat_idx.size(); ++i) {
                resample.push_back(
                    base[treat_idx[static_cast<std::size_t>(rng.next_below(treat_idx.size()))]]);
            }
            for (std::size_t i = 0; i < control_idx.size(); ++i) {
                resample.push_back(
                    base[control_idx[static_cast<std::size_t>(rng.next_below(control_idx.size()))]]);
            }
        }
        deltas.push_back(delta_of(method, resample));
    }
    return sample_variance(deltas);
}

}  // namespace coss
