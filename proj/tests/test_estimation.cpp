#include <doctest.h>

#include <cmath>

#include "coss/allocation.hpp"
#include "coss/errors.hpp"
#include "coss/estimation.hpp"
#include "coss/rng.hpp"
#include "coss/stats.hpp"
#include "oracles.hpp"
#include "test_support.hpp"

using namespace coss;
using test_support::make_units;

namespace {

AllocationPlan plan_from(std::initializer_list<std::pair<const char*, Arm>> spec) {
    std::vector<PlanEntry> entries;
    std::uint32_t rank = 0;
    for (const auto& [id, arm] : spec) {
        entries.push_back({id, arm, std::nullopt, rank++});
    }
    return AllocationPlan(AllocationStrategy::Rct, 0, true, std::move(entries));
}

}  // namespace

TEST_CASE("diff_means worked examples") {
    const auto plan = plan_from({{"t1", Arm::Treatment},
                                 {"t2", Arm::Treatment},
                                 {"c1", Arm::Control},
                                 {"c2", Arm::Control}});
    const ValueMap y{{"t1", 3}, {"t2", 5}, {"c1", 2}, {"c2", 4}};
    const EffectEstimate est = diff_means(plan, y);
    CHECK(est.delta == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(est.n_treat == 2);
    CHECK(est.n_control == 2);

    const auto plan6 = plan_from({{"t1", Arm::Treatment},
                                  {"t2", Arm::Treatment},
                                  {"t3", Arm::Treatment},
                                  {"c1", Arm::Control},
                                  {"c2", Arm::Control},
                                  {"c3", Arm::Control}});
    const ValueMap same{{"t1", 7}, {"t2", 7}, {"t3", 7}, {"c1", 7}, {"c2", 7}, {"c3", 7}};
    const EffectEstimate zero = diff_means(plan6, same);
    CHECK(zero.delta == 0.0);
    CHECK(zero.se == 0.0);

    const ValueMap third{{"t1", 1.2}, {"t2", 0.8}, {"t3", 1.0},
                         {"c1", 0.1}, {"c2", -0.1}, {"c3", 0.0}};
    const EffectEstimate est3 = diff_means(plan6, third);
    CHECK(est3.delta == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(est3.se == doctest::Approx(0.12909944487358055).epsilon(1e-9));
}

TEST_CASE("diff_means error paths") {
    const auto plan = plan_from({{"t1", Arm::Treatment}, {"c1", Arm::Control}});
    CHECK_THROWS_AS(diff_means(plan, ValueMap{{"t1", 1.0}}), MissingOutcomeError);
    const auto all_treat = plan_from({{"t1", Arm::Treatment}, {"t2", Arm::Treatment}});
    CHECK_THROWS_AS(diff_means(all_treat, ValueMap{{"t1", 1.0}, {"t2", 2.0}}), EmptyArmError);
}

TEST_CASE("diff_means is translation-equivariant in the treatment arm") {
    const auto plan = plan_from({{"t1", Arm::Treatment},
                                 {"t2", Arm::Treatment},
                                 {"c1", Arm::Control},
                                 {"c2", Arm::Control}});
    ValueMap y{{"t1", 0.4}, {"t2", -1.7}, {"c1", 2.2}, {"c2", 0.9}};
    const double base = diff_means(plan, y).delta;
    y["t1"] += 2.5;
    y["t2"] += 2.5;
    CHECK(diff_means(plan, y).delta == doctest::Approx(base + 2.5).epsilon(1e-12));
}

TEST_CASE("fit_cuped worked examples") {
    const ValueMap x{{"a", 1}, {"b", 2}, {"c", 3}};
    const ValueMap y{{"a", 2}, {"b", 4}, {"c", 6}};
    const CupedAdjustment perfect = fit_cuped(x, y);
    CHECK(perfect.theta == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(perfect.r_squared == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(perfect.covariate_mean == doctest::Approx(2.0).epsilon(1e-12));

    const ValueMap y_const{{"a", 5}, {"b", 5}, {"c", 5}};
    const CupedAdjustment indep = fit_cuped(x, y_const);
    CHECK(indep.theta == doctest::Approx(0.0));
    CHECK(indep.r_squared == doctest::Approx(0.0));

    const ValueMap x4{{"a", 1}, {"b", 2}, {"c", 3}, {"d", 4}};
    const ValueMap y4{{"a", 1}, {"b", 3}, {"c", 2}, {"d", 5}};
    const CupedAdjustment hand = fit_cuped(x4, y4);
    CHECK(hand.theta == doctest::Approx(1.1).epsilon(1e-9));
    CHECK(hand.r_squared == doctest::Approx(0.6914285714285714).epsilon(1e-9));
}

TEST_CASE("fit_cuped error paths") {
    CHECK_THROWS_AS(fit_cuped(ValueMap{{"a", 1}, {"b", 2}}, ValueMap{{"a", 1}, {"b", 2}}),
                    TooFewUnitsError);
    const ValueMap x_const{{"a", 2}, {"b", 2}, {"c", 2}};
    const ValueMap y{{"a", 1}, {"b", 2}, {"c", 3}};
    CHECK_THROWS_AS(fit_cuped(x_const, y), DegenerateCovariateError);
    // numerically constant, not bit-identical
    const ValueMap x_tiny{{"a", 0.1}, {"b", 0.1}, {"c", 0.1}};
    CHECK_THROWS_AS(fit_cuped(x_tiny, y), DegenerateCovariateError);
}

TEST_CASE("cuped_estimate with theta 0 equals diff_means exactly") {
    const auto plan = plan_from({{"t1", Arm::Treatment},
                                 {"t2", Arm::Treatment},
                                 {"c1", Arm::Control},
                                 {"c2", Arm::Control}});
    const ValueMap y{{"t1", 3.1}, {"t2", 5.7}, {"c1", 2.9}, {"c2", 4.4}};
    const ValueMap x{{"t1", 1.0}, {"t2", 2.0}, {"c1", 3.0}, {"c2", 4.0}};
    const CupedAdjustment null_adj{0.0, 2.5, 0.0};
    const EffectEstimate cuped = cuped_estimate(plan, x, y, null_adj);
    const EffectEstimate plain = diff_means(plan, y);
    CHECK(cuped.delta == plain.delta);
    CHECK(cuped.se == plain.se);
    CHECK(cuped.method == EstimatorMethod::Cuped);

    CHECK_THROWS_AS(cuped_estimate(plan, ValueMap{{"t1", 1.0}}, y, null_adj),
                    MissingCovariateError);
}

TEST_CASE("cuped on a noiseless linear outcome removes all variance") {
    Rng rng(8);
    std::vector<ExperimentUnit> units;
    ValueMap x;
    for (int i = 0; i < 50; ++i) {
        const std::string id = "u" + std::to_string(i);
        const double xv = rng.next_normal();
        units.push_back({id, xv, std::nullopt});
        x[id] = xv;
    }
    const AllocationPlan plan = coss_allocate(units, 77);

    // No lift: theta recovers the slope exactly, the adjusted outcomes are
    // constant, delta and se collapse to zero.
    ValueMap y_null;
    for (const PlanEntry& e : plan.entries()) y_null[e.id] = 3.0 * x[e.id] + 2.0;
    const CupedAdjustment adj0 = fit_cuped(x, y_null);
    const EffectEstimate est0 = cuped_estimate(plan, x, y_null, adj0);
    CHECK(adj0.theta == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(std::abs(est0.delta) < 1e-9);
    CHECK(est0.se < 1e-9);

    // With a lift, the pooled fit absorbs a little of it (the arm indicator
    // correlates with x under the ordered design), so the recovery is tight
    // but not exact.
    ValueMap y;
    for (const PlanEntry& e : plan.entries()) {
        y[e.id] = 3.0 * x[e.id] + 2.0 + (e.arm == Arm::Treatment ? 1.0 : 0.0);
    }
    const CupedAdjustment adj = fit_cuped(x, y);
    const EffectEstimate est = cuped_estimate(plan, x, y, adj);
    CHECK(est.delta == doctest::Approx(1.0).epsilon(0.02));
    CHECK(est.se < 0.02);
}

TEST_CASE("regression_adjust matches the Cramer oracle on 4 units") {
    const auto plan = plan_from({{"t1", Arm::Treatment},
                                 {"t2", Arm::Treatment},
                                 {"c1", Arm::Control},
                                 {"c2", Arm::Control}});
    const ValueMap x{{"t1", 0.3}, {"t2", -1.2}, {"c1", 2.0}, {"c2", 0.7}};
    const ValueMap y{{"t1", 1.9}, {"t2", -0.6}, {"c1", 3.3}, {"c2", 1.1}};
    const EffectEstimate est = regression_adjust(plan, x, y);
    const std::vector<double> t{1, 1, 0, 0};
    const std::vector<double> xs{0.3, -1.2, 2.0, 0.7};
    const std::vector<double> ys{1.9, -0.6, 3.3, 1.1};
    const auto ora = oracle::ols3(t, xs, ys);
    CHECK(est.delta == doctest::Approx(ora.beta1).epsilon(1e-9));
}

TEST_CASE("regression_adjust: covariate orthogonal to arm, y = x exactly") {
    const auto plan = plan_from({{"t1", Arm::Treatment},
                                 {"t2", Arm::Treatment},
                                 {"c1", Arm::Control},
                                 {"c2", Arm::Control}});
    // identical covariate sets in both arms
    const ValueMap x{{"t1", 1.0}, {"t2", 2.0}, {"c1", 1.0}, {"c2", 2.0}};
    ValueMap y;
    for (const auto& [id, xv] : x) y[id] = xv;
    const EffectEstimate est = regression_adjust(plan, x, y);
    CHECK(est.delta == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("regression_adjust rejects a singular design") {
    const auto plan = plan_from({{"t1", Arm::Treatment},
                                 {"t2", Arm::Treatment},
                                 {"c1", Arm::Control},
                                 {"c2", Arm::Control}});
    const ValueMap x_const{{"t1", 1.0}, {"t2", 1.0}, {"c1", 1.0}, {"c2", 1.0}};
    const ValueMap y{{"t1", 1.0}, {"t2", 2.0}, {"c1", 3.0}, {"c2", 4.0}};
    CHECK_THROWS_AS(regression_adjust(plan, x_const, y), DegenerateDesignError);
}

TEST_CASE("fit_line satisfies the normal equations") {
    Rng rng(19);
    std::vector<double> x, y;
    for (int i = 0; i < 40; ++i) {
        x.push_back(rng.next_normal(1.0, 2.0));
        y.push_back(0.7 * x.back() - 1.1 + rng.next_normal(0.0, 0.3));
    }
    const RegressionFit fit = fit_line(x, y);
    double sum_r = 0.0, sum_rx = 0.0, scale = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double r = y[i] - (fit.beta0 + fit.beta1 * x[i]);
        sum_r += r;
        sum_rx += r * x[i];
        scale += std::abs(y[i]);
    }
    CHECK(std::abs(sum_r) <= 1e-9 * scale);
    CHECK(std::abs(sum_rx) <= 1e-9 * scale * 4.0);
    CHECK(fit.residual_variance > 0.0);
    CHECK_THROWS_AS(fit_line(std::vector<double>{1.0, 1.0}, std::vector<double>{1.0, 2.0}),
                    DegenerateCovariateError);
}

TEST_CASE("expected-value preservation: CUPED and diff-means agree on average") {
    // 2,000 simulated RCT replications on a small linear DGP; the mean of
    // (CUPED delta - diff-means delta) should sit within 3 MC sigma of 0.
    Rng master(101);
    RunningMoments gap;
    for (int rep = 0; rep < 2000; ++rep) {
        std::vector<ExperimentUnit> units;
        ValueMap x, y;
        for (int i = 0; i < 40; ++i) {
            const std::string id = "u" + std::to_string(i);
            const double xv = master.next_normal();
            const double yv = 1.5 * xv + master.next_normal();
            units.push_back({id, xv, std::nullopt});
            x[id] = xv;
            y[id] = yv;
        }
        const AllocationPlan plan = rct_allocate(units, Rng::derive(303, rep));
        const CupedAdjustment adj = fit_cuped(x, y);
        gap.add(cuped_estimate(plan, x, y, adj).delta - diff_means(plan, y).delta);
    }
    CHECK(std::abs(gap.mean()) <= 3.0 * gap.std_error_of_mean());
}

TEST_CASE("paired_outcomes rejects malformed pair structures") {
    // same-arm pair
    std::vector<PlanEntry> bad{{"a", Arm::Treatment, 0u, 0}, {"b", Arm::Treatment, 0u, 1}};
    const AllocationPlan same_arm(AllocationStrategy::Coss, 0, true, std::move(bad));
    const ValueMap y{{"a", 1.0}, {"b", 2.0}};
    CHECK_THROWS_AS(paired_outcomes(same_arm, y), InvalidParameterError);

    // pair_index beyond the pair count
    std::vector<PlanEntry> gap{{"a", Arm::Treatment, 5u, 0}, {"b", Arm::Control, 5u, 1}};
    const AllocationPlan sparse(AllocationStrategy::Coss, 0, true, std::move(gap));
    CHECK_THROWS_AS(paired_outcomes(sparse, y), InvalidParameterError);
}

TEST_CASE("regression adjustment matches CUPED's variance on a linear outcome") {
    // Both are linear adjustments, so their across-replication standard
    // errors should agree within 10% on the linear DGP.
    Rng master(606);
    std::vector<double> d_cuped, d_reg;
    for (int rep = 0; rep < 1500; ++rep) {
        std::vector<ExperimentUnit> units;
        ValueMap x, y;
        for (int i = 0; i < 100; ++i) {
            const std::string id = "u" + std::to_string(i);
            const double xv = master.next_normal(0.0, 2.9);
            units.push_back({id, xv, std::nullopt});
            x[id] = xv;
        }
        const AllocationPlan plan = rct_allocate(units, Rng::derive(808, rep));
        for (const PlanEntry& e : plan.entries()) {
            const double eps = e.arm == Arm::Treatment ? 3.0 : 1.0;
            const double mu = e.arm == Arm::Treatment ? 1.0 : 0.0;
            y[e.id] = 2.0 * x[e.id] + 1.0 + mu + eps * master.next_normal();
        }
        const CupedAdjustment adj = fit_cuped(x, y);
        d_cuped.push_back(cuped_estimate(plan, x, y, adj).delta);
        d_reg.push_back(regression_adjust(plan, x, y).delta);
    }
    const double se_cuped = sample_sd(d_cuped);
    const double se_reg = sample_sd(d_reg);
    CHECK(se_reg == doctest::Approx(se_cuped).epsilon(0.10));
}

TEST_CASE("variance reduction law: se ratio tracks 1 - r^2") {
    // Linear DGP with known correlation; across-replication variance ratio of
    // CUPED vs diff-means should equal 1 - r^2 within +-0.05.
    Rng master(505);
    RunningMoments r2_acc;
    std::vector<double> d_plain, d_cuped;
    const int reps = 2000;
    for (int rep = 0; rep < reps; ++rep) {
        std::vector<ExperimentUnit> units;
        ValueMap x, y;
        for (int i = 0; i < 100; ++i) {
            const std::string id = "u" + std::to_string(i);
            const double xv = master.next_normal();
            const double yv = 2.0 * xv + master.next_normal();  // r^2 = 0.8
            units.push_back({id, xv, std::nullopt});
            x[id] = xv;
            y[id] = yv;
        }
        const AllocationPlan plan = rct_allocate(units, Rng::derive(707, rep));
        const CupedAdjustment adj = fit_cuped(x, y);
        d_plain.push_back(diff_means(plan, y).delta);
        d_cuped.push_back(cuped_estimate(plan, x, y, adj).delta);
        r2_acc.add(adj.r_squared);
    }
    const double ratio = sample_variance(d_cuped) / sample_variance(d_plain);
    CHECK(std::abs(ratio - (1.0 - r2_acc.mean())) < 0.05);
}
