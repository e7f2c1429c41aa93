#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>

#include "coss/allocation.hpp"
#include "coss/errors.hpp"
#include "coss/rng.hpp"
#include "test_support.hpp"

using namespace coss;
using test_support::make_units;

namespace {

std::vector<double> arm_covariates_sorted(const AllocationPlan& plan,
                                          const std::vector<ExperimentUnit>& units, Arm arm) {
    std::vector<double> out;
    for (const ExperimentUnit& u : units) {
        const PlanEntry* e = plan.find(u.id);
        REQUIRE(e != nullptr);
        if (e->arm == arm) out.push_back(u.covariate);
    }
    std::sort(out.rbegin(), out.rend());
    return out;
}

}  // namespace

TEST_CASE("coss hand trace: {u1:5,u2:3,u3:9,u4:1}") {
    const auto units = make_units({{"u1", 5}, {"u2", 3}, {"u3", 9}, {"u4", 1}});
    const AllocationPlan plan = coss_allocate(units, 1);
    const auto& e = plan.entries();
    REQUIRE(e.size() == 4);
    // descending order u3, u1, u2, u4; alternate T,C,T,C
    CHECK(e[0].id == "u3");
    CHECK(e[1].id == "u1");
    CHECK(e[2].id == "u2");
    CHECK(e[3].id == "u4");
    CHECK(e[0].arm == Arm::Treatment);
    CHECK(e[1].arm == Arm::Control);
    CHECK(e[2].arm == Arm::Treatment);
    CHECK(e[3].arm == Arm::Control);
    CHECK(e[0].pair_index.value() == 0);
    CHECK(e[1].pair_index.value() == 0);
    CHECK(e[2].pair_index.value() == 1);
    CHECK(e[3].pair_index.value() == 1);
    for (std::size_t i = 0; i < 4; ++i) CHECK(e[i].rank == i);
}

TEST_CASE("single unit goes to Treatment, unpaired") {
    const AllocationPlan plan = coss_allocate(make_units({{"u1", 0}}), 9);
    CHECK(plan.n_treatment() == 1);
    CHECK(plan.n_control() == 0);
    CHECK(plan.n_pairs() == 0);
    CHECK(!plan.entries()[0].pair_index.has_value());
}

TEST_CASE("odd count: lowest-covariate unit is the unpaired Treatment tail") {
    const auto units = make_units({{"a", 5}, {"b", 4}, {"c", 3}, {"d", 2}, {"e", 1}});
    const AllocationPlan plan = coss_allocate(units, 3);
    const PlanEntry& last = plan.entries().back();
    CHECK(last.id == "e");
    CHECK(last.arm == Arm::Treatment);
    CHECK(!last.pair_index.has_value());
    CHECK(plan.n_treatment() == 3);
    CHECK(plan.n_control() == 2);
    CHECK(plan.n_pairs() == 2);
}

TEST_CASE("total ties: deterministic and balanced") {
    const auto units = make_units({{"u1", 2}, {"u2", 2}, {"u3", 2}, {"u4", 2}});
    const AllocationPlan a = coss_allocate(units, 55);
    const AllocationPlan b = coss_allocate(units, 55);
    CHECK(a == b);
    CHECK(a.n_treatment() == 2);
    CHECK(a.n_control() == 2);
    // a different seed is allowed to split the ties differently
    const AllocationPlan c = coss_allocate(units, 56);
    CHECK(c.n_treatment() == 2);
}

TEST_CASE("validation errors") {
    CHECK_THROWS_AS(coss_allocate({}, 1), EmptyInputError);
    CHECK_THROWS_AS(coss_allocate(make_units({{"x", 1}, {"x", 2}}), 1), DuplicateIdError);
    CHECK_THROWS_AS(coss_allocate(make_units({{"x", std::numeric_limits<double>::quiet_NaN()}}), 1),
                    NonFiniteCovariateError);
    CHECK_THROWS_AS(rct_allocate(make_units({{"x", std::numeric_limits<double>::infinity()}}), 1),
                    NonFiniteCovariateError);
    CHECK_THROWS_AS(rct_allocate({}, 1), EmptyInputError);
}

TEST_CASE("coss permutation invariance for distinct covariates") {
    Rng rng(11);
    std::vector<ExperimentUnit> units;
    for (int i = 0; i < 101; ++i) {
        units.push_back({"id" + std::to_string(i), rng.next_normal(), std::nullopt});
    }
    const AllocationPlan base = coss_allocate(units, 4242);
    for (int trial = 0; trial < 5; ++trial) {
        rng.shuffle(units);
        CHECK(coss_allocate(units, 4242) == base);
    }
}

TEST_CASE("rank dominance: k-th largest Treatment covariate >= k-th largest Control") {
    Rng rng(13);
    std::vector<ExperimentUnit> units;
    for (int i = 0; i < 200; ++i) {
        units.push_back({"id" + std::to_string(i), rng.next_normal(), std::nullopt});
    }
    const AllocationPlan plan = coss_allocate(units, 5);
    const auto t = arm_covariates_sorted(plan, units, Arm::Treatment);
    const auto c = arm_covariates_sorted(plan, units, Arm::Control);
    REQUIRE(t.size() == c.size());
    for (std::size_t k = 0; k < t.size(); ++k) CHECK(t[k] >= c[k]);
}

TEST_CASE("within-pair dominance respects the configured parity") {
    Rng rng(17);
    std::vector<ExperimentUnit> units;
    for (int i = 0; i < 60; ++i) {
        units.push_back({"id" + std::to_string(i), rng.next_unit(), std::nullopt});
    }
    for (const bool treat_first : {true, false}) {
        const AllocationPlan plan = coss_allocate(units, 21, {.treat_first = treat_first});
        const auto& e = plan.entries();
        for (std::size_t i = 0; i + 1 < e.size(); i += 2) {
            REQUIRE(e[i].pair_index.value() == e[i + 1].pair_index.value());
            CHECK(e[i].arm != e[i + 1].arm);
            const PlanEntry& high = e[i];
            CHECK(high.arm == (treat_first ? Arm::Treatment : Arm::Control));
        }
    }
}

TEST_CASE("coss plan is invariant under positive affine covariate maps") {
    Rng rng(23);
    std::vector<ExperimentUnit> units;
    for (int i = 0; i < 75; ++i) {
        units.push_back({"id" + std::to_string(i), rng.next_normal(), std::nullopt});
    }
    const AllocationPlan base = coss_allocate(units, 8);
    std::vector<ExperimentUnit> scaled = units;
    for (auto& u : scaled) u.covariate = 3.5 * u.covariate - 12.0;
    const AllocationPlan mapped = coss_allocate(scaled, 8);
    REQUIRE(base.size() == mapped.size());
    for (std::size_t i = 0; i < base.size(); ++i) {
        CHECK(base.entries()[i].id == mapped.entries()[i].id);
        CHECK(base.entries()[i].arm == mapped.entries()[i].arm);
        CHECK(base.entries()[i].pair_index == mapped.entries()[i].pair_index);
    }
}

TEST_CASE("rct: seeded determinism and exact balance") {
    Rng rng(31);
    std::vector<ExperimentUnit> units;
    for (int i = 0; i < 1000; ++i) {
        units.push_back({"id" + std::to_string(i), rng.next_normal(), std::nullopt});
    }
    const AllocationPlan a = rct_allocate(units, 99);
    const AllocationPlan b = rct_allocate(units, 99);
    CHECK(a == b);
    CHECK(a.n_treatment() == 500);
    CHECK(a.n_control() == 500);
    CHECK(rct_allocate(units, 100) != a);

    const auto odd = rct_allocate(make_units({{"a", 1}, {"b", 2}, {"c", 3}}), 7);
    CHECK(odd.n_treatment() == 2);
    CHECK(odd.n_control() == 1);
}

TEST_CASE("rct: per-unit treatment frequency over a seed sweep") {
    // 10,000 units x 500 seeds. Each per-unit frequency is Binomial(500, 1/2)
    // scaled: sd ~ 0.0224. The extreme over 10k units fluctuates around 4.4
    // sigma, so assert a global +-0.12 envelope (5.4 sigma) and that 99% land
    // in the +-0.06 band.
    const std::size_t n_units = 10000;
    const int n_seeds = 500;
    std::vector<ExperimentUnit> units;
    units.reserve(n_units);
    Rng rng(41);
    for (std::size_t i = 0; i < n_units; ++i) {
        units.push_back({"id" + std::to_string(i), rng.next_normal(), std::nullopt});
    }
    std::vector<int> treat_count(n_units, 0);
    for (int seed = 0; seed < n_seeds; ++seed) {
        const AllocationPlan plan = rct_allocate(units, static_cast<std::uint64_t>(seed));
        const auto& e = plan.entries();
        for (std::size_t i = 0; i < n_units; ++i) {
            treat_count[i] += e[i].arm == Arm::Treatment ? 1 : 0;
        }
    }
    std::size_t inside_tight = 0;
    long long total = 0;
    for (std::size_t i = 0; i < n_units; ++i) {
        const double freq = static_cast<double>(treat_count[i]) / n_seeds;
        total += treat_count[i];
        CHECK(freq > 0.38);
        CHECK(freq < 0.62);
        if (freq >= 0.44 && freq <= 0.56) ++inside_tight;
    }
    // exact split each seed forces the grand mean to exactly 1/2
    CHECK(total == static_cast<long long>(n_units) * n_seeds / 2);
    CHECK(static_cast<double>(inside_tight) / static_cast<double>(n_units) > 0.99);
}
