#include "coss/allocation.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>

#include "coss/errors.hpp"
#include "coss/rng.hpp"

namespace coss {
namespace {

// Child-stream tags under the caller's seed.
constexpr std::uint64_t kCossTieBreakStream = 0xC055;
constexpr std::uint64_t kRctShuffleStream = 0x12C7;

// Indices of `units` sorted by id; throws on duplicates or non-finite
// covariates. Starting from this canonical order makes the result independent
// of the input ordering.
std::vector<std::size_t> canonical_order(const std::vector<ExperimentUnit>& units) {
    if (units.empty()) throw EmptyInputError("no units to allocate");
    std::vector<std::size_t> order(units.size());
    for (std::size_t i = 0; i < units.size(); ++i) {
        order[i] = i;
        if (!std::isfinite(units[i].covariate)) {
            throw NonFiniteCovariateError("non-finite covariate for unit '" + units[i].id + "'");
        }
    }
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return units[a].id < units[b].id; });
    for (std::size_t i = 1; i < order.size(); ++i) {
        if (units[order[i - 1]].id == units[order[i]].id) {
            throw DuplicateIdError("duplicate unit id '" + units[order[i]].id + "'");
        }
    }
    return order;
}

}  // namespace

AllocationPlan coss_allocate(const std::vector<ExperimentUnit>& units, std::uint64_t seed,
                             const CossOptions& options) {
    std::vector<std::size_t> order = canonical_order(units);

    // Seeded permutation first, then a stable sort: tied covariates keep the
    // permuted order, i.e. ties are split at random but reproducibly.
    Rng tie_rng(Rng::derive(seed, kCossTieBreakStream));
    tie_rng.shuffle(order);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return units[a].covariate > units[b].covariate;
    });

    const std::size_t n = order.size();
    std::vector<PlanEntry> entries;
    entries.reserve(n);
    for (std::size_t rank = 0; rank < n; ++rank) {
        PlanEntry e;
        e.id = units[order[rank]].id;
        const bool even = rank % 2 == 0;
        e.arm = (even == options.treat_first) ? Arm::Treatment : Arm::Control;
        e.rank = static_cast<std::uint32_t>(rank);
        const bool unpaired_tail = (n % 2 == 1) && (rank == n - 1);
        if (!unpaired_tail) e.pair_index = static_cast<std::uint32_t>(rank / 2);
        entries.push_back(std::move(e));
    }
    return AllocationPlan(AllocationStrategy::Coss, seed, options.treat_first,
                          std::move(entries));
}

AllocationPlan rct_allocate(const std::vector<ExperimentUnit>& units, std::uint64_t seed) {
    std::vector<std::size_t> order = canonical_order(units);

    Rng rng(Rng::derive(seed, kRctShuffleStream));
    rng.shuffle(order);

    const std::size_t n = order.size();
    const std::size_t n_treat = (n + 1) / 2;  // odd input: extra unit to Treatment
    std::vector<Arm> arm_of(n, Arm::Control);
    for (std::size_t i = 0; i < n_treat; ++i) arm_of[order[i]] = Arm::Treatment;

    std::vector<PlanEntry> entries;
    entries.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        PlanEntry e;
        e.id = units[i].id;
        e.arm = arm_of[i];
        e.rank = static_cast<std::uint32_t>(i);
        entries.push_back(std::move(e));
    }
    return AllocationPlan(AllocationStrategy::Rct, seed, true, std::move(entries));
}

}  // namespace coss
