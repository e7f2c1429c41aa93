#pragma once

#include <cstdint>
#include <vector>

#include "coss/units.hpp"

namespace coss {

struct CossOptions {
    /// Parity of the Treatment arm: true assigns rank 0 (highest covariate)
    /// to Treatment. The bundled reference presets flip this; see
    /// presets.cpp.
    bool treat_first = true;
};

/// Covariate-ordered systematic sampling: sort units by covariate descending
/// and alternate arms. Ties are broken by a seeded random permutation of the
/// id-canonicalised input, so the plan depends only on the unit set and the
/// seed. An odd trailing unit is assigned by the alternation and left
/// unpaired.
AllocationPlan coss_allocate(const std::vector<ExperimentUnit>& units, std::uint64_t seed,
                             const CossOptions& options = {});

/// Complete randomization: a uniformly random split with exactly floor(n/2)
/// units in Control (the extra unit of an odd input goes to Treatment).
/// Deterministic given seed.
AllocationPlan rct_allocate(const std::vector<ExperimentUnit>& units, std::uint64_t seed);

}  // namespace coss
