#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace coss {

/// Default seed used by the CLI and the bundled presets when none is given.
inline constexpr std::uint64_t kDefaultSeed = 33;

enum class Arm { Treatment, Control };

inline const char* to_string(Arm arm) { return arm == Arm::Treatment ? "T" : "C"; }

/// One experimental unit: unique id, pre-experiment covariate, optional
/// observed outcome.
struct ExperimentUnit {
    std::string id;
    double covariate = 0.0;
    std::optional<double> outcome;
};

enum class AllocationStrategy { Coss, Rct };

inline const char* to_string(AllocationStrategy s) {
    return s == AllocationStrategy::Coss ? "coss" : "rct";
}

struct PlanEntry {
    std::string id;
    Arm arm = Arm::Control;
    /// COSS only: members of pair i hold ranks 2i and 2i+1. The trailing unit
    /// of an odd-sized input is unpaired and excluded from paired analyses.
    std::optional<std::uint32_t> pair_index;
    /// COSS: position in descending-covariate order. RCT: input position.
    std::uint32_t rank = 0;

    friend bool operator==(const PlanEntry&, const PlanEntry&) = default;
};

/// Deterministic unit -> arm map plus strategy metadata. COSS entries are
/// stored in rank order, so the members of pair i sit at positions 2i and
/// 2i+1; RCT entries follow the input order.
class AllocationPlan {
public:
    AllocationPlan(AllocationStrategy strategy, std::uint64_t seed, bool treat_first,
                   std::vector<PlanEntry> entries)
        : strategy_(strategy), seed_(seed), treat_first_(treat_first),
          entries_(std::move(entries)) {
        index_.reserve(entries_.size());
        for (std::size_t i = 0; i < entries_.size(); ++i) {
            index_.emplace(entries_[i].id, i);
            if (entries_[i].arm == Arm::Treatment) ++n_treatment_;
            if (entries_[i].pair_index) ++paired_members_;
        }
    }

    AllocationStrategy strategy() const { return strategy_; }
    std::uint64_t seed() const { return seed_; }
    /// COSS parity: true when rank 0 (highest covariate) is Treatment.
    bool treat_first() const { return treat_first_; }

    const std::vector<PlanEntry>& entries() const { return entries_; }
    std::size_t size() const { return entries_.size(); }
    std::size_t n_treatment() const { return n_treatment_; }
    std::size_t n_control() const { return entries_.size() - n_treatment_; }
    std::size_t n_pairs() const { return paired_members_ / 2; }

    const PlanEntry* find(const std::string& id) const {
        const auto it = index_.find(id);
        return it == index_.end() ? nullptr : &entries_[it->second];
    }

    friend bool operator==(const AllocationPlan& a, const AllocationPlan& b) {
        return a.strategy_ == b.strategy_ && a.seed_ == b.seed_ &&
               a.treat_first_ == b.treat_first_ && a.entries_ == b.entries_;
    }

private:
    AllocationStrategy strategy_;
    std::uint64_t seed_;
    bool treat_first_;
    std::vector<PlanEntry> entries_;
    std::unordered_map<std::string, std::size_t> index_;
    std::size_t n_treatment_ = 0;
    std::size_t paired_members_ = 0;
};

}  // namespace coss
