#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "coss/simgen.hpp"

namespace coss {

enum class StudyMethod { Rct, Cuped, Coss };

inline const char* to_string(StudyMethod m) {
    switch (m) {
        case StudyMethod::Rct: return "RCT";
        case StudyMethod::Cuped: return "CUPED";
        case StudyMethod::Coss: return "COSS";
    }
    return "?";
}

struct ReplicationSummary {
    StudyMethod strategy = StudyMethod::Rct;
    std::vector<double> deltas;    ///< one per replication, replication order
    std::vector<double> p_values;  ///< aligned with deltas
    double mean = 0.0;
    std::optional<double> se;      ///< sd of deltas across replications; absent when < 2
    double reject_rate_05 = 0.0;   ///< fraction of replications with p < 0.05
};

using StudyResult = std::map<StudyMethod, ReplicationSummary>;

/// Replicated sample -> allocate -> reveal -> estimate -> test pipeline.
///
/// Per replication all strategies see the same drawn sample; RCT and CUPED
/// share one randomized plan (CUPED refits theta on that sample's revealed
/// outcomes), COSS gets its ordered plan. p-values use the
/// strategy-appropriate family: Welch t for RCT, Welch t on adjusted outcomes
/// for CUPED, paired t for COSS; a degenerate test (zero variance) counts as
/// a non-rejection. The population comes from config.seed; sampling and
/// allocation streams derive from `study_seed` and the replication index, so
/// results are identical for any thread count.
StudyResult run_study(const SimulationConfig& config, const std::set<StudyMethod>& strategies,
                      std::uint64_t study_seed, unsigned threads = 1);

/// run_study with mu forced to 0 and eps1 forced to eps0: the no-effect
/// pipeline whose reject_rate_05 is the empirical type-1 error.
StudyResult run_aa_test(SimulationConfig config, const std::set<StudyMethod>& strategies,
                        std::uint64_t study_seed, unsigned threads = 1);

struct HistogramBin {
    double center = 0.0;
    std::size_t count = 0;
};

/// Equal-width binning over [min, max]; counts sum to deltas.size().
std::vector<HistogramBin> emit_histogram(std::span<const double> deltas, std::size_t bins);

std::string summary_table_csv(const StudyResult& result);
std::string summary_table_text(const StudyResult& result);
std::string histogram_csv(std::span<const HistogramBin> bins);

}  // namespace coss
