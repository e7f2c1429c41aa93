#include "coss/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <sstream>
#include <thread>

#include "coss/allocation.hpp"
#include "coss/csv.hpp"
#include "coss/errors.hpp"
#include "coss/inference.hpp"
#include "coss/stats.hpp"

namespace coss {
namespace {

constexpr std::uint64_t kReplicationStream = 0x4E94;
constexpr std::uint64_t kSampleSub = 1;
constexpr std::uint64_t kRctSub = 2;
constexpr std::uint64_t kCossSub = 3;

struct RepOutcome {
    double delta = 0.0;
    double p = 1.0;
};

// A test that cannot run (constant data) counts as a non-rejection.
template <typename Fn>
double p_or_one(Fn&& fn) {
    try {
        return fn().p_value;
    } catch (const ZeroVarianceError&) {
        return 1.0;
    } catch (const TooFewPairsError&) {
        return 1.0;
    } catch (const TooFewSamplesError&) {
        return 1.0;
    }
}

struct RepResult {
    std::optional<RepOutcome> rct;
    std::optional<RepOutcome> cuped;
    std::optional<RepOutcome> coss;
};

RepResult run_replication(const SimulationConfig& config,
                          const std::vector<PopulationUnit>& population, bool want_rct,
                          bool want_cuped, bool want_coss, std::uint64_t rep_seed) {
    RepResult out;
    const std::vector<PopulationUnit> sample =
        draw_sample(population, config.sample_size, Rng::derive(rep_seed, kSampleSub));
    const std::vector<ExperimentUnit> units = to_experiment_units(sample);

    if (want_rct || want_cuped) {
        const AllocationPlan plan = rct_allocate(units, Rng::derive(rep_seed, kRctSub));
        const ValueMap revealed = reveal_outcomes(plan, sample);
        if (want_rct) {
            const EffectEstimate est = diff_means(plan, revealed);
            const ArmValues arms = arm_outcomes(plan, revealed);
            out.rct = {est.delta, p_or_one([&] {
                           return t_test_independent(arms.treatment, arms.control);
                       })};
        }
        if (want_cuped) {
            const ValueMap covs = covariates_of(sample);
            const CupedAdjustment adj = fit_cuped(covs, revealed);
            const EffectEstimate est = cuped_estimate(plan, covs, revealed, adj);
            const ValueMap adjusted = cuped_adjusted_outcomes(plan, covs, revealed, adj);
            const ArmValues arms = arm_outcomes(plan, adjusted);
            out.cuped = {est.delta, p_or_one([&] {
                             return t_test_independent(arms.treatment, arms.control);
                         })};
        }
    }
    if (want_coss) {
        const AllocationPlan plan = coss_allocate(units, Rng::derive(rep_seed, kCossSub),
                                                  {.treat_first = config.coss_treat_first});
        const ValueMap revealed = reveal_outcomes(plan, sample);
        const EffectEstimate est = diff_means(plan, revealed);
        const PairedValues pairs = paired_outcomes(plan, revealed);
        out.coss = {est.delta, p_or_one([&] {
                        return t_test_paired(pairs.treatment, pairs.control);
                    })};
    }
    return out;
}

ReplicationSummary summarize(StudyMethod method, std::vector<double> deltas,
                             std::vector<double> p_values) {
    ReplicationSummary s;
    s.strategy = method;
    s.mean = mean(deltas);
    if (deltas.size() >= 2) s.se = sample_sd(deltas);
    std::size_t rejects = 0;
    for (const double p : p_values) rejects += p < 0.05 ? 1 : 0;
    s.reject_rate_05 =
        p_values.empty() ? 0.0 : static_cast<double>(rejects) / static_cast<double>(p_values.size());
    s.deltas = std::move(deltas);
    s.p_values = std::move(p_values);
    return s;
}

}  // namespace

StudyResult run_study(const SimulationConfig& config, const std::set<StudyMethod>& strategies,
                      std::uint64_t study_seed, unsigned threads) {
    config.validate();
    if (strategies.empty()) throw InvalidParameterError("no strategies requested");

    const std::vector<PopulationUnit> population = generate_population(config);
    const bool want_rct = strategies.count(StudyMethod::Rct) != 0;
    const bool want_cuped = strategies.count(StudyMethod::Cuped) != 0;
    const bool want_coss = strategies.count(StudyMethod::Coss) != 0;

    const std::size_t reps = config.replications;
    std::vector<RepResult> results(reps);
    const std::uint64_t rep_base = Rng::derive(study_seed, kReplicationStream);

    unsigned n_workers = threads == 0 ? std::thread::hardware_concurrency() : threads;
    n_workers = std::max(1u, std::min<unsigned>(n_workers, reps));

    if (n_workers == 1) {
        for (std::size_t k = 0; k < reps; ++k) {
            results[k] = run_replication(config, population, want_rct, want_cuped, want_coss,
                                         Rng::derive(rep_base, k));
        }
    } else {
        std::atomic<std::size_t> next{0};
        std::exception_ptr first_error;
        std::mutex error_mutex;
        auto worker = [&] {
            for (;;) {
                const std::size_t k = next.fetch_add(1);
                if (k >= reps) return;
                try {
                    results[k] = run_replication(config, population, want_rct, want_cuped,
                                                 want_coss, Rng::derive(rep_base, k));
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (!first_error) first_error = std::current_exception();
                    next.store(reps);
                    return;
                }
            }
        };
        std::vector<std::thread> pool;
        pool.reserve(n_workers);
        for (unsigned i = 0; i < n_workers; ++i) pool.emplace_back(worker);
        for (std::thread& t : pool) t.join();
        if (first_error) std::rethrow_exception(first_error);
    }

    // Aggregate serially in replication order; identical for any thread count.
    StudyResult out;
    auto gather = [&](StudyMethod m, auto member) {
        std::vector<double> deltas, ps;
        deltas.reserve(reps);
        ps.reserve(reps);
        for (const RepResult& r : results) {
            const std::optional<RepOutcome>& o = r.*member;
            deltas.push_back(o->delta);
            ps.push_back(o->p);
        }
        out.emplace(m, summarize(m, std::move(deltas), std::move(ps)));
    };
    if (want_rct) gather(StudyMethod::Rct, &RepResult::rct);
    if (want_cuped) gather(StudyMethod::Cuped, &RepResult::cuped);
    if (want_coss) gather(StudyMethod::Coss, &RepResult::coss);
    return out;
}

StudyResult run_aa_test(SimulationConfig config, const std::set<StudyMethod>& strategies,
                        std::uint64_t study_seed, unsigned threads) {
    config.mu = 0.0;
    config.eps1 = config.eps0;
    return run_study(config, strategies, study_seed, threads);
}

std::vector<HistogramBin> emit_histogram(std::span<const double> deltas, std::size_t bins) {
    if (deltas.empty()) throw EmptyInputError("emit_histogram: no deltas");
    if (bins < 1) throw InvalidParameterError("emit_histogram: bins must be >= 1");
    const auto [lo_it, hi_it] = std::minmax_element(deltas.begin(), deltas.end());
    const double lo = *lo_it;
    const double hi = *hi_it;
    const double width = (hi - lo) / static_cast<double>(bins);

    std::vector<HistogramBin> out(bins);
    for (std::size_t i = 0; i < bins; ++i) {
        out[i].center = lo + (static_cast<double>(i) + 0.5) * width;
    }
    if (width <= 0.0) {
        for (auto& b : out) b.center = lo;
        out[0].count = deltas.size();
        return out;
    }
    for (const double d : deltas) {
        auto idx = static_cast<std::size_t>((d - lo) / width);
        idx = std::min(idx, bins - 1);
        ++out[idx].count;
    }
    return out;
}

std::string summary_table_csv(const StudyResult& result) {
    std::string s = "strategy,replications,mean,se,reject_rate_05\n";
    for (const auto& [method, summary] : result) {
        s += to_string(method);
        s += ',';
        s += std::to_string(summary.deltas.size());
        s += ',';
        s += format_double(summary.mean);
        s += ',';
        s += summary.se ? format_double(*summary.se) : std::string{};
        s += ',';
        s += format_double(summary.reject_rate_05);
        s += '\n';
    }
    return s;
}

std::string summary_table_text(const StudyResult& result) {
    std::ostringstream os;
    os << "strategy    mean      se        reject@0.05\n";
    char buf[96];
    for (const auto& [method, summary] : result) {
        if (summary.se) {
            std::snprintf(buf, sizeof(buf), "%-10s  %8.4f  %8.4f  %6.4f\n", to_string(method),
                          summary.mean, *summary.se, summary.reject_rate_05);
        } else {
            std::snprintf(buf, sizeof(buf), "%-10s  %8.4f  %8s  %6.4f\n", to_string(method),
                          summary.mean, "n/a", summary.reject_rate_05);
        }
        os << buf;
    }
    return os.str();
}

std::string histogram_csv(std::span<const HistogramBin> bins) {
    std::string s = "bin_center,count\n";
    for (const HistogramBin& b : bins) {
        s += format_double(b.center);
        s += ',';
        s += std::to_string(b.count);
        s += '\n';
    }
    return s;
}

}  // namespace coss
