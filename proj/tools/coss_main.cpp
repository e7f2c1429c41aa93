#include <CLI11.hpp>

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "coss/allocation.hpp"
#include "coss/config_io.hpp"
#include "coss/csv.hpp"
#include "coss/errors.hpp"
#include "coss/harness.hpp"
#include "coss/inference.hpp"
#include "coss/presets.hpp"
#include "coss/theory.hpp"

namespace fs = std::filesystem;
using namespace coss;

namespace {

std::string fmt_fixed(double v, int prec = 6) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*f", prec, v);
    return buf;
}

// ---------------------------------------------------------------------------
// allocate
// ---------------------------------------------------------------------------

struct AllocateArgs {
    std::string input;
    std::string output = "allocation.csv";
    std::string id_col = "id";
    std::string covariate_col = "covariate";
    std::string strategy = "coss";
    std::uint64_t seed = kDefaultSeed;
    bool control_first = false;
};

std::vector<ExperimentUnit> read_units(const CsvTable& table, const std::string& id_col,
                                       const std::string& covariate_col,
                                       const std::string& source) {
    if (table.rows.empty()) throw EmptyInputError(source + ": no units");
    const std::size_t idc = table.require_column(id_col);
    const std::size_t xc = table.require_column(covariate_col);
    std::vector<ExperimentUnit> units;
    units.reserve(table.rows.size());
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        ExperimentUnit u;
        u.id = table.rows[r][idc];
        if (u.id.empty()) throw CsvError(source + ": empty id in data row " + std::to_string(r + 1));
        u.covariate = parse_double(table.rows[r][xc],
                                   source + " row " + std::to_string(r + 1) + " " + covariate_col);
        units.push_back(std::move(u));
    }
    return units;
}

std::string plan_to_csv(const AllocationPlan& plan) {
    std::string out = "# coss-allocation v1\n# strategy=";
    out += to_string(plan.strategy());
    out += " seed=";
    out += std::to_string(plan.seed());
    out += " parity=";
    out += plan.treat_first() ? "treat-first" : "control-first";
    out += "\nid,arm,pair_index,rank\n";
    for (const PlanEntry& e : plan.entries()) {
        out += csv_escape(e.id);
        out += ',';
        out += to_string(e.arm);
        out += ',';
        if (e.pair_index) out += std::to_string(*e.pair_index);
        out += ',';
        out += std::to_string(e.rank);
        out += '\n';
    }
    return out;
}

int cmd_allocate(const AllocateArgs& args) {
    const CsvTable table = read_csv_file(args.input);
    const std::vector<ExperimentUnit> units =
        read_units(table, args.id_col, args.covariate_col, args.input);
    const AllocationPlan plan =
        args.strategy == "coss"
            ? coss_allocate(units, args.seed, {.treat_first = !args.control_first})
            : rct_allocate(units, args.seed);
    write_file_atomic(args.output, plan_to_csv(plan));
    std::cout << "wrote " << args.output << " (" << plan.size() << " units, "
              << plan.n_treatment() << " T / " << plan.n_control() << " C)\n";
    return 0;
}

// ---------------------------------------------------------------------------
// estimate
// ---------------------------------------------------------------------------

struct EstimateArgs {
    std::string allocation;
    std::string outcomes;
    std::string id_col = "id";
    std::string outcome_col = "outcome";
    std::string covariate_col = "covariate";
    std::string method = "diff-means";
    std::string test = "t";  // t | bootstrap | none
    bool force_paired = false;
    bool force_independent = false;
    std::size_t resamples = 10000;
    std::size_t bootstrap_variance_resamples = 0;
    std::uint64_t seed = kDefaultSeed;
    std::string output;
    std::string format = "text";
};

AllocationPlan read_plan(const std::string& path) {
    const CsvTable table = read_csv_file(path);
    const std::size_t idc = table.require_column("id");
    const std::size_t armc = table.require_column("arm");
    const std::size_t pairc = table.require_column("pair_index");
    const std::size_t rankc = table.require_column("rank");

    std::optional<AllocationStrategy> strategy;
    std::uint64_t seed = 0;
    bool treat_first = true;
    for (const std::string& comment : table.comments) {
        std::istringstream is(comment);
        std::string token;
        while (is >> token) {
            const auto eq = token.find('=');
            if (eq == std::string::npos) continue;
            const std::string key = token.substr(0, eq);
            const std::string value = token.substr(eq + 1);
            if (key == "strategy") {
                if (value == "coss") strategy = AllocationStrategy::Coss;
                if (value == "rct") strategy = AllocationStrategy::Rct;
            } else if (key == "seed") {
                seed = std::strtoull(value.c_str(), nullptr, 10);
            } else if (key == "parity") {
                treat_first = value != "control-first";
            }
        }
    }

    std::vector<PlanEntry> entries;
    entries.reserve(table.rows.size());
    bool any_pair = false;
    for (const auto& row : table.rows) {
        PlanEntry e;
        e.id = row[idc];
        if (row[armc] == "T") e.arm = Arm::Treatment;
        else if (row[armc] == "C") e.arm = Arm::Control;
        else throw CsvError(path + ": arm must be T or C, got '" + row[armc] + "'");
        if (!row[pairc].empty()) {
            e.pair_index =
                static_cast<std::uint32_t>(parse_double(row[pairc], path + " pair_index"));
            any_pair = true;
        }
        e.rank = static_cast<std::uint32_t>(parse_double(row[rankc], path + " rank"));
        entries.push_back(std::move(e));
    }
    if (entries.empty()) throw EmptyInputError(path + ": no units");
    const AllocationStrategy strat =
        strategy.value_or(any_pair ? AllocationStrategy::Coss : AllocationStrategy::Rct);
    if (strat == AllocationStrategy::Coss) {
        std::stable_sort(entries.begin(), entries.end(),
                         [](const PlanEntry& a, const PlanEntry& b) { return a.rank < b.rank; });
        // Each pair must hold exactly one unit of each arm.
        std::map<std::uint32_t, std::pair<int, int>> seen;
        for (const PlanEntry& e : entries) {
            if (!e.pair_index) continue;
            auto& [t, c] = seen[*e.pair_index];
            (e.arm == Arm::Treatment ? t : c) += 1;
        }
        for (const auto& [idx, counts] : seen) {
            if (counts.first != 1 || counts.second != 1) {
                throw CsvError(path + ": pair " + std::to_string(idx) +
                               " is not one Treatment + one Control unit");
            }
        }
    }
    return AllocationPlan(strat, seed, treat_first, std::move(entries));
}

struct EstimateReport {
    EffectEstimate estimate;
    std::optional<CupedAdjustment> cuped;
    std::optional<InferenceResult> test;
    std::optional<double> bootstrap_var;
};

std::string report_csv(const EstimateReport& r) {
    std::string s =
        "method,delta,se,n_treat,n_control,theta,r_squared,covariate_mean,test_family,"
        "statistic,df,p_value,n_resamples,bootstrap_variance\n";
    s += to_string(r.estimate.method);
    s += ',' + format_double(r.estimate.delta);
    s += ',' + format_double(r.estimate.se);
    s += ',' + std::to_string(r.estimate.n_treat);
    s += ',' + std::to_string(r.estimate.n_control);
    s += ',';
    if (r.cuped) s += format_double(r.cuped->theta);
    s += ',';
    if (r.cuped) s += format_double(r.cuped->r_squared);
    s += ',';
    if (r.cuped) s += format_double(r.cuped->covariate_mean);
    s += ',';
    if (r.test) s += to_string(r.test->family);
    s += ',';
    if (r.test) s += format_double(r.test->statistic);
    s += ',';
    if (r.test && r.test->df) s += format_double(*r.test->df);
    s += ',';
    if (r.test) s += format_double(r.test->p_value);
    s += ',';
    if (r.test && r.test->n_resamples > 0) s += std::to_string(r.test->n_resamples);
    s += ',';
    if (r.bootstrap_var) s += format_double(*r.bootstrap_var);
    s += '\n';
    return s;
}

std::string report_text(const EstimateReport& r) {
    std::string s;
    s += "method:          " + std::string(to_string(r.estimate.method)) + '\n';
    s += "delta:           " + fmt_fixed(r.estimate.delta) + '\n';
    s += "se:              " + fmt_fixed(r.estimate.se) + '\n';
    s += "n_treat:         " + std::to_string(r.estimate.n_treat) + '\n';
    s += "n_control:       " + std::to_string(r.estimate.n_control) + '\n';
    if (r.cuped) {
        s += "theta:           " + fmt_fixed(r.cuped->theta) + '\n';
        s += "r_squared:       " + fmt_fixed(r.cuped->r_squared) + '\n';
        s += "covariate_mean:  " + fmt_fixed(r.cuped->covariate_mean) + '\n';
    }
    if (r.test) {
        s += "test:            " + std::string(to_string(r.test->family)) + '\n';
        s += "statistic:       " + fmt_fixed(r.test->statistic) + '\n';
        if (r.test->df) s += "df:              " + fmt_fixed(*r.test->df, 2) + '\n';
        s += "p_value:         " + fmt_fixed(r.test->p_value) + '\n';
        if (r.test->n_resamples > 0) {
            s += "n_resamples:     " + std::to_string(r.test->n_resamples) + '\n';
        }
    }
    if (r.bootstrap_var) {
        s += "bootstrap_variance: " + fmt_fixed(*r.bootstrap_var, 8) + '\n';
    }
    return s;
}

int cmd_estimate(const EstimateArgs& args) {
    const AllocationPlan plan = read_plan(args.allocation);
    const CsvTable table = read_csv_file(args.outcomes);
    const std::size_t idc = table.require_column(args.id_col);
    const std::size_t yc = table.require_column(args.outcome_col);
    const auto xc = table.column(args.covariate_col);

    ValueMap outcomes, covariates;
    outcomes.reserve(table.rows.size());
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const auto& row = table.rows[r];
        outcomes[row[idc]] =
            parse_double(row[yc], args.outcomes + " row " + std::to_string(r + 1));
        if (xc) {
            covariates[row[idc]] =
                parse_double(row[*xc], args.outcomes + " row " + std::to_string(r + 1));
        }
    }

    // Join check up front so the user sees every missing id at once.
    std::vector<std::string> missing;
    for (const PlanEntry& e : plan.entries()) {
        if (outcomes.find(e.id) == outcomes.end()) missing.push_back(e.id);
    }
    if (!missing.empty()) {
        std::string msg =
            "no outcome for " + std::to_string(missing.size()) + " allocated unit(s):";
        for (std::size_t i = 0; i < missing.size() && i < 10; ++i) msg += ' ' + missing[i];
        if (missing.size() > 10) msg += " ...";
        throw MissingOutcomeError(msg);
    }

    const bool need_covariates = args.method != "diff-means";
    if (need_covariates && !xc) {
        throw CsvError(args.outcomes + ": missing required column '" + args.covariate_col +
                       "' for method " + args.method);
    }

    EstimateReport report;
    const ValueMap* test_series = &outcomes;  // the series the hypothesis test runs on
    ValueMap adjusted;
    if (args.method == "diff-means") {
        report.estimate = diff_means(plan, outcomes);
    } else if (args.method == "cuped") {
        const CupedAdjustment adj = fit_cuped(covariates, outcomes);
        report.cuped = adj;
        report.estimate = cuped_estimate(plan, covariates, outcomes, adj);
        adjusted = cuped_adjusted_outcomes(plan, covariates, outcomes, adj);
        test_series = &adjusted;
    } else {
        report.estimate = regression_adjust(plan, covariates, outcomes);
    }

    const bool paired = args.force_paired ||
                        (!args.force_independent && plan.strategy() == AllocationStrategy::Coss);
    if (args.test == "t") {
        if (args.method == "regression") {
            // Conventional OLS coefficient test.
            InferenceResult t;
            t.family = TestFamily::TTestIndependent;
            t.statistic = report.estimate.delta / report.estimate.se;
            t.df = static_cast<double>(plan.size() - 3);
            t.p_value = student_t_two_sided_p(t.statistic, *t.df);
            report.test = t;
        } else if (paired) {
            const PairedValues pv = paired_outcomes(plan, *test_series);
            report.test = t_test_paired(pv.treatment, pv.control);
        } else {
            const ArmValues arms = arm_outcomes(plan, *test_series);
            report.test = t_test_independent(arms.treatment, arms.control);
        }
    } else if (args.test == "bootstrap") {
        if (args.method == "regression") {
            throw InvalidParameterError(
                "bootstrap test is not defined for regression; use --bootstrap-variance");
        }
        report.test = bootstrap_p(plan, *test_series, paired, args.resamples, args.seed);
    }

    if (args.bootstrap_variance_resamples > 0) {
        EstimatorMethod m = EstimatorMethod::DiffMeans;
        if (args.method == "cuped") m = EstimatorMethod::Cuped;
        if (args.method == "regression") m = EstimatorMethod::RegressionAdj;
        report.bootstrap_var = bootstrap_variance(plan, covariates, outcomes, m,
                                                  args.bootstrap_variance_resamples, args.seed);
    }

    std::cout << (args.format == "csv" ? report_csv(report) : report_text(report));
    if (!args.output.empty()) write_file_atomic(args.output, report_csv(report));
    return 0;
}

// ---------------------------------------------------------------------------
// simulate / aa-test
// ---------------------------------------------------------------------------

struct SimulateArgs {
    std::string preset = "linear.paper";
    std::string config_path;
    std::optional<std::size_t> replications;
    std::optional<std::size_t> sample_size;
    std::optional<std::uint64_t> seed;
    unsigned threads = 1;
    std::string output;
    std::string format = "text";
    std::size_t bins = 40;
    std::string dump_population;
};

SimulationConfig resolve_config(const SimulateArgs& args, bool& preset_mode) {
    preset_mode = args.config_path.empty();
    SimulationConfig cfg =
        preset_mode ? preset_config(args.preset) : load_config_json(args.config_path);
    if (args.replications) cfg.replications = *args.replications;
    if (args.sample_size) cfg.sample_size = *args.sample_size;
    if (args.seed) cfg.seed = *args.seed;
    cfg.validate();
    return cfg;
}

void write_study_outputs(const std::string& dir, const StudyResult& result, std::size_t bins) {
    if (dir.empty()) return;
    write_file_atomic(fs::path(dir) / "summary.csv", summary_table_csv(result));
    for (const auto& [method, summary] : result) {
        std::string name = "hist_";
        for (const char* p = to_string(method); *p != '\0'; ++p) {
            name += static_cast<char>(std::tolower(static_cast<unsigned char>(*p)));
        }
        name += ".csv";
        const auto hist = emit_histogram(summary.deltas, bins);
        write_file_atomic(fs::path(dir) / name, histogram_csv(hist));
    }
}

int cmd_simulate(const SimulateArgs& args) {
    bool preset_mode = false;
    const SimulationConfig cfg = resolve_config(args, preset_mode);
    if (cfg.replications < 2) {
        std::cerr << "warning: standard error is undefined with a single replication\n";
    }
    if (!args.dump_population.empty()) {
        std::string csv = "id,x,y0,y1\n";
        for (const PopulationUnit& u : generate_population(cfg)) {
            csv += u.id;
            csv += ',' + format_double(u.x);
            csv += ',' + format_double(u.y0);
            csv += ',' + format_double(u.y1);
            csv += '\n';
        }
        write_file_atomic(args.dump_population, csv);
    }
    const StudyResult result = run_study(
        cfg, {StudyMethod::Rct, StudyMethod::Cuped, StudyMethod::Coss}, cfg.seed, args.threads);

    std::cout << (args.format == "csv" ? summary_table_csv(result) : summary_table_text(result));

    if (preset_mode) {
        const SimulationConfig bundled = preset_config(args.preset);
        const bool comparable = cfg.replications == bundled.replications &&
                                cfg.sample_size == bundled.sample_size &&
                                cfg.population == bundled.population;
        if (!comparable) {
            std::cout << "reference comparison skipped (replications/sample size overridden)\n";
        } else {
            for (const ReferenceCheck& c : reference_checks(args.preset, result)) {
                std::cout << (c.pass ? "PASS" : "FAIL") << "  " << c.label
                          << "  observed=" << fmt_fixed(c.observed, 4) << "  expected "
                          << c.expected << '\n';
            }
        }
    }
    write_study_outputs(args.output, result, args.bins);
    return 0;
}

int cmd_aa_test(const SimulateArgs& args) {
    bool preset_mode = false;
    const SimulationConfig cfg = resolve_config(args, preset_mode);
    const StudyResult result = run_aa_test(
        cfg, {StudyMethod::Rct, StudyMethod::Cuped, StudyMethod::Coss}, cfg.seed, args.threads);

    std::cout << (args.format == "csv" ? summary_table_csv(result) : summary_table_text(result));
    const double rct = result.at(StudyMethod::Rct).reject_rate_05;
    const double coss = result.at(StudyMethod::Coss).reject_rate_05;
    std::cout << "type-1 error band [0.03, 0.07]:";
    for (const auto& [method, summary] : result) {
        const bool ok = summary.reject_rate_05 >= 0.03 && summary.reject_rate_05 <= 0.07;
        std::cout << "  " << to_string(method) << '=' << fmt_fixed(summary.reject_rate_05, 4)
                  << (ok ? " (ok)" : " (out)");
    }
    std::cout << "\n|COSS - RCT| = " << fmt_fixed(std::abs(coss - rct), 4)
              << (std::abs(coss - rct) <= 0.02 ? " (ok)" : " (out)") << '\n';
    write_study_outputs(args.output, result, args.bins);
    return 0;
}

// ---------------------------------------------------------------------------
// bias-diagnostics
// ---------------------------------------------------------------------------

struct BiasArgs {
    std::vector<std::size_t> pairs = {50, 100, 200, 400};
    double slope = 1.0;
    double intercept = 0.0;
    double noise = 0.0;
    std::size_t reps = 20000;
    std::size_t bound_reps = 20000;
    std::uint64_t seed = kDefaultSeed;
    std::string output;
    std::string format = "text";
};

int cmd_bias_diagnostics(const BiasArgs& args) {
    const DgpModel model{args.slope, args.intercept, args.noise};
    std::string csv =
        "n_pairs,empirical_bias,bias_mc_se,half_sum_bound,mean_diff_bound,rate_uniform,"
        "rate_normal,rate_shifted_poisson,bias_within_bound\n";
    if (args.format == "text") {
        std::cout << "n_pairs  bias        mc_se      bound(x2)   rate_unif   rate_norm   "
                     "rate_sp     ok\n";
    }
    for (const std::size_t n : args.pairs) {
        const MonteCarloEstimate bias = empirical_bias(model, n, args.reps, args.seed);
        const MonteCarloEstimate bound =
            bias_bound_mc(model, n, args.bound_reps, Rng::derive(args.seed, 0xB1A5));
        // bias_bound_mc is stated for the half-sum estimator; the
        // mean-difference estimator reported by empirical_bias is twice that.
        const double bound_md = 2.0 * bound.value;
        const double slack = 3.0 * (bias.std_error + 2.0 * bound.std_error);
        const bool ok = std::abs(bias.value) <= bound_md + slack;
        const double ru = bias_rate({BiasDistribution::Uniform, n});
        const double rn = bias_rate({BiasDistribution::Normal, n});
        const double rs = bias_rate({BiasDistribution::ShiftedPoisson, n});
        csv += std::to_string(n) + ',' + format_double(bias.value) + ',' +
               format_double(bias.std_error) + ',' + format_double(bound.value) + ',' +
               format_double(bound_md) + ',' + format_double(ru) + ',' + format_double(rn) +
               ',' + format_double(rs) + ',' + (ok ? "1" : "0") + '\n';
        if (args.format == "text") {
            char buf[160];
            std::snprintf(buf, sizeof(buf),
                          "%-7zu  %10.6f  %9.6f  %10.6f  %10.6f  %10.6f  %10.6f  %s\n", n,
                          bias.value, bias.std_error, bound_md, ru, rn, rs, ok ? "yes" : "NO");
            std::cout << buf;
        }
    }
    if (args.format == "csv") std::cout << csv;
    if (!args.output.empty()) write_file_atomic(args.output, csv);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"COSS: covariate-ordered experiment allocation and analysis"};
    app.require_subcommand(1);

    AllocateArgs alloc_args;
    CLI::App* alloc = app.add_subcommand("allocate", "Assign units in a CSV to T/C arms");
    alloc->add_option("--input", alloc_args.input, "units CSV")->required();
    alloc->add_option("--output", alloc_args.output, "allocation CSV path");
    alloc->add_option("--id-col", alloc_args.id_col, "id column name");
    alloc->add_option("--covariate-col", alloc_args.covariate_col, "covariate column name");
    alloc->add_option("--strategy", alloc_args.strategy, "coss | rct")
        ->check(CLI::IsMember({"coss", "rct"}));
    alloc->add_option("--seed", alloc_args.seed, "allocation seed");
    alloc->add_flag("--control-first", alloc_args.control_first,
                    "give the top-ranked unit to Control (COSS only)");

    EstimateArgs est_args;
    CLI::App* est =
        app.add_subcommand("estimate", "Estimate the effect from allocation + outcomes");
    est->add_option("--allocation", est_args.allocation, "allocation CSV")->required();
    est->add_option("--outcomes", est_args.outcomes, "outcomes CSV")->required();
    est->add_option("--id-col", est_args.id_col, "id column in outcomes CSV");
    est->add_option("--outcome-col", est_args.outcome_col, "outcome column name");
    est->add_option("--covariate-col", est_args.covariate_col, "covariate column name");
    est->add_option("--method", est_args.method, "diff-means | cuped | regression")
        ->check(CLI::IsMember({"diff-means", "cuped", "regression"}));
    est->add_option("--test", est_args.test, "t | bootstrap | none")
        ->check(CLI::IsMember({"t", "bootstrap", "none"}));
    est->add_flag("--paired", est_args.force_paired, "force the paired test family");
    est->add_flag("--independent", est_args.force_independent, "force the independent family");
    est->add_option("--resamples", est_args.resamples, "bootstrap resamples for --test bootstrap");
    est->add_option("--bootstrap-variance", est_args.bootstrap_variance_resamples,
                    "also report bootstrap variance with this many resamples");
    est->add_option("--seed", est_args.seed, "bootstrap seed");
    est->add_option("--output", est_args.output, "write the CSV report here");
    est->add_option("--format", est_args.format, "stdout format")
        ->check(CLI::IsMember({"text", "csv"}));

    SimulateArgs sim_args;
    CLI::App* sim = app.add_subcommand("simulate", "Run a replicated simulation study");
    sim->add_option("--preset", sim_args.preset, "bundled scenario")
        ->check(CLI::IsMember(preset_names()));
    sim->add_option("--config", sim_args.config_path, "JSON config (overrides --preset)");
    sim->add_option("--replications", sim_args.replications, "override replication count");
    sim->add_option("--sample-size", sim_args.sample_size, "override sample size");
    sim->add_option("--seed", sim_args.seed, "override the config seed");
    sim->add_option("--threads", sim_args.threads, "worker threads (0 = hardware)");
    sim->add_option("--output", sim_args.output, "directory for summary + histogram CSVs");
    sim->add_option("--format", sim_args.format, "stdout format")
        ->check(CLI::IsMember({"text", "csv"}));
    sim->add_option("--bins", sim_args.bins, "histogram bins");
    sim->add_option("--dump-population", sim_args.dump_population,
                    "also write the generated population (id,x,y0,y1) to this CSV");

    SimulateArgs aa_args;
    aa_args.preset = "aa.default";
    CLI::App* aa = app.add_subcommand("aa-test", "Run the no-effect pipeline (type-1 error)");
    aa->add_option("--preset", aa_args.preset, "bundled scenario")
        ->check(CLI::IsMember(preset_names()));
    aa->add_option("--config", aa_args.config_path, "JSON config (overrides --preset)");
    aa->add_option("--replications", aa_args.replications, "override replication count");
    aa->add_option("--sample-size", aa_args.sample_size, "override sample size");
    aa->add_option("--seed", aa_args.seed, "override the config seed");
    aa->add_option("--threads", aa_args.threads, "worker threads (0 = hardware)");
    aa->add_option("--output", aa_args.output, "directory for summary + histogram CSVs");
    aa->add_option("--format", aa_args.format, "stdout format")
        ->check(CLI::IsMember({"text", "csv"}));
    aa->add_option("--bins", aa_args.bins, "histogram bins");

    BiasArgs bias_args;
    CLI::App* bias = app.add_subcommand("bias-diagnostics",
                                        "Empirical bias vs. the order-statistic bound");
    bias->add_option("--pairs", bias_args.pairs, "pair counts N to evaluate")->delimiter(',');
    bias->add_option("--slope", bias_args.slope, "f slope");
    bias->add_option("--intercept", bias_args.intercept, "f intercept");
    bias->add_option("--noise", bias_args.noise, "outcome noise sd");
    bias->add_option("--reps", bias_args.reps, "replications for the empirical bias");
    bias->add_option("--bound-reps", bias_args.bound_reps, "replications for the bound");
    bias->add_option("--seed", bias_args.seed, "seed");
    bias->add_option("--output", bias_args.output, "CSV output path");
    bias->add_option("--format", bias_args.format, "stdout format")
        ->check(CLI::IsMember({"text", "csv"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (alloc->parsed()) return cmd_allocate(alloc_args);
        if (est->parsed()) return cmd_estimate(est_args);
        if (sim->parsed()) return cmd_simulate(sim_args);
        if (aa->parsed()) return cmd_aa_test(aa_args);
        if (bias->parsed()) return cmd_bias_diagnostics(bias_args);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return 3;
    }
    return 0;
}
