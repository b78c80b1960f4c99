#include <CLI11.hpp>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "spectrace/errors.hpp"
#include "spectrace/pipeline.hpp"
#include "spectrace/reference.hpp"
#include "spectrace/rng.hpp"
#include "spectrace/version.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitNumeric = 3;

constexpr const char* kCsvHeader = "matrix,function,degree,mode,trial,seed,estimate,stderr,matvecs";

struct CommonFlags {
    std::string matrix_path;
    std::string function = "exp";
    int degree = 50;
    bool gram = false;
    double gram_shift = 0.0;
    std::uint64_t seed = 0;
    std::string interval = "power";
    std::vector<double> interval_bounds;
    int power_iterations = 100;
    double safety = 0.01;
    bool no_symmetry_trick = false;
    int threads = 1;
    int pilot = 10;
    bool no_reuse_pilot = false;
};

void add_common_flags(CLI::App* cmd, CommonFlags& flags) {
    cmd->add_option("--matrix", flags.matrix_path, "Matrix Market file")->required();
    cmd->add_option("--fn", flags.function, "Function: log|sqrt|exp|cube|power:<p>");
    cmd->add_option("--degree", flags.degree, "Interpolation degree n");
    cmd->add_flag("--gram", flags.gram, "Operate on A^T A + shift I instead of A");
    cmd->add_option("--gram-shift", flags.gram_shift, "Shift for the Gram operator");
    cmd->add_option("--seed", flags.seed, "Probe stream seed")->envname("TRACE_MLMC_SEED");
    cmd->add_option("--interval", flags.interval, "Spectral interval method: gershgorin|power");
    cmd->add_option("--interval-bounds", flags.interval_bounds,
                    "Explicit spectral interval: lo hi")
        ->expected(2);
    cmd->add_option("--power-iterations", flags.power_iterations, "Power iteration count");
    cmd->add_option("--safety", flags.safety, "Interval inflation per side");
    cmd->add_flag("--no-symmetry-trick", flags.no_symmetry_trick,
                  "Use n matvecs per sample instead of ceil(n/2)");
    cmd->add_option("--threads", flags.threads, "Worker threads (results are thread-count invariant)");
    cmd->add_option("--pilot", flags.pilot, "Pilot sample count");
    cmd->add_flag("--no-reuse-pilot", flags.no_reuse_pilot,
                  "Do not recycle pilot rows as top-level samples");
}

spectrace::EstimateJob make_job(const CommonFlags& flags) {
    spectrace::EstimateJob job;
    job.function = spectrace::FunctionSpec::parse(flags.function);
    job.degree = flags.degree;
    job.gram = flags.gram;
    job.gram_shift = flags.gram_shift;
    job.seed = flags.seed;
    job.pilot_samples = flags.pilot;
    job.reuse_pilot = !flags.no_reuse_pilot;
    job.symmetry_trick = !flags.no_symmetry_trick;
    job.threads = flags.threads;
    job.power_options.iterations = flags.power_iterations;
    job.power_options.safety = flags.safety;
    if (!flags.interval_bounds.empty()) {
        job.interval_override = {flags.interval_bounds[0], flags.interval_bounds[1]};
    } else if (flags.interval == "gershgorin") {
        job.interval_method = spectrace::IntervalMethod::gershgorin;
    } else if (flags.interval == "power") {
        job.interval_method = spectrace::IntervalMethod::power_iteration;
    } else {
        throw spectrace::DomainError("unknown interval method '" + flags.interval + "'");
    }
    return job;
}

bool parse_mode(const std::string& text, spectrace::EstimateJob& job) {
    if (text == "single") {
        job.mode = spectrace::EstimatorMode::single_level;
        return true;
    }
    if (text == "multilevel") {
        job.mode = spectrace::EstimatorMode::multilevel;
        return true;
    }
    if (text.rfind("fixed-levels:", 0) == 0) {
        job.mode = spectrace::EstimatorMode::fixed_levels;
        std::stringstream ss(text.substr(13));
        std::string item;
        while (std::getline(ss, item, ',')) {
            try {
                job.fixed_levels.push_back(std::stoi(item));
            } catch (const std::exception&) {
                return false;
            }
        }
        return !job.fixed_levels.empty();
    }
    return false;
}

std::string csv_row(const std::string& matrix, const std::string& fn, int degree,
                    const std::string& mode, int trial, std::uint64_t seed, double estimate,
                    double stderr_value, std::int64_t matvecs) {
    std::ostringstream os;
    os.precision(17);
    os << matrix << "," << fn << "," << degree << "," << mode << "," << trial << "," << seed << ","
       << estimate << "," << stderr_value << "," << matvecs;
    return os.str();
}

void append_csv(const std::string& path, const std::string& row) {
    const bool fresh = !std::ifstream(path).good();
    std::ofstream out(path, std::ios::app);
    if (!out) throw spectrace::Error("cannot open CSV output: " + path);
    if (fresh) out << kCsvHeader << "\n";
    out << row << "\n";
}

// Resolved option values of the active subcommand, for reproducibility.
std::string resolved_config(const CLI::App& cmd) {
    std::ostringstream os;
    for (const CLI::Option* opt : cmd.get_options()) {
        if (opt->get_lnames().empty()) continue;
        const std::string name = opt->get_lnames().front();
        if (name == "help") continue;
        std::string value;
        if (opt->count() > 0) {
            const auto& results = opt->results();
            for (std::size_t i = 0; i < results.size(); ++i) {
                value += (i ? " " : "") + results[i];
            }
            if (opt->get_expected_min() == 0) value = "true";  // plain flag
        } else {
            value = opt->get_default_str();
            if (value.empty()) value = opt->get_expected_min() == 0 ? "false" : "";
        }
        os << "  " << name << " = " << value << "\n";
    }
    return os.str();
}

void print_estimate_report(const CLI::App& app, const CommonFlags& flags,
                           const std::string& mode_text,
                           const spectrace::EstimateOutcome& outcome) {
    const auto& r = outcome.report;
    std::cout << "spectrace " << spectrace::kVersion << " estimate\n";
    std::cout << "  matrix:    " << flags.matrix_path << "\n";
    std::cout << "  operator:  " << outcome.operator_kind
              << " (unit cost " << outcome.cost.unit_cost << ")\n";
    std::cout << "  function:  " << flags.function << "  degree " << flags.degree << "\n";
    std::cout << "  interval:  [" << outcome.interval.lo << ", " << outcome.interval.hi << "] via "
              << outcome.interval.method;
    if (outcome.interval.matvecs_used > 0) {
        std::cout << " (" << outcome.interval.matvecs_used << " matvecs)";
    }
    std::cout << "\n";
    std::cout << "  mode:      " << mode_text << "  seed " << r.seed << "\n";
    if (r.levels.size() > 1 || mode_text != "single") {
        std::cout << "  levels:    ";
        for (const auto& level : r.levels) std::cout << level.upper << " ";
        std::cout << "\n  samples:   ";
        for (const auto& level : r.levels) std::cout << level.samples << " ";
        std::cout << "\n";
    }
    std::cout.precision(12);
    std::cout << "  estimate:  " << r.estimate << "\n";
    std::cout << "  std error: " << r.std_error << "\n";
    std::cout << "  matvecs:   " << outcome.total_matvecs << " total ("
              << outcome.pilot_matvecs << " pilot, " << r.matvecs << " estimation, "
              << outcome.interval.matvecs_used << " interval)\n";
    const CLI::App* active = app.get_subcommands().empty() ? &app : app.get_subcommands().front();
    std::cout << "[config]\n" << resolved_config(*active);
}

int run_estimate(CLI::App& app, const CommonFlags& flags, const std::string& mode_text,
                 std::int64_t samples, double budget, double target_variance,
                 const std::string& csv_path) {
    spectrace::EstimateJob job = make_job(flags);
    if (!parse_mode(mode_text, job)) {
        std::cerr << "error: bad --mode '" << mode_text << "'\n";
        return kExitUsage;
    }
    if (samples > 0) job.samples = samples;
    if (budget > 0) job.budget_matvecs = budget;
    if (target_variance > 0) job.target_variance = target_variance;

    const auto matrix = spectrace::read_matrix_market_file(flags.matrix_path);
    const auto outcome = spectrace::estimate_trace(matrix, job);
    print_estimate_report(app, flags, mode_text, outcome);
    if (!csv_path.empty()) {
        append_csv(csv_path, csv_row(flags.matrix_path, flags.function, flags.degree, mode_text, 0,
                                     flags.seed, outcome.report.estimate, outcome.report.std_error,
                                     outcome.total_matvecs));
    }
    return kExitOk;
}

int run_triangles(const CommonFlags& flags, std::int64_t samples, bool no_cv, bool exhaustive,
                  bool check_exact, const std::string& csv_path) {
    const auto matrix = spectrace::read_matrix_market_file(flags.matrix_path);
    spectrace::TriangleJob job;
    job.samples = samples;
    job.seed = flags.seed;
    job.control_variates = !no_cv;
    job.use_symmetry = !flags.no_symmetry_trick;
    job.exhaustive = exhaustive;
    job.threads = flags.threads;

    const auto outcome = spectrace::estimate_triangles(matrix, job);
    std::cout << "spectrace " << spectrace::kVersion << " triangles\n";
    std::cout << "  matrix:    " << flags.matrix_path << " (" << matrix.rows() << " nodes)\n";
    std::cout << "  samples:   " << outcome.estimate.samples
              << (exhaustive ? " (exhaustive)" : "") << "  seed " << flags.seed << "\n";
    std::cout.precision(12);
    std::cout << "  estimate:  " << outcome.estimate.count << "\n";
    std::cout << "  std error: " << outcome.estimate.std_error << "\n";
    if (!no_cv) {
        std::cout << "  fit:       a1 " << outcome.estimate.fit.a1 << ", a2 "
                  << outcome.estimate.fit.a2
                  << " (coefficients fitted on the estimation samples)\n";
    }
    std::cout << "  matvecs:   " << outcome.total_matvecs << "\n";
    if (check_exact) {
        std::cout << "  exact:     " << spectrace::reference::exact_triangle_count(matrix) << "\n";
    }
    if (!csv_path.empty()) {
        append_csv(csv_path, csv_row(flags.matrix_path, "cube", 3, no_cv ? "plain" : "cv", 0,
                                     flags.seed, outcome.estimate.count,
                                     outcome.estimate.std_error, outcome.total_matvecs));
    }
    return kExitOk;
}

int run_sweep(const CommonFlags& flags, const std::vector<int>& degrees, int trials,
              std::int64_t samples_per_trial, const std::string& modes_text,
              const std::string& output_path) {
    const auto matrix = spectrace::read_matrix_market_file(flags.matrix_path);

    std::vector<std::string> modes;
    {
        std::stringstream ss(modes_text);
        std::string item;
        while (std::getline(ss, item, ',')) modes.push_back(item);
    }

    std::ostream* out = &std::cout;
    std::ofstream file;
    if (!output_path.empty()) {
        file.open(output_path);
        if (!file) throw spectrace::Error("cannot open CSV output: " + output_path);
        out = &file;
    }
    *out << kCsvHeader << "\n";

    for (int degree : degrees) {
        for (const auto& mode : modes) {
            for (int trial = 0; trial < trials; ++trial) {
                CommonFlags trial_flags = flags;
                trial_flags.degree = degree;
                trial_flags.seed = spectrace::rng::mix(flags.seed, static_cast<std::uint64_t>(trial));
                spectrace::EstimateJob job = make_job(trial_flags);
                if (!parse_mode(mode, job)) {
                    std::cerr << "error: bad mode '" << mode << "' in --modes\n";
                    return kExitUsage;
                }
                if (job.mode == spectrace::EstimatorMode::single_level) {
                    job.samples = samples_per_trial;
                } else {
                    const spectrace::CostModel cost{job.symmetry_trick
                                                        ? spectrace::CostModel::Rule::half_degree
                                                        : spectrace::CostModel::Rule::full_degree,
                                                    job.gram ? 2 : 1};
                    job.budget_matvecs =
                        static_cast<double>(samples_per_trial) * cost.cost(-1, degree);
                }
                const auto outcome = spectrace::estimate_trace(matrix, job);
                *out << csv_row(flags.matrix_path, flags.function, degree, mode, trial,
                                trial_flags.seed, outcome.report.estimate,
                                outcome.report.std_error, outcome.total_matvecs)
                     << "\n";
            }
        }
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"spectrace: stochastic estimation of trace(f(A)) for sparse symmetric matrices"};
    app.option_defaults()->always_capture_default();
    app.require_subcommand(1);
    app.set_config("--config", "", "Config file mirroring the flags; flags take precedence");

    CommonFlags est_flags;
    std::string est_mode = "multilevel";
    std::int64_t est_samples = 0;
    double est_budget = 0.0;
    double est_target_variance = 0.0;
    std::string est_csv;
    auto* est = app.add_subcommand("estimate", "Estimate trace(f(A))");
    add_common_flags(est, est_flags);
    est->add_option("--mode", est_mode, "single | multilevel | fixed-levels:l1,l2,...");
    est->add_option("--samples", est_samples, "Sample count (single-level mode)");
    est->add_option("--budget-matvecs", est_budget, "Total matvec budget");
    est->add_option("--target-variance", est_target_variance, "Target estimator variance");
    est->add_option("--csv", est_csv, "Append one CSV result row to this file");

    CommonFlags tri_flags;
    std::int64_t tri_samples = 100;
    bool tri_no_cv = false;
    bool tri_exhaustive = false;
    bool tri_exact = false;
    std::string tri_csv;
    auto* tri = app.add_subcommand("triangles", "Estimate the triangle count of a graph");
    add_common_flags(tri, tri_flags);
    tri->add_option("--samples", tri_samples, "Probe count");
    tri->add_flag("--no-cv", tri_no_cv, "Disable the control variates");
    tri->add_flag("--exhaustive", tri_exhaustive, "Enumerate all 2^d probes (d <= 20)");
    tri->add_flag("--exact", tri_exact, "Also print the exact combinatorial count");
    tri->add_option("--csv", tri_csv, "Append one CSV result row to this file");

    CommonFlags sweep_flags;
    std::vector<int> sweep_degrees;
    int sweep_trials = 10;
    std::int64_t sweep_samples = 50;
    std::string sweep_modes = "single,multilevel";
    std::string sweep_output;
    auto* sweep = app.add_subcommand("sweep", "Degree sweep; one CSV row per (degree, mode, trial)");
    add_common_flags(sweep, sweep_flags);
    sweep->add_option("--degrees", sweep_degrees, "Degrees to sweep")->required()->delimiter(',');
    sweep->add_option("--trials", sweep_trials, "Trials per (degree, mode)");
    sweep->add_option("--samples-per-trial", sweep_samples,
                      "Single-level samples; multilevel gets the matching matvec budget");
    sweep->add_option("--modes", sweep_modes, "Comma separated: single,multilevel");
    sweep->add_option("--output", sweep_output, "CSV file (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (est->parsed()) {
            return run_estimate(app, est_flags, est_mode, est_samples, est_budget,
                                est_target_variance, est_csv);
        }
        if (tri->parsed()) {
            return run_triangles(tri_flags, tri_samples, tri_no_cv, tri_exhaustive, tri_exact,
                                 tri_csv);
        }
        if (sweep->parsed()) {
            return run_sweep(sweep_flags, sweep_degrees, sweep_trials, sweep_samples, sweep_modes,
                             sweep_output);
        }
    } catch (const spectrace::IntervalViolation& e) {
        std::cerr << "numeric failure: " << e.what() << "\n";
        return kExitNumeric;
    } catch (const spectrace::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitData;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitData;
    }
    return kExitUsage;
}
