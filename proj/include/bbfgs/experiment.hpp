#pragma once

#include <map>
#include <string>
#include <vector>

#include "bbfgs/optimizer.hpp"

namespace bbfgs {

struct AllRunsDiverged : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ConfigError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};
struct IoFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class MethodKind { Svrg, Gauss, Prev, Fact };

/// One benchmark method, labeled gauss_q_M, prev_L_M, fact_q_M, or svrg.
struct MethodSpec {
    MethodKind kind;
    std::size_t block = 0;   // q (gauss/fact) or L (prev); 0 -> default
    std::size_t memory = 5;  // M
    std::string label() const;

    /// Parses "svrg", "gauss", "prev_3_5", "fact_4_2", ...
    static MethodSpec parse(const std::string& token, std::size_t default_block = 0,
                            std::size_t default_memory = 5);
};

struct ExperimentSpec {
    std::string data_path;
    std::vector<MethodSpec> methods;
    std::vector<double> grid;
    std::vector<std::uint64_t> seeds = {0};
    double passes_budget = 30.0;
    std::size_t s_size = 0;  // 0 -> ceil(sqrt(n))
    std::size_t t_size = 0;
    double reg = 0.0;  // 0 -> 1/n
    bool add_bias_feature = true;
    bool option_i = false;  // dense update + last iterate preset
    std::size_t d_override = 0;
    std::string output_dir;
    bool emit_plot_script = false;
};

struct RunResult {
    std::string method;
    double eta;
    std::uint64_t seed;
    RunTrace trace;
};

struct ExperimentResults {
    std::vector<RunResult> runs;
    double f_star;

    /// Index into runs of the best run for the method: smallest final
    /// error over non-divergent runs.
    std::map<std::string, std::size_t> best_run;
};

/// The 17-element stepsize sweep 1, 0.5, 0.1, 0.05, ..., 5e-8, 1e-8.
std::vector<double> default_grid();

/// Minimum finite recorded objective value across all runs.
double estimate_optimum(const std::vector<RunResult>& runs);

/// Builds the optimizer configuration for one (method, eta, seed) cell.
OptimizerConfig make_config(const ExperimentSpec& spec, const MethodSpec& method,
                            std::size_t dim, double eta, std::uint64_t seed);

/// Runs the full sweep against an already-built model.
ExperimentResults run_sweep(const Objective& model, const ExperimentSpec& spec);

/// Loads the data file, runs the sweep, and writes one CSV per method
/// plus summary.csv (and optionally a plot script) into output_dir.
ExperimentResults run_experiment(const ExperimentSpec& spec);

void write_csvs(const ExperimentResults& results, const ExperimentSpec& spec);

}  // namespace bbfgs
