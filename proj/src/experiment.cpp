#include "bbfgs/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "bbfgs/dataset.hpp"

namespace bbfgs {

std::string MethodSpec::label() const {
    switch (kind) {
        case MethodKind::Svrg:
            return "svrg";
        case MethodKind::Gauss:
            return "gauss_" + std::to_string(block) + "_" + std::to_string(memory);
        case MethodKind::Prev:
            return "prev_" + std::to_string(block) + "_" + std::to_string(memory);
        case MethodKind::Fact:
            return "fact_" + std::to_string(block) + "_" + std::to_string(memory);
    }
    return "unknown";
}

MethodSpec MethodSpec::parse(const std::string& token, std::size_t default_block,
                             std::size_t default_memory) {
    std::vector<std::string> parts;
    std::stringstream ss(token);
    std::string part;
    while (std::getline(ss, part, '_')) parts.push_back(part);
    if (parts.empty()) throw ConfigError("empty method name");

    MethodSpec spec;
    if (parts[0] == "svrg") {
        if (parts.size() != 1) throw ConfigError("svrg takes no parameters: " + token);
        spec.kind = MethodKind::Svrg;
        return spec;
    }
    if (parts[0] == "gauss") {
        spec.kind = MethodKind::Gauss;
    } else if (parts[0] == "prev") {
        spec.kind = MethodKind::Prev;
    } else if (parts[0] == "fact") {
        spec.kind = MethodKind::Fact;
    } else {
        throw ConfigError("unknown method '" + token + "'");
    }
    spec.block = default_block;
    spec.memory = default_memory;
    if (parts.size() >= 2) spec.block = std::stoul(parts[1]);
    if (parts.size() >= 3) spec.memory = std::stoul(parts[2]);
    if (parts.size() > 3) throw ConfigError("malformed method '" + token + "'");
    return spec;
}

std::vector<double> default_grid() {
    std::vector<double> grid = {1.0};
    double decade = 1.0;
    for (int k = 1; k <= 8; ++k) {
        decade *= 0.1;
        grid.push_back(5.0 * decade);
        grid.push_back(decade);
    }
    return grid;
}

double estimate_optimum(const std::vector<RunResult>& runs) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& run : runs) {
        for (const auto& rec : run.trace.records) {
            if (std::isfinite(rec.fvalue)) best = std::min(best, rec.fvalue);
        }
    }
    if (!std::isfinite(best)) throw AllRunsDiverged("no run produced a finite objective value");
    return best;
}

OptimizerConfig make_config(const ExperimentSpec& spec, const MethodSpec& method,
                            std::size_t dim, double eta, std::uint64_t seed) {
    const std::size_t block =
        method.block != 0
            ? method.block
            : (method.kind == MethodKind::Prev ? default_direction_window(dim)
                                               : default_sketch_size(dim));
    SketchStrategy strategy = IdentityMetric{};
    switch (method.kind) {
        case MethodKind::Svrg:
            break;
        case MethodKind::Gauss:
            strategy = GaussianSketch{std::min(block, dim)};
            break;
        case MethodKind::Prev:
            strategy = PrevDirectionsSketch{std::min(block, dim)};
            break;
        case MethodKind::Fact:
            strategy = SelfConditioningSketch{std::min(block, dim)};
            break;
    }
    OptimizerConfig cfg = spec.option_i && method.kind != MethodKind::Svrg
                              ? OptimizerConfig::option_i(strategy)
                              : OptimizerConfig::option_ii(strategy);
    if (method.kind == MethodKind::Svrg) cfg.metric_mode = MetricMode::Identity;
    cfg.eta = eta;
    cfg.seed = seed;
    cfg.memory = method.memory;
    cfg.s_size = spec.s_size;
    cfg.t_size = spec.t_size;
    cfg.max_datapasses = spec.passes_budget;
    cfg.max_outer = std::size_t(spec.passes_budget) + 2;
    return cfg;
}

ExperimentResults run_sweep(const Objective& model, const ExperimentSpec& spec) {
    if (spec.methods.empty()) throw ConfigError("no methods configured");
    if (spec.grid.empty()) throw ConfigError("empty stepsize grid");
    if (spec.seeds.empty()) throw ConfigError("no seeds configured");

    ExperimentResults results;
    for (const auto& method : spec.methods) {
        for (double eta : spec.grid) {
            for (std::uint64_t seed : spec.seeds) {
                OptimizerConfig cfg = make_config(spec, method, model.dim(), eta, seed);
                RunResult result{method.label(), eta, seed, run(model, cfg)};
                results.runs.push_back(std::move(result));
            }
        }
    }
    results.f_star = estimate_optimum(results.runs);

    // best run per method: smallest final error among non-divergent runs
    for (std::size_t i = 0; i < results.runs.size(); ++i) {
        const auto& run = results.runs[i];
        if (run.trace.diverged) continue;
        const double err = run.trace.final_fvalue() - results.f_star;
        auto it = results.best_run.find(run.method);
        if (it == results.best_run.end() ||
            err < results.runs[it->second].trace.final_fvalue() - results.f_star) {
            results.best_run[run.method] = i;
        }
    }
    return results;
}

ExperimentResults run_experiment(const ExperimentSpec& spec) {
    Dataset data = load_libsvm_file(spec.data_path, spec.d_override);
    if (spec.add_bias_feature) data = add_bias(data);
    const double reg = spec.reg > 0.0 ? spec.reg : LogisticModel::default_reg(data);
    LogisticModel model(data, reg);
    ExperimentResults results = run_sweep(model, spec);
    if (!spec.output_dir.empty()) write_csvs(results, spec);
    return results;
}

namespace {

std::string format_g17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace

void write_csvs(const ExperimentResults& results, const ExperimentSpec& spec) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(spec.output_dir, ec);
    if (ec) throw IoFailure("cannot create output directory " + spec.output_dir);

    std::map<std::string, std::ofstream> files;
    for (const auto& run : results.runs) {
        auto it = files.find(run.method);
        if (it == files.end()) {
            const auto path = fs::path(spec.output_dir) / (run.method + ".csv");
            auto [inserted, ok] = files.emplace(run.method, std::ofstream(path));
            if (!inserted->second) throw IoFailure("cannot open " + path.string());
            inserted->second << "method,eta,seed,datapasses,seconds,fvalue,error\n";
            it = inserted;
        }
        for (const auto& rec : run.trace.records) {
            it->second << run.method << ',' << format_g17(run.eta) << ',' << run.seed << ','
                       << format_g17(rec.datapasses) << ',' << format_g17(rec.seconds) << ','
                       << format_g17(rec.fvalue) << ','
                       << format_g17(rec.fvalue - results.f_star) << '\n';
        }
    }

    const auto summary_path = fs::path(spec.output_dir) / "summary.csv";
    std::ofstream summary(summary_path);
    if (!summary) throw IoFailure("cannot open " + summary_path.string());
    summary << "method,best_eta,seed,final_datapasses,final_error,f_star\n";
    for (const auto& [method, idx] : results.best_run) {
        const auto& run = results.runs[idx];
        summary << method << ',' << format_g17(run.eta) << ',' << run.seed << ','
                << format_g17(run.trace.records.back().datapasses) << ','
                << format_g17(run.trace.final_fvalue() - results.f_star) << ','
                << format_g17(results.f_star) << '\n';
    }

    if (spec.emit_plot_script) {
        std::ofstream plot(fs::path(spec.output_dir) / "plot_traces.py");
        plot << "#!/usr/bin/env python3\n"
                "\"\"\"Plot error vs datapasses and error vs seconds from the\n"
                "benchmark CSVs, one line per method at its best stepsize.\"\"\"\n"
                "import csv, sys, os\n"
                "import matplotlib.pyplot as plt\n"
                "\n"
                "out = os.path.dirname(os.path.abspath(__file__))\n"
                "best = {}\n"
                "with open(os.path.join(out, 'summary.csv')) as f:\n"
                "    for row in csv.DictReader(f):\n"
                "        best[row['method']] = (float(row['best_eta']), row['seed'])\n"
                "fig, axes = plt.subplots(1, 2, figsize=(11, 4))\n"
                "for method, (eta, seed) in sorted(best.items()):\n"
                "    passes, secs, errs = [], [], []\n"
                "    with open(os.path.join(out, method + '.csv')) as f:\n"
                "        for row in csv.DictReader(f):\n"
                "            if float(row['eta']) == eta and row['seed'] == seed:\n"
                "                passes.append(float(row['datapasses']))\n"
                "                secs.append(float(row['seconds']))\n"
                "                errs.append(max(float(row['error']), 1e-16))\n"
                "    axes[0].semilogy(passes, errs, label=method)\n"
                "    axes[1].semilogy(secs, errs, label=method)\n"
                "axes[0].set_xlabel('datapasses')\n"
                "axes[1].set_xlabel('seconds')\n"
                "for ax in axes:\n"
                "    ax.set_ylabel('f - f*')\n"
                "    ax.legend()\n"
                "fig.tight_layout()\n"
                "fig.savefig(os.path.join(out, 'traces.png'), dpi=150)\n"
                "print('wrote', os.path.join(out, 'traces.png'))\n";
    }
}

}  // namespace bbfgs
