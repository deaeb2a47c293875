// Command-line front end: fit, bench, sweep, synth, run.

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>

#include "ggd/config.hpp"
#include "ggd/error.hpp"
#include "ggd/format.hpp"
#include "ggd/io.hpp"
#include "ggd/pipeline.hpp"
#include "ggd/version.hpp"

namespace fs = std::filesystem;
using namespace ggd;

namespace {

struct Common {
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> jobs;
    std::optional<std::string> out;
};

void add_common(CLI::App* app, Common& c) {
    app->add_option("--seed", c.seed, "Override the configured seed");
    app->add_option("--jobs", c.jobs, "Worker threads")->check(CLI::PositiveNumber);
    app->add_option("--out", c.out, "Output file or directory");
}

Json load_config(const std::string& path) {
    return path == "-" ? Json::object() : parse_json_file(path);
}

Sample load_sample(const fs::path& file) {
    std::vector<double> v;
    if (file.extension() == ".pgm") {
        const GrayImage img = read_pgm(file);
        v.assign(img.pixels.begin(), img.pixels.end());
    } else {
        v = read_value_csv(file);
    }
    if (v.empty()) throw IngestError(file.string() + ": no values");
    return Sample(std::move(v));
}

void emit(const Common& c, const std::string& name, const std::string& text) {
    if (!c.out) {
        std::cout << text;
        return;
    }
    const fs::path target = fs::path(*c.out) / name;
    write_text(target, text);
    std::cerr << "wrote " << target.string() << '\n';
}

void print_metrics(const std::vector<MetricRow>& rows) {
    for (const auto& r : rows) {
        std::cerr << to_string(r.method) << " n=" << r.n;
        if (r.sweep_param) std::cerr << ' ' << to_string(*r.sweep_param) << '=' << fmt_double(r.sweep_value);
        std::cerr << " rmse=(" << fmt_fixed(r.rmse[0], 4) << ", " << fmt_fixed(r.rmse[1], 4) << ", "
                  << fmt_fixed(r.rmse[2], 4) << ") time=" << fmt_fixed(r.mean_elapsed * 1e6, 1)
                  << "us conv=" << fmt_fixed(r.convergence_rate, 3) << '\n';
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Shifted three-parameter gamma fitting and RCM-style stack analysis"};
    app.set_version_flag("--version", std::string(kVersion));
    app.require_subcommand(1);

    Common common;
    std::string stage = "cli";

    auto* fit_cmd = app.add_subcommand("fit", "Fit one image (PGM or one-value-per-line CSV)");
    std::string fit_file, fit_method = "natural_gradient", fit_config;
    bool fit_trace = false;
    fit_cmd->add_option("file", fit_file, "Input image")->required()->check(CLI::ExistingFile);
    fit_cmd->add_option("--method", fit_method, "natural_gradient | newton | analytical");
    fit_cmd->add_option("--config", fit_config, "JSON file with fit settings");
    fit_cmd->add_flag("--trace", fit_trace, "Include the iteration trace");
    add_common(fit_cmd, common);

    auto* bench_cmd = app.add_subcommand("bench", "Accuracy and timing over sample sizes");
    std::string bench_config;
    bench_cmd->add_option("config", bench_config, "Experiment JSON ('-' for defaults)")->required();
    add_common(bench_cmd, common);

    auto* sweep_cmd = app.add_subcommand("sweep", "Accuracy over a sweep of one true parameter");
    std::string sweep_config;
    sweep_cmd->add_option("config", sweep_config, "Experiment JSON with a sweep")->required();
    add_common(sweep_cmd, common);

    auto* synth_cmd = app.add_subcommand("synth", "Write a synthetic cohort in the ingest layout");
    std::string synth_spec;
    synth_cmd->add_option("spec", synth_spec, "Cohort JSON ('-' for the default cohort)")->required();
    add_common(synth_cmd, common);

    auto* run_cmd = app.add_subcommand("run", "Run the full analysis pipeline");
    std::string run_config;
    run_cmd->add_option("config", run_config, "Run JSON")->required()->check(CLI::ExistingFile);
    add_common(run_cmd, common);

    CLI11_PARSE(app, argc, argv);

    try {
        if (*fit_cmd) {
            stage = "fit";
            FitConfig cfg = fit_config.empty() ? FitConfig{} : fit_config_from_json(parse_json_file(fit_config));
            const Sample s = load_sample(fit_file);
            const FitResult r = fit(parse_method(fit_method), s, cfg);
            Json j = to_json(r, fit_trace);
            j["n"] = s.size();
            emit(common, "fit.json", j.dump(2) + "\n");
            return r.converged ? 0 : 3;
        }
        if (*bench_cmd || *sweep_cmd) {
            const bool sweep = sweep_cmd->parsed();
            stage = sweep ? "sweep" : "bench";
            ExperimentConfig cfg = experiment_from_json(load_config(sweep ? sweep_config : bench_config));
            if (common.seed) cfg.seed = *common.seed;
            if (common.jobs) cfg.jobs = *common.jobs;
            const auto rows = sweep ? run_sweep(cfg) : run_experiment(cfg);
            std::ostringstream os;
            write_metrics_csv(os, rows);
            emit(common, sweep ? "sweep.csv" : "metrics.csv", os.str());
            print_metrics(rows);
            return 0;
        }
        if (*synth_cmd) {
            stage = "synth";
            CohortSpec spec = cohort_spec_from_json(load_config(synth_spec));
            if (common.seed) spec.seed = *common.seed;
            if (!common.out) throw InvalidArgument("synth requires --out");
            const auto cohort = generate_synthetic_cohort(spec, *common.out);
            std::cerr << "wrote " << cohort.stacks.size() << " patients to " << *common.out << '\n';
            return 0;
        }
        if (*run_cmd) {
            stage = "run";
            const fs::path cfg_path = run_config;
            RunConfig cfg = run_config_from_json(parse_json_file(cfg_path), cfg_path.parent_path());
            if (common.seed) cfg.seed = *common.seed;
            if (common.jobs) cfg.jobs = *common.jobs;
            if (common.out) cfg.output_dir = *common.out;
            const RunReport rep = run(cfg);
            std::cerr << "stages:";
            for (const auto& s : rep.stages) std::cerr << ' ' << s;
            std::cerr << "\nfits: " << rep.fits.fits.size() << " ok, " << rep.fits.failures.size()
                      << " failed\n";
            for (const auto& [p, r] : rep.classification) {
                std::cerr << to_string(p) << " LOO accuracy: "
                          << (r.metrics.accuracy ? fmt_fixed(report_percent(*r.metrics.accuracy), 1) : "undefined")
                          << "%\n";
            }
            std::cerr << "reports in " << cfg.output_dir.string() << '\n';
            return 0;
        }
    } catch (const StageError& e) {
        std::cerr << "error [run/" << e.stage() << "]: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error [" << stage << "]: " << e.what() << '\n';
        return 2;
    }
    return 1;
}
