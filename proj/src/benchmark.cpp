#include "ggd/benchmark.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <ostream>
#include <thread>

#include "ggd/error.hpp"
#include "ggd/format.hpp"
#include "ggd/rng.hpp"

namespace ggd {

std::string_view to_string(ParamName p) {
    switch (p) {
        case ParamName::Gamma: return "gamma";
        case ParamName::Beta: return "beta";
        case ParamName::Rho: return "rho";
    }
    return "unknown";
}

ParamName parse_param_name(std::string_view name) {
    if (name == "gamma") return ParamName::Gamma;
    if (name == "beta") return ParamName::Beta;
    if (name == "rho") return ParamName::Rho;
    throw InvalidArgument("unknown parameter '" + std::string(name) + "'");
}

void ExperimentConfig::validate() const {
    truth.validate();
    fit.validate();
    if (realizations < 2) throw InvalidArgument("experiment: realizations must be at least 2");
    if (sample_sizes.empty()) throw InvalidArgument("experiment: sample_sizes is empty");
    if (!std::is_sorted(sample_sizes.begin(), sample_sizes.end())) {
        throw InvalidArgument("experiment: sample_sizes must be sorted ascending");
    }
    if (sample_sizes.front() < 3) throw InvalidArgument("experiment: sample sizes must be >= 3");
    if (methods.empty()) throw InvalidArgument("experiment: no methods selected");
    if (jobs < 1) throw InvalidArgument("experiment: jobs must be at least 1");
}

std::uint64_t realization_seed(std::uint64_t seed, std::size_t n, std::size_t i,
                               std::size_t sweep_index) {
    return derive_seed(seed, 0x5eedULL, sweep_index, n, i);
}

MetricRow summarize(const GgdParams& truth, const std::vector<GgdParams>& estimates) {
    MetricRow row;
    row.truth = truth;
    const double m = static_cast<double>(estimates.size());
    if (estimates.empty()) {
        const double nan = std::nan("");
        row.bias = row.variance = row.rmse = row.root_rmse = Vec3::Constant(nan);
        return row;
    }
    const Vec3 t = to_vec(truth);
    Vec3 mean = Vec3::Zero();
    for (const auto& e : estimates) mean += to_vec(e);
    mean /= m;
    Vec3 var = Vec3::Zero();
    for (const auto& e : estimates) var += (to_vec(e) - mean).cwiseAbs2();
    var /= m;
    row.bias = t - mean;
    row.variance = var;
    row.rmse = row.bias.cwiseAbs2() + row.variance;
    row.root_rmse = row.rmse.cwiseSqrt();
    return row;
}

namespace {

struct Outcome {
    bool ok = false;
    GgdParams params;
    double elapsed = 0.0;
};

// Runs every realization of one (truth, n) cell for every method. Samples are
// drawn once per realization and shared across methods.
std::vector<MetricRow> run_cell(const ExperimentConfig& cfg, const GgdParams& truth,
                                std::size_t n, std::size_t sweep_index,
                                const Estimator& estimator) {
    const std::size_t nm = cfg.methods.size();
    const std::size_t reps = cfg.realizations;
    std::vector<Outcome> outcomes(nm * reps);

    const auto work = [&](std::size_t i) {
        const Sample s = sample(truth, n, realization_seed(cfg.seed, n, i, sweep_index));
        for (std::size_t k = 0; k < nm; ++k) {
            Outcome& o = outcomes[k * reps + i];
            try {
                const FitResult r = estimator ? estimator(cfg.methods[k], s, cfg.fit)
                                              : fit(cfg.methods[k], s, cfg.fit);
                o.ok = r.converged && r.params.valid();
                o.params = r.params;
                o.elapsed = r.elapsed;
            } catch (const Error&) {
                o.ok = false;
            }
        }
    };

    if (cfg.jobs <= 1) {
        for (std::size_t i = 0; i < reps; ++i) work(i);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::jthread> pool;
        for (std::size_t j = 0; j < cfg.jobs; ++j) {
            pool.emplace_back([&] {
                for (std::size_t i = next++; i < reps; i = next++) work(i);
            });
        }
    }

    std::vector<MetricRow> rows;
    for (std::size_t k = 0; k < nm; ++k) {
        std::vector<GgdParams> good;
        double elapsed = 0.0;
        for (std::size_t i = 0; i < reps; ++i) {
            const Outcome& o = outcomes[k * reps + i];
            if (o.ok) {
                good.push_back(o.params);
                elapsed += o.elapsed;
            }
        }
        MetricRow row = summarize(truth, good);
        row.method = cfg.methods[k];
        row.n = n;
        row.realizations = reps;
        row.failures = reps - good.size();
        row.convergence_rate = static_cast<double>(good.size()) / static_cast<double>(reps);
        row.mean_elapsed = good.empty() ? std::nan("") : elapsed / static_cast<double>(good.size());
        rows.push_back(row);
    }
    return rows;
}

GgdParams with_value(GgdParams p, ParamName name, double v) {
    switch (name) {
        case ParamName::Gamma: p.gamma = v; break;
        case ParamName::Beta: p.beta = v; break;
        case ParamName::Rho: p.rho = v; break;
    }
    return p;
}

}  // namespace

std::vector<MetricRow> run_experiment(const ExperimentConfig& cfg, const Estimator& estimator) {
    cfg.validate();
    std::vector<MetricRow> rows;
    for (std::size_t n : cfg.sample_sizes) {
        auto cell = run_cell(cfg, cfg.truth, n, 0, estimator);
        rows.insert(rows.end(), cell.begin(), cell.end());
    }
    return rows;
}

std::vector<MetricRow> run_sweep(const ExperimentConfig& cfg, const Estimator& estimator) {
    cfg.validate();
    if (!cfg.sweep || cfg.sweep->values.size() < 2) {
        throw InvalidArgument("sweep: at least two sweep values required");
    }
    std::vector<MetricRow> rows;
    for (std::size_t v = 0; v < cfg.sweep->values.size(); ++v) {
        const double value = cfg.sweep->values[v];
        const GgdParams truth = with_value(cfg.truth, cfg.sweep->parameter, value);
        truth.validate();
        for (std::size_t n : cfg.sample_sizes) {
            auto cell = run_cell(cfg, truth, n, v + 1, estimator);
            for (auto& r : cell) {
                r.sweep_param = cfg.sweep->parameter;
                r.sweep_value = value;
            }
            rows.insert(rows.end(), cell.begin(), cell.end());
        }
    }
    return rows;
}

void write_metrics_csv(std::ostream& os, const std::vector<MetricRow>& rows) {
    os << "method,n,sweep_param,sweep_value,bias_g,bias_b,bias_r,var_g,var_b,var_r,"
          "rmse_g,rmse_b,rmse_r,time_s,conv_rate\n";
    for (const auto& r : rows) {
        os << to_string(r.method) << ',' << r.n << ','
           << (r.sweep_param ? to_string(*r.sweep_param) : std::string_view{}) << ','
           << (r.sweep_param ? fmt_double(r.sweep_value) : std::string{});
        for (const Vec3* v : {&r.bias, &r.variance, &r.rmse}) {
            for (int k = 0; k < 3; ++k) os << ',' << fmt_double((*v)[k]);
        }
        os << ',' << fmt_double(r.mean_elapsed) << ',' << fmt_double(r.convergence_rate) << '\n';
    }
}

}  // namespace ggd
