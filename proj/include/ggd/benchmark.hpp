#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "ggd/estimation.hpp"

namespace ggd {

enum class ParamName { Gamma, Beta, Rho };

[[nodiscard]] std::string_view to_string(ParamName p);
[[nodiscard]] ParamName parse_param_name(std::string_view name);

struct Sweep {
    ParamName parameter = ParamName::Rho;
    std::vector<double> values;
};

struct ExperimentConfig {
    GgdParams truth{2.0, 15.0, 4.0};
    std::vector<std::size_t> sample_sizes{40, 100, 300, 1000};
    std::size_t realizations = 200;
    std::vector<Method> methods{Method::NaturalGradient, Method::Newton, Method::Analytical};
    std::uint64_t seed = 1;
    std::optional<Sweep> sweep;
    FitConfig fit;
    std::size_t jobs = 1;

    void validate() const;
};

/// Per-(method, n) accuracy summary over M realizations. `rmse` keeps the
/// historical name but is on squared-error scale (bias^2 + variance);
/// `root_rmse` is its square root.
struct MetricRow {
    Method method = Method::NaturalGradient;
    std::size_t n = 0;
    std::optional<ParamName> sweep_param;
    double sweep_value = 0.0;
    GgdParams truth;
    Vec3 bias = Vec3::Zero();
    Vec3 variance = Vec3::Zero();
    Vec3 rmse = Vec3::Zero();
    Vec3 root_rmse = Vec3::Zero();
    double mean_elapsed = 0.0;
    double convergence_rate = 0.0;
    std::size_t failures = 0;
    std::size_t realizations = 0;
};

/// Estimator hook; the default dispatches to ggd::fit.
using Estimator = std::function<FitResult(Method, const Sample&, const FitConfig&)>;

/// Seed of realization i for sample size n; independent of the method so
/// every estimator sees the same samples.
[[nodiscard]] std::uint64_t realization_seed(std::uint64_t seed, std::size_t n, std::size_t i,
                                             std::size_t sweep_index = 0);

[[nodiscard]] std::vector<MetricRow> run_experiment(const ExperimentConfig& cfg,
                                                    const Estimator& estimator = {});
[[nodiscard]] std::vector<MetricRow> run_sweep(const ExperimentConfig& cfg,
                                               const Estimator& estimator = {});

/// Metrics for a list of estimates against a known truth (exposed for tests).
[[nodiscard]] MetricRow summarize(const GgdParams& truth, const std::vector<GgdParams>& estimates);

/// CSV with the header method,n,sweep_param,sweep_value,bias_g,...,time_s,conv_rate.
void write_metrics_csv(std::ostream& os, const std::vector<MetricRow>& rows);

}  // namespace ggd
