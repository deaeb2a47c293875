#pragma once

#include <Eigen/Core>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ggd/distribution.hpp"

namespace ggd {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

/// Parameter order in every 3-vector and 3x3 matrix: (gamma, beta, rho).
[[nodiscard]] inline Vec3 to_vec(const GgdParams& p) { return {p.gamma, p.beta, p.rho}; }
[[nodiscard]] inline GgdParams from_vec(const Vec3& v) { return {v[0], v[1], v[2]}; }

enum class Method { NaturalGradient, Newton, Analytical };

[[nodiscard]] std::string_view to_string(Method m);
/// Accepts "natural_gradient", "newton", "analytical" (also the short forms "ng", "nt", "an").
[[nodiscard]] Method parse_method(std::string_view name);

struct FitConfig {
    double step_size = 0.1;
    std::size_t max_iters = 1000;
    double rel_tol = 1e-12;
    /// Distance kept between gamma and min(sample); unset means 1e-6 * (max - min).
    std::optional<double> eps_support;
    /// rho is kept above 2 + eps_shape.
    double eps_shape = 0.1;

    void validate() const;
    [[nodiscard]] double support_margin(const Sample& s) const;
};

struct TracePoint {
    std::size_t iteration = 0;
    GgdParams params;
    double log_likelihood = 0.0;
};

struct FitResult {
    GgdParams params;
    double log_likelihood = 0.0;
    std::size_t iterations = 0;
    bool converged = false;
    std::vector<TracePoint> trace;
    Method method = Method::NaturalGradient;
    double elapsed = 0.0;  // seconds, initialization included
};

// Sufficient statistics of a sample relative to a translation gamma. The
// log-likelihood, score and Hessian depend on the data only through these.
struct SupportSums {
    std::size_t n = 0;
    double sum = 0.0;       // sum (x - gamma)
    double sum_inv = 0.0;   // sum 1/(x - gamma)
    double sum_inv2 = 0.0;  // sum 1/(x - gamma)^2
    double sum_log = 0.0;   // sum log(x - gamma)
};

/// Throws InvalidSupport if any value is <= gamma.
[[nodiscard]] SupportSums support_sums(const Sample& s, double gamma);

[[nodiscard]] double log_likelihood(const SupportSums& t, const GgdParams& p);
[[nodiscard]] Vec3 score(const SupportSums& t, const GgdParams& p);
[[nodiscard]] Mat3 hessian(const SupportSums& t, const GgdParams& p);

[[nodiscard]] double log_likelihood(const Sample& s, const GgdParams& p);
[[nodiscard]] Vec3 score(const Sample& s, const GgdParams& p);
[[nodiscard]] Mat3 hessian(const Sample& s, const GgdParams& p);

/// Expected information of n observations. Throws ShapeOutOfRange when
/// rho <= 2 + eps_shape.
[[nodiscard]] Mat3 fisher_matrix(std::size_t n, const GgdParams& p, double eps_shape = 0.0);

/// Exact inverse of the shifted-gamma moment map (mean, variance, skewness).
/// Requires variance > 0 and skewness > 0.
[[nodiscard]] GgdParams invert_moments(double mean, double variance, double skewness);

/// Clamp onto the feasible set: gamma <= min - margin, rho >= 2 + eps_shape, beta >= 1e-12.
[[nodiscard]] GgdParams project(const GgdParams& p, const Sample& s, const FitConfig& cfg);

/// Skewness-inversion initializer, projected onto the feasible set.
/// Throws InitFailure for n < 3, zero variance or nonpositive skewness.
[[nodiscard]] GgdParams moment_init(const Sample& s, const FitConfig& cfg = {});

/// moment_init, falling back to a support-anchored start when skewness <= 0.
[[nodiscard]] GgdParams initial_guess(const Sample& s, const FitConfig& cfg = {});

[[nodiscard]] FitResult fit_natural_gradient(const Sample& s, const FitConfig& cfg = {},
                                             std::optional<GgdParams> start = std::nullopt);
[[nodiscard]] FitResult fit_newton(const Sample& s, const FitConfig& cfg = {},
                                   std::optional<GgdParams> start = std::nullopt);
[[nodiscard]] FitResult fit_analytical(const Sample& s, const FitConfig& cfg = {},
                                       std::optional<GgdParams> start = std::nullopt);

[[nodiscard]] FitResult fit(Method m, const Sample& s, const FitConfig& cfg = {});

/// Closed-form beta and rho solving the gamma- and beta-stationarity
/// equations at a given translation.
struct ProfilePoint {
    double beta = 0.0;
    double rho = 0.0;
};
[[nodiscard]] ProfilePoint profile_at(const SupportSums& t);

}  // namespace ggd
