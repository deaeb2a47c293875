#include "ggd/estimation.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <Eigen/LU>
#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <limits>
#include <string>

#include "ggd/error.hpp"
#include "ggd/special.hpp"

namespace ggd {

std::string_view to_string(Method m) {
    switch (m) {
        case Method::NaturalGradient: return "natural_gradient";
        case Method::Newton: return "newton";
        case Method::Analytical: return "analytical";
    }
    return "unknown";
}

Method parse_method(std::string_view name) {
    if (name == "natural_gradient" || name == "ng") return Method::NaturalGradient;
    if (name == "newton" || name == "nt") return Method::Newton;
    if (name == "analytical" || name == "an") return Method::Analytical;
    throw InvalidArgument("unknown estimator '" + std::string(name) + "'");
}

void FitConfig::validate() const {
    if (!(step_size > 0.0)) throw InvalidArgument("FitConfig: step_size must be positive");
    if (max_iters < 1) throw InvalidArgument("FitConfig: max_iters must be at least 1");
    if (!(rel_tol > 0.0)) throw InvalidArgument("FitConfig: rel_tol must be positive");
    if (eps_support && !(*eps_support > 0.0)) {
        throw InvalidArgument("FitConfig: eps_support must be positive");
    }
    if (!(eps_shape > 0.0)) throw InvalidArgument("FitConfig: eps_shape must be positive");
}

double FitConfig::support_margin(const Sample& s) const {
    if (eps_support) return *eps_support;
    const double range = s.max() - s.min();
    // A constant sample has no scale; fall back to a magnitude-relative margin.
    const double m = range > 0.0 ? 1e-6 * range : 1e-6 * std::max(1.0, std::fabs(s.min()));
    // never so small that min - margin rounds back onto min
    const double floor = 16.0 * std::numeric_limits<double>::epsilon() *
                         std::max(std::fabs(s.min()), std::numeric_limits<double>::min());
    return std::max(m, floor);
}

SupportSums support_sums(const Sample& s, double gamma) {
    if (!(s.min() > gamma)) {
        throw InvalidSupport("sample minimum " + std::to_string(s.min()) +
                             " is not above gamma " + std::to_string(gamma));
    }
    SupportSums t;
    t.n = s.size();
    for (double x : s.values()) {
        const double z = x - gamma;
        const double iz = 1.0 / z;
        t.sum += z;
        t.sum_inv += iz;
        t.sum_inv2 += iz * iz;
        t.sum_log += std::log(z);
    }
    return t;
}

double log_likelihood(const SupportSums& t, const GgdParams& p) {
    const double n = static_cast<double>(t.n);
    return -n * p.rho * std::log(p.beta) - n * ln_gamma(p.rho) + (p.rho - 1.0) * t.sum_log -
           t.sum / p.beta;
}

Vec3 score(const SupportSums& t, const GgdParams& p) {
    const double n = static_cast<double>(t.n);
    return {-(p.rho - 1.0) * t.sum_inv + n / p.beta,
            -n * p.rho / p.beta + t.sum / (p.beta * p.beta),
            -n * digamma(p.rho) - n * std::log(p.beta) + t.sum_log};
}

Mat3 hessian(const SupportSums& t, const GgdParams& p) {
    const double n = static_cast<double>(t.n);
    const double b = p.beta;
    Mat3 h;
    h(0, 0) = -(p.rho - 1.0) * t.sum_inv2;
    h(0, 1) = -n / (b * b);
    h(0, 2) = -t.sum_inv;
    h(1, 1) = n * p.rho / (b * b) - 2.0 * t.sum / (b * b * b);
    h(1, 2) = -n / b;
    h(2, 2) = -n * trigamma(p.rho);
    h(1, 0) = h(0, 1);
    h(2, 0) = h(0, 2);
    h(2, 1) = h(1, 2);
    return h;
}

double log_likelihood(const Sample& s, const GgdParams& p) {
    p.validate();
    return log_likelihood(support_sums(s, p.gamma), p);
}

Vec3 score(const Sample& s, const GgdParams& p) {
    p.validate();
    return score(support_sums(s, p.gamma), p);
}

Mat3 hessian(const Sample& s, const GgdParams& p) {
    p.validate();
    return hessian(support_sums(s, p.gamma), p);
}

Mat3 fisher_matrix(std::size_t n, const GgdParams& p, double eps_shape) {
    p.validate();
    if (!(p.rho > 2.0 + eps_shape)) {
        throw ShapeOutOfRange("fisher_matrix: rho must exceed 2 + eps_shape");
    }
    const double b = p.beta;
    const double r = p.rho;
    Mat3 f;
    f << 1.0 / (b * b * (r - 2.0)), 1.0 / (b * b), 1.0 / (b * (r - 1.0)),  //
        1.0 / (b * b), r / (b * b), 1.0 / b,                                //
        1.0 / (b * (r - 1.0)), 1.0 / b, trigamma(r);
    return static_cast<double>(n) * f;
}

GgdParams invert_moments(double mean, double variance, double skewness) {
    if (!(variance > 0.0)) throw InitFailure("moment inversion: variance must be positive");
    if (!(skewness > 0.0)) throw InitFailure("moment inversion: skewness must be positive");
    const double sd = std::sqrt(variance);
    return {mean - 2.0 * sd / skewness, sd * skewness / 2.0, 4.0 / (skewness * skewness)};
}

GgdParams project(const GgdParams& p, const Sample& s, const FitConfig& cfg) {
    return {std::min(p.gamma, s.min() - cfg.support_margin(s)), std::max(p.beta, 1e-12),
            std::max(p.rho, 2.0 + cfg.eps_shape)};
}

namespace {

struct Moments {
    double mean = 0.0;
    double variance = 0.0;
    double skewness = 0.0;
};

// Population (biased) central moments.
Moments sample_moments(const Sample& s) {
    const double n = static_cast<double>(s.size());
    double mean = 0.0;
    for (double x : s.values()) mean += x;
    mean /= n;
    double m2 = 0.0, m3 = 0.0;
    for (double x : s.values()) {
        const double d = x - mean;
        m2 += d * d;
        m3 += d * d * d;
    }
    m2 /= n;
    m3 /= n;
    return {mean, m2, m2 > 0.0 ? m3 / std::pow(m2, 1.5) : 0.0};
}

void require_fit_input(const Sample& s, const FitConfig& cfg) {
    cfg.validate();
    if (s.size() < 3) throw InvalidArgument("fit: at least 3 observations required");
    if (!(s.max() > s.min())) throw NumericFailure("fit: sample has zero spread");
}

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

constexpr int kMaxHalvings = 30;

// How the step multiplier evolves for the preconditioned ascent methods.
enum class StepRule {
    // theta + lambda * d with lambda fixed; halvings apply to one step only.
    Fixed,
    // theta + (lambda_t / |d|) * d; lambda_t doubles after a step accepted
    // without halving and otherwise keeps the accepted length.
    AdaptiveLength,
};

// Solve P d = g over the coordinates not held at a bound. A bound is active
// when the iterate sits on it and the gradient points out of the feasible set.
Vec3 reduced_direction(const Mat3& precond, const Vec3& g, const GgdParams& theta,
                       const Sample& s, const FitConfig& cfg) {
    const bool gamma_active = theta.gamma >= s.min() - cfg.support_margin(s) && g[0] > 0.0;
    const bool rho_active = theta.rho <= 2.0 + cfg.eps_shape && g[2] < 0.0;
    if (!gamma_active && !rho_active) {
        const Eigen::LLT<Mat3> llt(precond);
        if (llt.info() != Eigen::Success) {
            throw NumericFailure("fit: preconditioner is not positive definite");
        }
        return llt.solve(g);
    }
    using SubMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, 3, 3>;
    using SubVec = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, 3, 1>;
    std::array<int, 3> free{};
    int nfree = 0;
    for (int k = 0; k < 3; ++k) {
        if ((k == 0 && gamma_active) || (k == 2 && rho_active)) continue;
        free[nfree++] = k;
    }
    SubMat sub(nfree, nfree);
    SubVec rhs(nfree);
    for (int i = 0; i < nfree; ++i) {
        rhs[i] = g[free[i]];
        for (int j = 0; j < nfree; ++j) sub(i, j) = precond(free[i], free[j]);
    }
    const Eigen::LLT<SubMat> llt(sub);
    if (llt.info() != Eigen::Success) {
        throw NumericFailure("fit: preconditioner is not positive definite");
    }
    const SubVec x = llt.solve(rhs);
    Vec3 d = Vec3::Zero();
    for (int i = 0; i < nfree; ++i) d[free[i]] = x[i];
    return d;
}

// Shared driver for the natural-gradient and Newton methods. `precond`
// returns the positive-definite matrix P of the update direction P^{-1} g.
template <typename Precond>
FitResult ascend(Method method, const Sample& s, const FitConfig& cfg,
                 std::optional<GgdParams> start, StepRule rule, Precond precond) {
    const auto t0 = Clock::now();
    require_fit_input(s, cfg);
    FitResult r;
    r.method = method;
    GgdParams theta = project(start ? *start : initial_guess(s, cfg), s, cfg);
    SupportSums sums = support_sums(s, theta.gamma);
    double ll = log_likelihood(sums, theta);
    if (!std::isfinite(ll)) throw NumericFailure("fit: non-finite initial log-likelihood");
    r.trace.push_back({0, theta, ll});

    double lambda = cfg.step_size;
    for (std::size_t it = 1; it <= cfg.max_iters; ++it) {
        const Vec3 g = score(sums, theta);
        const Vec3 d = reduced_direction(precond(sums, theta), g, theta, s, cfg);
        if (!d.allFinite()) throw NumericFailure("fit: non-finite update direction");
        const double dnorm = d.norm();
        if (dnorm == 0.0) {
            r.converged = true;
            break;
        }
        double mult = rule == StepRule::Fixed ? lambda : lambda / dnorm;
        int halvings = 0;
        bool accepted = false;
        GgdParams cand;
        SupportSums cand_sums;
        double cand_ll = 0.0;
        for (; halvings <= kMaxHalvings; ++halvings, mult *= 0.5) {
            cand = project(from_vec(to_vec(theta) + mult * d), s, cfg);
            cand_sums = support_sums(s, cand.gamma);
            cand_ll = log_likelihood(cand_sums, cand);
            if (std::isfinite(cand_ll) && cand_ll >= ll) {
                accepted = true;
                break;
            }
        }
        if (!accepted) {
            // No ascent left at this resolution: a (possibly constrained) maximum.
            r.converged = true;
            break;
        }
        if (rule == StepRule::AdaptiveLength) {
            const double len = mult * dnorm;
            lambda = halvings == 0 ? 2.0 * len : len;
        }
        const double rel = std::fabs(cand_ll - ll) / std::max(std::fabs(ll), 1e-300);
        theta = cand;
        sums = cand_sums;
        ll = cand_ll;
        r.iterations = it;
        r.trace.push_back({it, theta, ll});
        if (rel < cfg.rel_tol) {
            r.converged = true;
            break;
        }
    }
    r.params = theta;
    r.log_likelihood = ll;
    r.elapsed = seconds_since(t0);
    return r;
}

}  // namespace

GgdParams moment_init(const Sample& s, const FitConfig& cfg) {
    if (s.size() < 3) throw InitFailure("moment_init: at least 3 observations required");
    const Moments m = sample_moments(s);
    return project(invert_moments(m.mean, m.variance, m.skewness), s, cfg);
}

GgdParams initial_guess(const Sample& s, const FitConfig& cfg) {
    try {
        return moment_init(s, cfg);
    } catch (const InitFailure&) {
        const Moments m = sample_moments(s);
        if (!(m.variance > 0.0)) throw;
        const double sd = std::sqrt(m.variance);
        const double g = s.min() - sd;
        const double rho = std::max(2.0 + cfg.eps_shape, (m.mean - g) * (m.mean - g) / m.variance);
        return project({g, m.variance / (m.mean - g), rho}, s, cfg);
    }
}

FitResult fit_natural_gradient(const Sample& s, const FitConfig& cfg,
                               std::optional<GgdParams> start) {
    const auto precond = [](const SupportSums& t, const GgdParams& p) {
        return fisher_matrix(t.n, p, 0.0);
    };
    return ascend(Method::NaturalGradient, s, cfg, start, StepRule::AdaptiveLength, precond);
}

FitResult fit_newton(const Sample& s, const FitConfig& cfg, std::optional<GgdParams> start) {
    const auto precond = [](const SupportSums& t, const GgdParams& p) -> Mat3 {
        // A = -H^{-1}; when -H is not positive definite, shift its spectrum
        // (Levenberg) until it is, so the step remains an ascent direction.
        const Mat3 neg_h = -hessian(t, p);
        const double base = std::max(neg_h.diagonal().cwiseAbs().maxCoeff(), 1e-300);
        double mu = 0.0;
        for (int k = 0; k < 40; ++k) {
            const Mat3 m = neg_h + mu * Mat3::Identity();
            if (Eigen::LLT<Mat3>(m).info() == Eigen::Success) return m;
            mu = (mu == 0.0) ? 1e-10 * base : mu * 10.0;
        }
        throw NumericFailure("newton: Hessian could not be regularized");
    };
    return ascend(Method::Newton, s, cfg, start, StepRule::Fixed, precond);
}

ProfilePoint profile_at(const SupportSums& t) {
    const double n = static_cast<double>(t.n);
    const double q = t.sum * t.sum_inv;
    const double p = q - n * n;
    return {p / (n * t.sum_inv), q / p};
}

namespace {

// Left-hand side of the rho-stationarity equation along the profile
// (beta(gamma), rho(gamma)), and its derivative in gamma.
struct ProfileEval {
    double value = 0.0;
    double slope = 0.0;
    ProfilePoint point;
    SupportSums sums;
};

// Beyond this shape the profile has run off toward the Gaussian limit.
constexpr double kMaxProfileShape = 1e8;

ProfileEval eval_profile(const Sample& s, double gamma) {
    ProfileEval e;
    e.sums = support_sums(s, gamma);
    const SupportSums& t = e.sums;
    const double n = static_cast<double>(t.n);
    const double q = t.sum * t.sum_inv;
    const double p = q - n * n;
    e.point = profile_at(t);
    if (!(p > 0.0) || !(e.point.beta > 0.0)) {
        e.value = std::numeric_limits<double>::quiet_NaN();
        return e;
    }
    const double beta = e.point.beta;
    const double rho = e.point.rho;
    e.value = -n * digamma(rho) - n * std::log(beta) + t.sum_log;
    // d/dgamma of sum, sum_inv, sum_log: -n, sum_inv2, -sum_inv.
    const double dq = -n * t.sum_inv + t.sum * t.sum_inv2;
    const double drho = -n * n * dq / (p * p);
    const double dbeta = (dq * t.sum_inv - p * t.sum_inv2) / (n * t.sum_inv * t.sum_inv);
    e.slope = -n * trigamma(rho) * drho - n * dbeta / beta - t.sum_inv;
    return e;
}

}  // namespace

FitResult fit_analytical(const Sample& s, const FitConfig& cfg, std::optional<GgdParams> start) {
    const auto t0 = Clock::now();
    require_fit_input(s, cfg);
    FitResult r;
    r.method = Method::Analytical;

    const double hi = s.min() - cfg.support_margin(s);
    const double x0 = project(start ? *start : initial_guess(s, cfg), s, cfg).gamma;
    const auto usable = [](const ProfileEval& e) {
        return std::isfinite(e.value) && e.point.rho <= kMaxProfileShape;
    };

    // Bracket a sign change on (-inf, hi]. Usually the start and the support
    // bound already straddle the root; otherwise widen to the left, then
    // probe points geometrically closer to the bound.
    ProfileEval e0 = eval_profile(s, x0);
    ProfileEval e_hi = eval_profile(s, hi);
    if (!usable(e0) || !usable(e_hi)) {
        throw NumericFailure("analytical: profile undefined at the initial bracket");
    }
    double lo = x0, up = hi;
    double f_lo = e0.value;
    if ((f_lo > 0.0) == (e_hi.value > 0.0)) {
        const double w0 = std::max(hi - x0, 1e-3 * (s.max() - s.min()));
        bool found = false;
        double prev = x0;
        for (int k = 1; k <= 60 && !found; ++k) {
            const double g = hi - w0 * std::ldexp(1.0, k);
            const ProfileEval e = eval_profile(s, g);
            if (!usable(e)) break;
            if ((e.value > 0.0) != (f_lo > 0.0)) {
                lo = g, up = prev, f_lo = e.value, found = true;
            }
            prev = g;
        }
        prev = x0;
        for (int k = 1; k <= 60 && !found; ++k) {
            const double g = hi - (hi - x0) * std::ldexp(1.0, -k);
            const ProfileEval e = eval_profile(s, g);
            if (!usable(e)) continue;
            if ((e.value > 0.0) != (f_lo > 0.0)) {
                lo = prev, up = g, found = true;
            }
            prev = g;
        }
        if (!found) {
            throw NumericFailure("analytical: no sign change of the profile equation (best gamma " +
                                 std::to_string(0.5 * (x0 + hi)) + ")");
        }
    }
    const bool lo_positive = f_lo > 0.0;

    // Damped Newton with bisection whenever the iterate leaves the bracket.
    double x = (x0 >= lo && x0 <= up) ? x0 : 0.5 * (lo + up);
    double prev_ll = -std::numeric_limits<double>::infinity();
    for (std::size_t it = 0;; ++it) {
        const ProfileEval e = eval_profile(s, x);
        if (!usable(e)) {
            throw NumericFailure("analytical: profile undefined near gamma = " + std::to_string(x));
        }
        ((e.value > 0.0) == lo_positive ? lo : up) = x;
        const GgdParams cur{x, e.point.beta, e.point.rho};
        const double ll = log_likelihood(e.sums, cur);
        r.trace.push_back({it, cur, ll});
        r.iterations = it;
        const bool small_change =
            std::isfinite(prev_ll) && std::fabs(ll - prev_ll) < cfg.rel_tol * std::fabs(ll);
        const bool collapsed = up - lo <= 4.0 * std::numeric_limits<double>::epsilon() *
                                             std::max({std::fabs(lo), std::fabs(up), 1.0});
        if (e.value == 0.0 || small_change || collapsed) {
            r.converged = true;
            break;
        }
        if (it >= cfg.max_iters) break;
        prev_ll = ll;
        double next = x - cfg.step_size * e.value / e.slope;
        if (!std::isfinite(next) || !(next > lo && next < up)) next = 0.5 * (lo + up);
        x = next;
    }
    r.params = r.trace.back().params;
    r.log_likelihood = r.trace.back().log_likelihood;
    r.elapsed = seconds_since(t0);
    return r;
}

FitResult fit(Method m, const Sample& s, const FitConfig& cfg) {
    switch (m) {
        case Method::NaturalGradient: return fit_natural_gradient(s, cfg);
        case Method::Newton: return fit_newton(s, cfg);
        case Method::Analytical: return fit_analytical(s, cfg);
    }
    throw InvalidArgument("fit: unknown method");
}

}  // namespace ggd
