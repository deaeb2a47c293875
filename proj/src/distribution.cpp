#include "ggd/distribution.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ggd/error.hpp"
#include "ggd/rng.hpp"
#include "ggd/special.hpp"

namespace ggd {

bool GgdParams::valid() const noexcept {
    return std::isfinite(gamma) && beta > 0.0 && rho > 0.0 && std::isfinite(beta) &&
           std::isfinite(rho);
}

void GgdParams::validate() const {
    if (!valid()) {
        throw InvalidArgument("GgdParams: require finite gamma, beta > 0, rho > 0");
    }
}

double GgdParams::skewness() const noexcept { return 2.0 / std::sqrt(rho); }

Sample::Sample(std::vector<double> values) : values_(std::move(values)) {
    if (values_.empty()) {
        throw InvalidArgument("Sample: at least one value required");
    }
    for (double v : values_) {
        if (!std::isfinite(v)) throw InvalidArgument("Sample: values must be finite");
    }
    const auto [lo, hi] = std::minmax_element(values_.begin(), values_.end());
    min_ = *lo;
    max_ = *hi;
}

double log_pdf(double x, const GgdParams& p) {
    p.validate();
    if (!(x > p.gamma)) return -std::numeric_limits<double>::infinity();
    const double z = x - p.gamma;
    return (p.rho - 1.0) * std::log(z) - z / p.beta - p.rho * std::log(p.beta) - ln_gamma(p.rho);
}

double pdf(double x, const GgdParams& p) {
    const double lp = log_pdf(x, p);
    return std::isinf(lp) ? 0.0 : std::exp(lp);
}

double cdf(double x, const GgdParams& p) {
    p.validate();
    if (!(x > p.gamma)) return 0.0;
    if (std::isinf(x)) return 1.0;
    return reg_inc_gamma(p.rho, (x - p.gamma) / p.beta);
}

double standard_gamma(Rng& rng, double shape) {
    if (!(shape > 0.0)) throw InvalidArgument("standard_gamma: shape must be positive");
    if (shape < 1.0) {
        // Boost: G(a) = G(a + 1) * U^(1/a).
        const double g = standard_gamma(rng, shape + 1.0);
        return g * std::pow(rng.uniform_open(), 1.0 / shape);
    }
    // Marsaglia & Tsang (2000).
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        double z, v;
        do {
            z = rng.normal();
            v = 1.0 + c * z;
        } while (v <= 0.0);
        v = v * v * v;
        const double u = rng.uniform_open();
        if (u < 1.0 - 0.0331 * z * z * z * z) return d * v;
        if (std::log(u) < 0.5 * z * z + d * (1.0 - v + std::log(v))) return d * v;
    }
}

std::vector<double> draw(const GgdParams& p, std::size_t n, Rng& rng) {
    p.validate();
    std::vector<double> out(n);
    for (auto& x : out) x = p.gamma + p.beta * standard_gamma(rng, p.rho);
    return out;
}

Sample sample(const GgdParams& p, std::size_t n, std::uint64_t seed) {
    if (n == 0) throw InvalidArgument("sample: n must be at least 1");
    Rng rng(seed);
    return Sample(draw(p, n, rng));
}

}  // namespace ggd
