#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace ggd {

class Rng;

/// Shifted three-parameter gamma law: translation, scale and shape.
///
/// Density (x - gamma)^(rho-1) exp(-(x - gamma)/beta) / (beta^rho Gamma(rho))
/// for x > gamma, zero elsewhere.
struct GgdParams {
    double gamma = 0.0;
    double beta = 1.0;
    double rho = 1.0;

    /// True when beta, rho > 0 and gamma is finite.
    [[nodiscard]] bool valid() const noexcept;
    /// Throws InvalidArgument unless valid().
    void validate() const;

    [[nodiscard]] double mean() const noexcept { return gamma + beta * rho; }
    [[nodiscard]] double variance() const noexcept { return beta * beta * rho; }
    [[nodiscard]] double skewness() const noexcept;

    friend bool operator==(const GgdParams&, const GgdParams&) = default;
};

/// A nonempty set of finite intensity observations.
class Sample {
public:
    Sample() = default;
    explicit Sample(std::vector<double> values);

    [[nodiscard]] std::span<const double> values() const noexcept { return values_; }
    [[nodiscard]] std::size_t size() const noexcept { return values_.size(); }
    [[nodiscard]] bool empty() const noexcept { return values_.empty(); }
    [[nodiscard]] double min() const noexcept { return min_; }
    [[nodiscard]] double max() const noexcept { return max_; }
    [[nodiscard]] double operator[](std::size_t i) const noexcept { return values_[i]; }

    friend bool operator==(const Sample& a, const Sample& b) { return a.values_ == b.values_; }

private:
    std::vector<double> values_;
    double min_ = 0.0;
    double max_ = 0.0;
};

[[nodiscard]] double pdf(double x, const GgdParams& p);
[[nodiscard]] double log_pdf(double x, const GgdParams& p);
[[nodiscard]] double cdf(double x, const GgdParams& p);

/// One standard gamma(shape, 1) variate.
[[nodiscard]] double standard_gamma(Rng& rng, double shape);

/// n independent draws; identical seeds give identical samples.
[[nodiscard]] Sample sample(const GgdParams& p, std::size_t n, std::uint64_t seed);
/// Same as above, drawing from a caller-owned generator.
[[nodiscard]] std::vector<double> draw(const GgdParams& p, std::size_t n, Rng& rng);

}  // namespace ggd
