#include <doctest.h>

#include <boost/math/quadrature/tanh_sinh.hpp>

#include <cmath>
#include <limits>
#include <numbers>

#include "ggd/distribution.hpp"
#include "ggd/error.hpp"
#include "ggd/rng.hpp"
#include "ggd/special.hpp"
#include "oracles.hpp"

using namespace ggd;

namespace {

struct Moments {
    double mean, var, skew;
};

Moments moments(std::span<const double> v) {
    const double n = static_cast<double>(v.size());
    double m = 0;
    for (double x : v) m += x;
    m /= n;
    double m2 = 0, m3 = 0;
    for (double x : v) {
        const double d = x - m;
        m2 += d * d;
        m3 += d * d * d;
    }
    m2 /= n;
    m3 /= n;
    return {m, m2, m3 / std::pow(m2, 1.5)};
}

}  // namespace

TEST_SUITE("special functions") {
    TEST_CASE("known constants") {
        CHECK(digamma(1.0) == doctest::Approx(-0.5772156649015329).epsilon(1e-14));
        CHECK(trigamma(1.0) == doctest::Approx(std::numbers::pi * std::numbers::pi / 6).epsilon(1e-14));
        CHECK(trigamma(3.0) ==
              doctest::Approx(std::numbers::pi * std::numbers::pi / 6 - 1.25).epsilon(1e-14));
        CHECK(std::abs(ln_gamma(1.0)) <= 1e-13);
        CHECK(ln_gamma(0.5) == doctest::Approx(0.5 * std::log(std::numbers::pi)).epsilon(1e-14));
    }

    TEST_CASE("absolute error against 50-digit references") {
        const double zs[] = {1e-3, 0.01, 0.1, 0.3, 0.5, 0.9, 1.0, 1.5, 2.0, 2.5, 3.7,
                             5.0, 7.25, 9.99, 10.0, 12.5, 20.0, 33.3, 50.0, 100.0, 1000.0};
        for (double z : zs) {
            CAPTURE(z);
            CHECK(std::abs(digamma(z) - oracle::digamma(z)) <= 1e-12);
            CHECK(std::abs(trigamma(z) - oracle::trigamma(z)) <= 1e-12 * std::max(1.0, oracle::trigamma(z)));
            CHECK(std::abs(ln_gamma(z) - oracle::ln_gamma(z)) <= 1e-12 * std::max(1.0, std::abs(oracle::ln_gamma(z))));
        }
    }

    TEST_CASE("incomplete gamma against reference") {
        const double as[] = {0.1, 0.5, 1.0, 2.5, 4.0, 10.0, 50.0, 300.0};
        const double xs[] = {0.0, 1e-4, 0.1, 0.9, 1.0, 2.0, 4.5, 10.0, 49.0, 55.0, 120.0, 330.0};
        for (double a : as) {
            for (double x : xs) {
                CAPTURE(a);
                CAPTURE(x);
                const double ref = oracle::gamma_p(a, x);
                CHECK(std::abs(reg_inc_gamma(a, x) - ref) <= 1e-12);
                CHECK(std::abs(reg_inc_gamma_upper(a, x) - (1.0 - ref)) <= 1e-12);
            }
        }
    }

    TEST_CASE("incomplete beta against reference") {
        const double as[] = {0.5, 1.0, 2.0, 8.5, 18.3, 40.0};
        const double bs[] = {0.5, 1.0, 3.0, 12.0};
        const double xs[] = {0.0, 0.01, 0.2, 0.5, 0.77, 0.95, 0.999, 1.0};
        for (double a : as) {
            for (double b : bs) {
                for (double x : xs) {
                    CAPTURE(a);
                    CAPTURE(b);
                    CAPTURE(x);
                    CHECK(std::abs(reg_inc_beta(a, b, x) - oracle::ibeta(a, b, x)) <= 1e-12);
                }
            }
        }
    }

    TEST_CASE("recurrences") {
        for (double z = 0.05; z < 40.0; z *= 1.37) {
            CAPTURE(z);
            CHECK(std::abs(digamma(z + 1) - (digamma(z) + 1 / z)) <= 1e-12 * std::max(1.0, 1 / z));
            CHECK(std::abs(trigamma(z + 1) - (trigamma(z) - 1 / (z * z))) <=
                  1e-12 * std::max(1.0, 1 / (z * z)));
        }
    }

    TEST_CASE("domain errors") {
        CHECK_THROWS_AS((void)digamma(0.0), InvalidArgument);
        CHECK_THROWS_AS((void)trigamma(-1.0), InvalidArgument);
        CHECK_THROWS_AS((void)ln_gamma(-0.5), InvalidArgument);
        CHECK_THROWS_AS((void)reg_inc_gamma(0.0, 1.0), InvalidArgument);
        CHECK_THROWS_AS((void)reg_inc_gamma(1.0, -1.0), InvalidArgument);
        CHECK_THROWS_AS((void)reg_inc_beta(1.0, 1.0, 1.5), InvalidArgument);
        CHECK_THROWS_AS((void)reg_inc_beta(0.0, 1.0, 0.5), InvalidArgument);
        CHECK_THROWS_AS((void)digamma(std::nan("")), InvalidArgument);
    }
}

TEST_SUITE("distribution") {
    TEST_CASE("parameter validation") {
        CHECK(GgdParams{2, 15, 4}.valid());
        CHECK_FALSE(GgdParams{0, 0, 1}.valid());
        CHECK_FALSE(GgdParams{0, 1, -1}.valid());
        CHECK_FALSE(GgdParams{INFINITY, 1, 1}.valid());
        CHECK_THROWS_AS(GgdParams({0, -1, 1}).validate(), InvalidArgument);
        CHECK_THROWS_AS(Sample(std::vector<double>{}), InvalidArgument);
        CHECK_THROWS_AS(Sample(std::vector<double>{1.0, NAN}), InvalidArgument);
        const Sample s({3.0, 1.0, 2.0});
        CHECK(s.min() == 1.0);
        CHECK(s.max() == 3.0);
        CHECK(s.size() == 3);
    }

    TEST_CASE("pdf examples") {
        CHECK(pdf(1.0, {0, 1, 1}) == doctest::Approx(std::exp(-1.0)).epsilon(1e-15));
        CHECK(pdf(2.0, {2, 15, 4}) == 0.0);
        const double ref = 27.0 * std::exp(-0.2) / (std::pow(15.0, 4) * 6.0);
        CHECK(pdf(5.0, {2, 15, 4}) == doctest::Approx(ref).epsilon(1e-13));
        CHECK(ref == doctest::Approx(7.277e-5).epsilon(1e-4));
        CHECK(pdf(5.0, {2, 15, 4}) == doctest::Approx(oracle::pdf(5.0, 2, 15, 4)).epsilon(1e-13));
    }

    TEST_CASE("log_pdf examples") {
        CHECK(log_pdf(1.0, {0, 1, 1}) == doctest::Approx(-1.0).epsilon(1e-14));
        CHECK(log_pdf(0.0, {0, 1, 2}) == -std::numeric_limits<double>::infinity());
        CHECK(log_pdf(5.0, {2, 15, 4}) == doctest::Approx(oracle::log_pdf(5.0, 2, 15, 4)).epsilon(1e-13));
        // large shape stays finite in log space
        CHECK(std::isfinite(log_pdf(1000.0, {0, 1, 1000})));
        CHECK(log_pdf(1000.0, {0, 1, 1000}) == doctest::Approx(oracle::log_pdf(1000.0, 0, 1, 1000)).epsilon(1e-12));
    }

    TEST_CASE("cdf examples") {
        CHECK(cdf(2.0, {2, 15, 4}) == 0.0);
        CHECK(cdf(-5.0, {2, 15, 4}) == 0.0);
        CHECK(cdf(INFINITY, {2, 15, 4}) == 1.0);
        CHECK(cdf(1.0, {0, 1, 1}) == doctest::Approx(1 - std::exp(-1.0)).epsilon(1e-14));
        double prev = 0.0;
        for (double x = 2.0; x < 300.0; x += 0.7) {
            const double c = cdf(x, {2, 15, 4});
            CHECK(c >= prev);
            CHECK(std::abs(c - oracle::cdf(x, 2, 15, 4)) <= 1e-12);
            prev = c;
        }
    }

    TEST_CASE("density integrates to one") {
        boost::math::quadrature::tanh_sinh<double> q;
        const double rhos[] = {0.5, 0.8, 1.0, 2.0, 3.5, 7.0, 12.0, 20.0};
        const double betas[] = {0.3, 1.0, 15.0};
        for (double r : rhos) {
            for (double b : betas) {
                // an integrable singularity at gamma needs exact abscissae there
                const GgdParams p{r < 1.0 ? 0.0 : -1.5, b, r};
                const double total =
                    q.integrate([&](double x) { return pdf(x, p); }, p.gamma, p.gamma + 50 * b * r);
                CAPTURE(r);
                CAPTURE(b);
                CHECK(std::abs(total - 1.0) <= 1e-8);
            }
        }
    }

    TEST_CASE("cdf derivative equals pdf") {
        const GgdParams ps[] = {{2, 15, 4}, {0, 1, 0.7}, {-3, 0.5, 9}};
        for (const auto& p : ps) {
            for (double q : {0.1, 0.3, 0.5, 0.8, 0.95}) {
                // interior point near the q-quantile of a normal approximation
                const double x = p.gamma + p.beta * p.rho * (0.2 + 2 * q);
                const double h = 1e-5 * p.beta;
                const double fd = (cdf(x + h, p) - cdf(x - h, p)) / (2 * h);
                CAPTURE(x);
                CHECK(fd == doctest::Approx(pdf(x, p)).epsilon(1e-6));
            }
        }
    }

    TEST_CASE("sampling: mean, variance, determinism") {
        const Sample s = sample({2, 15, 4}, 1'000'000, 42);
        const Moments m = moments(s.values());
        CHECK(std::abs(m.mean - 62.0) / 62.0 < 0.005);
        const Sample e = sample({0, 1, 1}, 1'000'000, 43);
        CHECK(moments(e.values()).var == doctest::Approx(1.0).epsilon(0.015));
        CHECK(sample({2, 15, 4}, 1000, 7) == sample({2, 15, 4}, 1000, 7));
        CHECK_FALSE(sample({2, 15, 4}, 1000, 7) == sample({2, 15, 4}, 1000, 8));
        for (double x : s.values()) REQUIRE(x > 2.0);
    }

    TEST_CASE("sampling: KS band and moment identities") {
        const GgdParams ps[] = {{2, 15, 4}, {0, 1, 0.3}, {0, 2, 0.9}, {-1, 0.5, 6}, {10, 3, 40}};
        std::uint64_t seed = 100;
        for (const auto& p : ps) {
            CAPTURE(p.rho);
            const Sample s = sample(p, 100'000, seed++);
            const std::vector<double> xs(s.values().begin(), s.values().end());
            const double d = oracle::ks_distance(xs, [&](double x) {
                return oracle::cdf(x, p.gamma, p.beta, p.rho);
            });
            CHECK(d < 1.63 / std::sqrt(100'000.0));
            const Moments m = moments(s.values());
            const double n = 100'000.0;
            const double sd = std::sqrt(p.variance());
            CHECK(std::abs(m.mean - p.mean()) < 5 * sd / std::sqrt(n));
            CHECK(std::abs(m.var - p.variance()) < 5 * p.variance() * std::sqrt((2 + 6 / p.rho) / n));
            // skewness error scales with sqrt(kurtosis-like terms); 10% is well outside 5 sigma
            CHECK(std::abs(m.skew - p.skewness()) < 0.1 * p.skewness() + 5 * std::sqrt(6 / n));
        }
    }

    TEST_CASE("rng primitives") {
        Rng a(5), b(5);
        for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
        Rng r(9);
        double sum = 0;
        for (int i = 0; i < 100000; ++i) {
            const double u = r.uniform();
            REQUIRE(u >= 0.0);
            REQUIRE(u < 1.0);
            sum += u;
        }
        CHECK(sum / 100000 == doctest::Approx(0.5).epsilon(0.01));
        for (int i = 0; i < 1000; ++i) REQUIRE(r.below(7) < 7);
        CHECK(derive_seed(1, 2, 3) != derive_seed(1, 3, 2));
        CHECK(derive_seed(1, 2, 3) == derive_seed(1, 2, 3));
    }
}
