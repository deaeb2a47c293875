#include <doctest.h>

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "ggd/classify.hpp"
#include "ggd/error.hpp"
#include "ggd/rng.hpp"

using namespace ggd;

namespace {

// Dual of the augmented-bias soft-margin SVM, maximized by projected gradient.
double dual_oracle(const std::vector<FeatureVector>& data, double c) {
    const std::size_t n = data.size();
    Eigen::MatrixXd q(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            double k = 1.0;
            for (std::size_t f = 0; f < data[i].features.size(); ++f) k += data[i].features[f] * data[j].features[f];
            const double yi = data[i].label == Label::Lentigo ? 1 : -1;
            const double yj = data[j].label == Label::Lentigo ? 1 : -1;
            q(i, j) = yi * yj * k;
        }
    }
    const double lmax = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(q).eigenvalues().maxCoeff();
    Eigen::VectorXd a = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
    for (int it = 0; it < 200000; ++it) {
        const Eigen::VectorXd g = Eigen::VectorXd::Ones(static_cast<Eigen::Index>(n)) - q * a;
        a = (a + g / lmax).cwiseMax(0.0).cwiseMin(c);
    }
    return a.sum() - 0.5 * a.dot(q * a);
}

std::vector<FeatureVector> blobs(std::size_t n, double sep, std::size_t dim, std::uint64_t seed) {
    Rng r(seed);
    std::vector<FeatureVector> out;
    for (std::size_t i = 0; i < n; ++i) {
        FeatureVector f;
        f.patient = "p" + std::to_string(i);
        f.label = i % 2 ? Label::Lentigo : Label::Healthy;
        for (std::size_t d = 0; d < dim; ++d)
            f.features.push_back(r.normal() + (f.label == Label::Lentigo && d == 0 ? sep : 0.0));
        out.push_back(std::move(f));
    }
    return out;
}

std::vector<PatientFeatures> cohort(std::size_t healthy, std::size_t lentigo, double sep, std::uint64_t seed) {
    Rng r(seed);
    std::vector<PatientFeatures> out;
    for (std::size_t i = 0; i < healthy + lentigo; ++i) {
        PatientFeatures p;
        p.patient = "P" + std::to_string(i);
        p.label = i < healthy ? Label::Healthy : Label::Lentigo;
        const double centre = (p.label == Label::Lentigo ? sep : 0.0) + 0.3 * r.normal();
        for (int a = 0; a < 2; ++a) p.acquisitions.push_back({150 + 10 * (centre + 0.2 * r.normal()), 4 + r.normal()});
        out.push_back(std::move(p));
    }
    return out;
}

}  // namespace

TEST_SUITE("metrics") {
    TEST_CASE("beta confusion matrix percentages") {
        const Metrics m = metrics({22, 5, 2, 16});
        CHECK(report_percent(*m.sensitivity) == 81.4);
        CHECK(report_percent(*m.specificity) == 88.8);
        CHECK(report_percent(*m.precision) == 91.6);
        CHECK(report_percent(*m.accuracy) == 84.4);
        // negative predictive value
        CHECK(report_percent(100.0 * 16 / 21) == 76.1);
    }

    TEST_CASE("rho and tree confusion matrix percentages") {
        const Metrics r = metrics({21, 6, 2, 16});
        CHECK(report_percent(*r.sensitivity) == 77.7);
        CHECK(report_percent(*r.accuracy) == 82.2);
        const Metrics t = metrics({24, 3, 5, 13});
        CHECK(report_percent(*t.sensitivity) == 88.8);
        CHECK(report_percent(*t.specificity) == 72.2);
        CHECK(report_percent(*t.precision) == 82.7);
        CHECK(report_percent(*t.accuracy) == 82.2);
    }

    TEST_CASE("degenerate denominators") {
        const Metrics m = metrics({1, 0, 0, 1});
        CHECK(*m.sensitivity == 100.0);
        CHECK(*m.specificity == 100.0);
        CHECK(*m.precision == 100.0);
        CHECK(*m.accuracy == 100.0);
        const Metrics z = metrics({0, 3, 0, 2});
        CHECK_FALSE(z.precision.has_value());
        CHECK(*z.sensitivity == 0.0);
        CHECK_FALSE(metrics({0, 0, 0, 0}).accuracy.has_value());
    }

    TEST_CASE("confusion CSV") {
        std::ostringstream os;
        write_confusion_csv(os, {22, 5, 2, 16});
        CHECK(os.str() ==
              "row,predicted_lentigo,predicted_healthy,rate\n"
              "lentigo,22,5,81.4\n"
              "healthy,2,16,88.8\n"
              "precision,91.6,76.1,\n"
              "accuracy,84.4,,\n");
    }
}

TEST_SUITE("svm") {
    TEST_CASE("separable data is classified perfectly") {
        const auto d = blobs(40, 12.0, 2, 1);
        const LinearModel m = train_svm(d, {.c = 10.0});
        for (const auto& f : d) CHECK(m.predict(f.features) == f.label);
    }

    TEST_CASE("conflicting duplicates still train") {
        std::vector<FeatureVector> d{{"a", Label::Healthy, {1.0}}, {"b", Label::Lentigo, {1.0}},
                                     {"c", Label::Healthy, {1.0}}, {"d", Label::Lentigo, {1.0}}};
        const LinearModel m = train_svm(d);
        CHECK(std::isfinite(m.b));
        CHECK(std::abs(m.decision({1.0})) < 1e-3);
    }

    TEST_CASE("one class only is rejected") {
        std::vector<FeatureVector> d{{"a", Label::Healthy, {1.0}}, {"b", Label::Healthy, {2.0}}};
        CHECK_THROWS_AS((void)train_svm(d), DegenerateTraining);
    }

    TEST_CASE("primal objective reaches the dual optimum") {
        int k = 0;
        for (auto [n, sep, dim, c] : std::vector<std::tuple<std::size_t, double, std::size_t, double>>{
                 {20, 1.0, 1, 1.0}, {30, 2.0, 2, 0.5}, {40, 0.5, 3, 2.0}, {25, 3.0, 2, 10.0}, {45, 1.5, 2, 1.0}}) {
            const auto d = blobs(n, sep, dim, 10 + static_cast<std::uint64_t>(k++));
            const LinearModel m = train_svm(d, {.c = c});
            const double dual = dual_oracle(d, c);
            const double primal = svm_objective(m, d, c);
            CAPTURE(k);
            CHECK(primal >= dual - 1e-9 * std::abs(dual));
            CHECK(primal - dual <= 1e-4 * std::abs(dual));
        }
    }

    TEST_CASE("standardized training is invariant to feature scaling") {
        const auto d = blobs(30, 1.5, 2, 3);
        auto scaled = d;
        for (auto& f : scaled)
            for (double& v : f.features) v *= 1000.0;
        const Standardizer s1 = Standardizer::fit(d), s2 = Standardizer::fit(scaled);
        std::vector<FeatureVector> a = d, b = scaled;
        for (auto& f : a) f.features = s1.apply(f.features);
        for (auto& f : b) f.features = s2.apply(f.features);
        const LinearModel ma = train_svm(a), mb = train_svm(b);
        for (std::size_t i = 0; i < d.size(); ++i)
            CHECK(ma.decision(a[i].features) == doctest::Approx(mb.decision(b[i].features)).epsilon(1e-6));
    }

    TEST_CASE("standardizer uses population sd and tolerates constant features") {
        std::vector<FeatureVector> d{{"a", Label::Healthy, {1.0, 5.0}}, {"b", Label::Lentigo, {3.0, 5.0}}};
        const Standardizer s = Standardizer::fit(d);
        CHECK(s.mean[0] == 2.0);
        CHECK(s.scale[0] == 1.0);
        CHECK(s.scale[1] == 1.0);
        CHECK(s.apply({3.0, 5.0}) == std::vector<double>{1.0, 0.0});
    }
}

TEST_SUITE("leave one out") {
    TEST_CASE("separated cohort is classified well and deterministically") {
        const auto c = cohort(18, 27, 2.0, 5);
        const LooResult a = leave_one_out(c, {.repeats = 20, .seed = 3});
        const LooResult b = leave_one_out(c, {.repeats = 20, .seed = 3});
        CHECK(a.confusion.tp == b.confusion.tp);
        CHECK(a.confusion.fp == b.confusion.fp);
        CHECK(a.confusion.total() == doctest::Approx(45.0));
        CHECK(*a.metrics.accuracy >= 90.0);
    }

    TEST_CASE("standardization does not change a scale-free problem") {
        auto c = cohort(18, 27, 2.0, 6);
        const LooResult a = leave_one_out(c, {.repeats = 10, .seed = 1, .standardize = true});
        for (auto& p : c)
            for (auto& acq : p.acquisitions)
                for (double& v : acq) v = 7.0 * v - 3.0;
        const LooResult b = leave_one_out(c, {.repeats = 10, .seed = 1, .standardize = true});
        CHECK(*a.metrics.accuracy == doctest::Approx(*b.metrics.accuracy).epsilon(1e-9));
    }

    TEST_CASE("shuffled labels sit near chance") {
        const auto c = cohort(18, 27, 2.0, 8);
        double acc = 0;
        const int trials = 20;
        for (int t = 0; t < trials; ++t) {
            auto s = c;
            std::vector<Label> labels;
            for (const auto& p : s) labels.push_back(p.label);
            std::mt19937_64 g(static_cast<std::uint64_t>(t) + 100);
            std::shuffle(labels.begin(), labels.end(), g);
            for (std::size_t i = 0; i < s.size(); ++i) s[i].label = labels[i];
            acc += *leave_one_out(s, {.repeats = 5, .seed = 2}).metrics.accuracy;
        }
        CHECK(std::abs(acc / trials - 50.0) <= 8.0);
    }
}
