#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ggd/cohort.hpp"

namespace ggd {

struct FeatureVector {
    std::string patient;
    Label label = Label::Healthy;
    std::vector<double> features;
};

/// Averaged counts may be fractional; lentigo is the positive class.
struct ConfusionMatrix {
    double tp = 0.0;
    double fn = 0.0;
    double fp = 0.0;
    double tn = 0.0;

    [[nodiscard]] double total() const noexcept { return tp + fn + fp + tn; }
};

/// Percentages; empty when the denominator is zero.
struct Metrics {
    std::optional<double> sensitivity;
    std::optional<double> specificity;
    std::optional<double> precision;
    std::optional<double> accuracy;
};

[[nodiscard]] Metrics metrics(const ConfusionMatrix& cm);

/// Report form of a percentage: cut (not rounded) to one decimal, so
/// 22/27 = 81.48% reads 81.4.
[[nodiscard]] double report_percent(double pct);

struct LinearModel {
    Eigen::VectorXd w;
    double b = 0.0;

    [[nodiscard]] double decision(const std::vector<double>& x) const;
    /// Ties (decision == 0) go to lentigo.
    [[nodiscard]] Label predict(const std::vector<double>& x) const;
};

struct SvmOptions {
    double c = 1.0;
    double tol = 1e-6;  // relative duality gap
    std::size_t max_epochs = 100000;
};

/// Soft-margin linear SVM; the bias is folded in as a constant feature
/// (and so regularized), solved by dual coordinate ascent. Throws
/// DegenerateTraining unless both classes are present.
[[nodiscard]] LinearModel train_svm(const std::vector<FeatureVector>& data,
                                    const SvmOptions& opt = {});

/// Primal objective 0.5(|w|^2 + b^2) + c * sum of hinge losses.
[[nodiscard]] double svm_objective(const LinearModel& m, const std::vector<FeatureVector>& data,
                                   double c);

struct Standardizer {
    std::vector<double> mean;
    std::vector<double> scale;

    [[nodiscard]] static Standardizer fit(const std::vector<FeatureVector>& data);
    [[nodiscard]] std::vector<double> apply(const std::vector<double>& x) const;
};

/// One patient with one feature vector per acquisition.
struct PatientFeatures {
    std::string patient;
    Label label = Label::Healthy;
    std::vector<std::vector<double>> acquisitions;
};

struct LooConfig {
    SvmOptions svm;
    std::size_t repeats = 100;
    std::uint64_t seed = 1;
    bool standardize = true;
};

struct LooResult {
    ConfusionMatrix confusion;  // averaged over repeats
    Metrics metrics;
    std::size_t repeats = 0;
};

[[nodiscard]] LooResult leave_one_out(const std::vector<PatientFeatures>& data,
                                      const LooConfig& cfg = {});

/// Confusion table laid out as rows Lentigo, Healthy, Precision, Accuracy.
void write_confusion_csv(std::ostream& os, const ConfusionMatrix& cm);

}  // namespace ggd
