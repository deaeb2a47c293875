#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ggd/benchmark.hpp"
#include "ggd/cohort.hpp"

namespace ggd {

struct GroupStats {
    std::vector<double> values;
    std::size_t n = 0;
    double mean = 0.0;
    double s2 = 0.0;  // unbiased variance

    /// Throws InvalidArgument for fewer than two values or non-finite input.
    [[nodiscard]] static GroupStats from(std::span<const double> values);
};

struct WelchResult {
    double t = 0.0;
    double nu = 0.0;
};

/// Throws DegenerateGroups when both groups have zero variance.
[[nodiscard]] WelchResult welch_t(const GroupStats& h, const GroupStats& s);

/// Two-sided Student-t tail probability beyond |t|.
[[nodiscard]] double p_value(double t, double nu);

/// Threshold T with p_value(T, nu) == pfa.
[[nodiscard]] double t_threshold(double pfa, double nu);

enum class Significance { NotSignificant, MarginallySignificant, Significant, HighlySignificant };

[[nodiscard]] std::string_view to_string(Significance s);
[[nodiscard]] Significance significance_label(double p);

enum class BfVariant {
    Verbatim,  // (nu + T) in the numerator
    Squared,   // (nu + T^2)
};

[[nodiscard]] BfVariant parse_bf_variant(std::string_view s);
[[nodiscard]] std::string_view to_string(BfVariant v);

struct BayesFactor {
    double value = 0.0;
    double threshold = 0.0;  // sqrt(nu * alpha_star)
    bool reject = false;
};

/// Bayes factor for statistic |t| with nu degrees of freedom, group sizes
/// n1, n2 and rejection threshold t_pfa.
[[nodiscard]] BayesFactor bayes_factor(double t, double nu, std::size_t n1, std::size_t n2,
                                       double t_pfa, BfVariant variant = BfVariant::Verbatim);

struct DepthScan {
    DepthCode depth = 0;
    ParamName parameter = ParamName::Gamma;
    double t = 0.0;
    double nu = 0.0;
    double p_value = 1.0;
    double t_pfa = 0.0;
    double bayes_factor = 0.0;
    Significance label = Significance::NotSignificant;
    bool reject_h0_t = false;
    bool reject_h0_bf = false;
};

struct SkippedDepth {
    DepthCode depth = 0;
    ParamName parameter = ParamName::Gamma;
    std::string reason;
};

struct ScanConfig {
    double pfa = 0.05;
    BfVariant bf_variant = BfVariant::Verbatim;
};

/// Depth range where |t| exceeds the threshold, with the strongest depth in it.
struct SignificantRange {
    DepthCode from = 0;
    DepthCode to = 0;
    DepthCode peak_depth = 0;
    double peak_t = 0.0;
};

struct ParamSummary {
    ParamName parameter = ParamName::Gamma;
    std::vector<SignificantRange> ranges;
    std::optional<DepthScan> strongest;  // largest |t| over all depths
    /// Smallest and largest depth with |t| within 10% of the strongest.
    std::optional<std::pair<DepthCode, DepthCode>> near_peak;
};

struct ScanResult {
    std::vector<DepthScan> rows;  // sorted by (parameter, depth)
    std::vector<SkippedDepth> skipped;
    std::vector<ParamSummary> summary;
    double t_bf_agreement = 0.0;  // fraction of rows where both rejections agree
};

using PatientParams = std::map<std::string, std::map<DepthCode, GgdParams>>;

/// Healthy group first: t > 0 means the healthy mean is larger.
[[nodiscard]] ScanResult scan_depths(const PatientParams& fits,
                                     const std::map<std::string, Label>& labels,
                                     const ScanConfig& cfg = {});

void write_scan_csv(std::ostream& os, const std::vector<DepthScan>& rows);

}  // namespace ggd
