#include "ggd/hypothesis.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <set>

#include "ggd/error.hpp"
#include "ggd/format.hpp"
#include "ggd/special.hpp"

namespace ggd {

GroupStats GroupStats::from(std::span<const double> values) {
    if (values.size() < 2) throw InvalidArgument("group needs at least two values");
    GroupStats g;
    g.values.assign(values.begin(), values.end());
    g.n = values.size();
    double sum = 0.0;
    for (double v : values) {
        if (!std::isfinite(v)) throw InvalidArgument("group contains a non-finite value");
        sum += v;
    }
    g.mean = sum / static_cast<double>(g.n);
    double ss = 0.0;
    for (double v : values) ss += (v - g.mean) * (v - g.mean);
    g.s2 = ss / static_cast<double>(g.n - 1);
    return g;
}

WelchResult welch_t(const GroupStats& h, const GroupStats& s) {
    if (h.n < 2 || s.n < 2) throw InvalidArgument("welch_t: each group needs n >= 2");
    const double a = h.s2 / static_cast<double>(h.n);
    const double b = s.s2 / static_cast<double>(s.n);
    if (a + b <= 0.0) throw DegenerateGroups("welch_t: both groups have zero variance");
    const double t = (h.mean - s.mean) / std::sqrt(a + b);
    const double nu = (a + b) * (a + b) /
                      (a * a / static_cast<double>(h.n - 1) + b * b / static_cast<double>(s.n - 1));
    return {t, nu};
}

double p_value(double t, double nu) {
    if (!(nu > 0.0)) throw InvalidArgument("p_value: nu must be positive");
    if (std::isnan(t)) throw InvalidArgument("p_value: t is NaN");
    if (std::isinf(t)) return 0.0;
    return reg_inc_beta(nu / 2.0, 0.5, nu / (nu + t * t));
}

double t_threshold(double pfa, double nu) {
    if (!(pfa > 0.0 && pfa < 1.0)) throw InvalidArgument("t_threshold: pfa must lie in (0, 1)");
    if (!(nu > 0.0)) throw InvalidArgument("t_threshold: nu must be positive");
    double lo = 0.0;
    double hi = 1.0;
    while (p_value(hi, nu) > pfa) {
        lo = hi;
        hi *= 2.0;
    }
    for (int i = 0; i < 200 && hi - lo > 1e-15 * hi; ++i) {
        const double mid = 0.5 * (lo + hi);
        (p_value(mid, nu) > pfa ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

std::string_view to_string(Significance s) {
    switch (s) {
        case Significance::NotSignificant: return "not_significant";
        case Significance::MarginallySignificant: return "marginally_significant";
        case Significance::Significant: return "significant";
        case Significance::HighlySignificant: return "highly_significant";
    }
    return "not_significant";
}

Significance significance_label(double p) {
    if (!(p >= 0.0 && p <= 1.0)) throw InvalidArgument("significance_label: p outside [0, 1]");
    if (p > 0.10) return Significance::NotSignificant;
    if (p >= 0.05) return Significance::MarginallySignificant;
    if (p >= 0.01) return Significance::Significant;
    return Significance::HighlySignificant;
}

BfVariant parse_bf_variant(std::string_view s) {
    if (s == "verbatim") return BfVariant::Verbatim;
    if (s == "squared") return BfVariant::Squared;
    throw InvalidArgument("unknown Bayes factor variant '" + std::string(s) + "'");
}

std::string_view to_string(BfVariant v) {
    return v == BfVariant::Verbatim ? "verbatim" : "squared";
}

BayesFactor bayes_factor(double t, double nu, std::size_t n1, std::size_t n2, double t_pfa,
                         BfVariant variant) {
    if (!(nu > 0.0)) throw InvalidArgument("bayes_factor: nu must be positive");
    if (n1 + n2 < 2) throw InvalidArgument("bayes_factor: n1 + n2 must be at least 2");
    const double half_n = static_cast<double>(n1 + n2) / 2.0;
    const double T = std::abs(t);
    // alpha^(2/(n-1)) evaluated in log space to stay finite for large groups
    const double log_alpha = half_n * std::log1p(t_pfa * t_pfa / nu);
    const double alpha_star = std::expm1(log_alpha * 2.0 / static_cast<double>(n1 + n2 - 1));
    const double root = std::sqrt(nu * alpha_star);
    const double num = nu + (variant == BfVariant::Verbatim ? T : T * T);
    const double den = nu + (T - root) * (T - root);
    BayesFactor bf;
    bf.value = std::exp(half_n * (std::log(num) - std::log(den)));
    bf.threshold = root;
    bf.reject = bf.value > root;
    return bf;
}

ScanResult scan_depths(const PatientParams& fits, const std::map<std::string, Label>& labels,
                       const ScanConfig& cfg) {
    std::set<DepthCode> depths;
    for (const auto& [_, by_depth] : fits) {
        for (const auto& [d, __] : by_depth) depths.insert(d);
    }
    ScanResult out;
    constexpr ParamName kParams[] = {ParamName::Gamma, ParamName::Beta, ParamName::Rho};
    std::size_t agree = 0;
    for (ParamName param : kParams) {
        for (DepthCode d : depths) {
            std::vector<double> h, s;
            for (const auto& [patient, by_depth] : fits) {
                const auto it = by_depth.find(d);
                const auto lab = labels.find(patient);
                if (it == by_depth.end() || lab == labels.end()) continue;
                const Vec3 v = to_vec(it->second);
                const double x = v[static_cast<int>(param)];
                if (lab->second == Label::Healthy) h.push_back(x);
                else if (lab->second == Label::Lentigo) s.push_back(x);
            }
            if (h.size() < 2 || s.size() < 2) {
                out.skipped.push_back({d, param, "fewer than two patients in a class"});
                continue;
            }
            try {
                const GroupStats gh = GroupStats::from(h);
                const GroupStats gs = GroupStats::from(s);
                const WelchResult w = welch_t(gh, gs);
                DepthScan row;
                row.depth = d;
                row.parameter = param;
                row.t = w.t;
                row.nu = w.nu;
                row.p_value = p_value(w.t, w.nu);
                row.t_pfa = t_threshold(cfg.pfa, w.nu);
                const BayesFactor bf =
                    bayes_factor(w.t, w.nu, gh.n, gs.n, row.t_pfa, cfg.bf_variant);
                row.bayes_factor = bf.value;
                row.label = significance_label(row.p_value);
                row.reject_h0_t = std::abs(w.t) > row.t_pfa;
                row.reject_h0_bf = bf.reject;
                if (row.reject_h0_t == row.reject_h0_bf) ++agree;
                out.rows.push_back(row);
            } catch (const DegenerateGroups& e) {
                out.skipped.push_back({d, param, e.what()});
            }
        }
    }
    out.t_bf_agreement =
        out.rows.empty() ? 0.0 : static_cast<double>(agree) / static_cast<double>(out.rows.size());

    for (ParamName param : kParams) {
        ParamSummary sum;
        sum.parameter = param;
        std::optional<SignificantRange> open;
        for (const auto& r : out.rows) {
            if (r.parameter != param) continue;
            if (!sum.strongest || std::abs(r.t) > std::abs(sum.strongest->t)) sum.strongest = r;
            if (r.reject_h0_t) {
                if (!open) open = SignificantRange{r.depth, r.depth, r.depth, std::abs(r.t)};
                open->to = r.depth;
                if (std::abs(r.t) > open->peak_t) {
                    open->peak_t = std::abs(r.t);
                    open->peak_depth = r.depth;
                }
            } else if (open) {
                sum.ranges.push_back(*open);
                open.reset();
            }
        }
        if (open) sum.ranges.push_back(*open);
        if (sum.strongest) {
            const double cut = 0.9 * std::abs(sum.strongest->t);
            for (const auto& r : out.rows) {
                if (r.parameter != param || std::abs(r.t) < cut) continue;
                if (!sum.near_peak) sum.near_peak = std::pair{r.depth, r.depth};
                sum.near_peak->second = r.depth;
            }
        }
        out.summary.push_back(std::move(sum));
    }
    return out;
}

void write_scan_csv(std::ostream& os, const std::vector<DepthScan>& rows) {
    os << "parameter,depth_um,t,nu,p_value,bayes_factor,label,reject_t,reject_bf\n";
    for (const auto& r : rows) {
        os << to_string(r.parameter) << ',' << depth_string(r.depth) << ',' << fmt_double(r.t)
           << ',' << fmt_double(r.nu) << ',' << fmt_double(r.p_value) << ','
           << fmt_double(r.bayes_factor) << ',' << to_string(r.label) << ','
           << (r.reject_h0_t ? "true" : "false") << ',' << (r.reject_h0_bf ? "true" : "false")
           << '\n';
    }
}

}  // namespace ggd
