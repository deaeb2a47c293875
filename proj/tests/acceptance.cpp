// Acceptance checks: one PASS/FAIL line per criterion. Exit status is the
// number of failed criteria.

#include <Eigen/LU>
#include <boost/multiprecision/cpp_dec_float.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "ggd/benchmark.hpp"
#include "ggd/classify.hpp"
#include "ggd/estimation.hpp"
#include "ggd/format.hpp"
#include "ggd/gof.hpp"
#include "ggd/hypothesis.hpp"
#include "ggd/io.hpp"
#include "ggd/pipeline.hpp"
#include "ggd/rng.hpp"
#include "oracles.hpp"

using namespace ggd;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string sci(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

std::vector<double> values_of(const Sample& s) { return {s.values().begin(), s.values().end()}; }

Outcome gradient() {
    Rng rng(2024);
    double worst = 0;
    for (int c = 0; c < 100; ++c) {
        const GgdParams truth{10 * rng.uniform() - 5, 0.2 + 20 * rng.uniform(), 2.2 + 8 * rng.uniform()};
        const std::size_t n = 5 + rng.below(200);
        const Sample s = sample(truth, n, derive_seed(77, c));
        GgdParams p{truth.gamma, truth.beta * (0.8 + 0.4 * rng.uniform()), truth.rho * (0.8 + 0.4 * rng.uniform())};
        p.gamma = std::min(truth.gamma, s.min() - (0.05 + rng.uniform()) * truth.beta);
        const auto xs = values_of(s);
        const Vec3 th = to_vec(p);
        Vec3 fd;
        for (int k = 0; k < 3; ++k) {
            const double h = 1e-5 * std::max(std::abs(th[k]), 1e-2);
            Vec3 a = th, b = th;
            a[k] += h;
            b[k] -= h;
            fd[k] = (oracle::log_likelihood(xs, a[0], a[1], a[2]) - oracle::log_likelihood(xs, b[0], b[1], b[2])) /
                    (2 * h);
        }
        worst = std::max(worst, (score(s, p) - fd).norm() / fd.norm());
    }
    return {worst <= 1e-6, "100 cases, worst relative error " + sci(worst)};
}

Outcome fisher() {
    const GgdParams points[] = {{0, 1, 3}, {0, 1, 4}, {2, 15, 4}, {-1, 0.5, 6}};
    double worst_outer = 0, worst_hess = 0;
    for (const auto& p : points) {
        const auto xs = oracle::stratified_draws(p.gamma, p.beta, p.rho, 100'000, 1);
        Mat3 outer = Mat3::Zero(), hess = Mat3::Zero();
        for (double x : xs) {
            const Sample one({x});
            const Vec3 g = score(one, p);
            outer += g * g.transpose();
            hess += hessian(one, p);
        }
        outer /= static_cast<double>(xs.size());
        hess /= static_cast<double>(xs.size());
        const Mat3 f = fisher_matrix(1, p);
        for (int i = 0; i < 3; ++i) {
            for (int j = 0; j < 3; ++j) {
                worst_outer = std::max(worst_outer, std::abs(outer(i, j) - f(i, j)) / std::abs(f(i, j)));
                worst_hess = std::max(worst_hess, std::abs(-hess(i, j) - f(i, j)) / std::abs(f(i, j)));
            }
        }
    }
    return {worst_outer <= 0.05 && worst_hess <= 0.05,
            "4 points, 1e5 stratified draws; worst entry vs score outer product " + sci(worst_outer) +
                ", vs -hessian " + sci(worst_hess)};
}

Outcome synthetic_experiment() {
    ExperimentConfig cfg;  // truth (2,15,4), N in {40,100,300,1000}, M = 200, paired seeds
    cfg.fit.rel_tol = 1e-14;
    const auto rows = run_experiment(cfg);
    const auto at = [&](Method m, std::size_t n) -> const MetricRow& {
        return *std::find_if(rows.begin(), rows.end(), [&](const MetricRow& r) { return r.method == m && r.n == n; });
    };
    bool mono = true, ng_vs_newton = true, timing = true;
    double worst_ratio = 0;
    std::string where;
    for (Method m : cfg.methods) {
        for (std::size_t i = 1; i < cfg.sample_sizes.size(); ++i) {
            const auto& a = at(m, cfg.sample_sizes[i - 1]);
            const auto& b = at(m, cfg.sample_sizes[i]);
            for (int k = 0; k < 3; ++k) {
                if (!(b.rmse[k] < a.rmse[k])) {
                    mono = false;
                    where += " mse not decreasing for " + std::string(to_string(m));
                }
            }
        }
    }
    for (std::size_t n : {40u, 100u, 300u}) {
        for (int k = 0; k < 3; ++k) {
            if (!(at(Method::NaturalGradient, n).rmse[k] <= at(Method::Newton, n).rmse[k])) {
                ng_vs_newton = false;
                where += " ng>newton at n=" + std::to_string(n);
            }
        }
    }
    for (std::size_t n : cfg.sample_sizes) {
        double fastest = 1e300;
        for (Method m : cfg.methods) fastest = std::min(fastest, at(m, n).mean_elapsed);
        const double ratio = at(Method::NaturalGradient, n).mean_elapsed / fastest;
        worst_ratio = std::max(worst_ratio, ratio);
        if (ratio > 1.1) timing = false;
    }
    const auto yn = [](bool b) { return b ? "yes" : "no"; };
    return {mono && ng_vs_newton && timing,
            std::string("(a) monotone ") + yn(mono) + ", (b) natural gradient <= newton " + yn(ng_vs_newton) +
                ", (c) worst time ratio to fastest " + fmt_fixed(worst_ratio, 2) + where};
}

Outcome agreement() {
    FitConfig cfg;
    cfg.rel_tol = 1e-14;
    double worst_rel = 0, worst_score = 0;
    bool all_converged = true;
    const std::size_t n = 10'000;
    for (int i = 0; i < 20; ++i) {
        const Sample s = sample({2, 15, 4}, n, derive_seed(4, i));
        std::vector<FitResult> r;
        for (Method m : {Method::NaturalGradient, Method::Newton, Method::Analytical}) r.push_back(fit(m, s, cfg));
        for (const auto& x : r) {
            all_converged = all_converged && x.converged;
            worst_score = std::max(worst_score, score(s, x.params).norm() / static_cast<double>(n));
        }
        for (std::size_t a = 0; a < r.size(); ++a) {
            for (std::size_t b = a + 1; b < r.size(); ++b) {
                const Vec3 pa = to_vec(r[a].params), pb = to_vec(r[b].params);
                for (int k = 0; k < 3; ++k)
                    worst_rel = std::max(worst_rel, std::abs(pa[k] - pb[k]) / std::abs(pb[k]));
            }
        }
    }
    return {all_converged && worst_rel <= 1e-3 && worst_score <= 1e-4,
            "20 samples of 1e4; worst pairwise relative gap " + sci(worst_rel) + ", worst |score|/N " +
                sci(worst_score) + (all_converged ? "" : ", some fits did not converge")};
}

Outcome ks_behaviour() {
    CohortSpec spec = default_cohort_spec(true);
    spec.healthy.n_patients = 2;
    spec.lentigo.n_patients = 2;
    spec.acquisitions = 1;
    spec.depths = {depth_code(0), depth_code(49.5), depth_code(99)};
    spec.width = 317;
    spec.height = 316;  // 100172 pixels
    const auto cohort = synthesize_cohort(spec);
    const FitTable t = fit_all(cohort.stacks, Method::NaturalGradient, {});
    if (!t.failures.empty()) return {false, std::to_string(t.failures.size()) + " fits failed"};
    ParamMap own = t.params(), wrong = own;
    for (auto& [k, p] : wrong) p.beta *= 2;
    double own_mean = 0, wrong_min = 1e300;
    const auto a = mean_ks_by_depth(cohort.stacks, own);
    const auto b = mean_ks_by_depth(cohort.stacks, wrong);
    for (const auto& r : a) own_mean += r.mean_ks / static_cast<double>(a.size());
    for (const auto& r : b) wrong_min = std::min(wrong_min, r.mean_ks);
    return {own_mean < 0.02 && wrong_min > 0.05,
            "12 images of 1e5 pixels; mean KS own fit " + sci(own_mean) + ", smallest depth mean with beta doubled " +
                sci(wrong_min)};
}

Outcome hypothesis_fixtures() {
    const GroupStats a = GroupStats::from(std::vector<double>{1, 4, 2, 8, 5});
    const bool zero = welch_t(a, a).t == 0.0;
    const GroupStats h = GroupStats::from(std::vector<double>{1, 2, 3, 4, 5});
    const GroupStats s = GroupStats::from(std::vector<double>{7, 8, 9, 10, 11});
    const bool nu_ok = std::abs(welch_t(h, s).nu - 8.0) <= 1e-12;

    // 18 and 27 values with equal unbiased variances
    std::vector<double> x(18), y(27);
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = static_cast<double>(i);
    for (std::size_t i = 0; i < y.size(); ++i) y[i] = static_cast<double>(i) * std::sqrt(28.5 / 63.0);
    const double nu = welch_t(GroupStats::from(x), GroupStats::from(y)).nu;
    const double p = p_value(2.02, nu);
    const bool p_ok = std::abs(p - 0.05) <= 0.002;

    using mp = boost::multiprecision::cpp_dec_float_50;
    Rng r(99);
    double worst = 0;
    for (int i = 0; i < 20; ++i) {
        const double t = 8 * r.uniform() - 1, v = 5 + 60 * r.uniform();
        const double tp = t_threshold(0.05, v);
        const mp N = 45, V = v, T = std::abs(t);
        const mp alpha = pow(mp(tp) * mp(tp) / V + 1, N / 2);
        const mp root = sqrt(V * (pow(alpha, 2 / (N - 1)) - 1));
        const double ref = static_cast<double>(pow((V + T) / (V + (T - root) * (T - root)), N / 2));
        worst = std::max(worst, std::abs(bayes_factor(t, v, 18, 27, tp).value - ref) / ref);
    }
    return {zero && nu_ok && p_ok && worst <= 1e-9,
            std::string("t(identical) = 0 ") + (zero ? "yes" : "no") + ", balanced nu = 2(n-1) " +
                (nu_ok ? "yes" : "no") + ", p(2.02, nu=" + fmt_fixed(nu, 2) + ") = " + fmt_fixed(p, 4) +
                ", BF worst relative error " + sci(worst)};
}

Outcome null_calibration() {
    std::size_t cells = 0, hits = 0, failures = 0;
    for (std::uint64_t seed = 1; seed <= 200; ++seed) {
        CohortSpec spec = default_cohort_spec(false);
        spec.acquisitions = 1;
        spec.width = 20;
        spec.height = 20;
        spec.seed = seed;
        const auto cohort = synthesize_cohort(spec);
        const FitTable t = fit_all(cohort.stacks, Method::NaturalGradient, {});
        failures += t.failures.size();
        std::map<std::string, Label> labels;
        for (const auto& st : cohort.stacks) labels[st.patient] = st.label;
        const auto sel = draw_selection(cohort.stacks, seed, 0);
        const ScanResult res = scan_depths(selected_params(t.params(), cohort.stacks, sel), labels);
        for (const auto& row : res.rows) {
            ++cells;
            if (row.p_value < 0.05) ++hits;
        }
    }
    const double frac = static_cast<double>(hits) / static_cast<double>(cells);
    return {std::abs(frac - 0.05) <= 0.02, "200 null cohorts of 400-pixel images; " + std::to_string(hits) + " of " +
                                               std::to_string(cells) + " cells with p < 0.05 (" +
                                               fmt_fixed(100 * frac, 2) + "%), " + std::to_string(failures) +
                                               " failed fits skipped"};
}

struct EndToEnd {
    RunReport first;
    bool identical = false;
    std::size_t files = 0;
    std::string mismatch;
};

EndToEnd end_to_end(const fs::path& dir) {
    generate_synthetic_cohort(default_cohort_spec(true), dir / "cohort");
    RunConfig cfg;
    cfg.input_root = dir / "cohort";
    cfg.output_dir = dir / "reports";
    EndToEnd e;
    e.first = run(cfg);
    std::vector<std::string> names = e.first.files;
    names.push_back("manifest.json");
    std::vector<std::string> before;
    for (const auto& f : names) before.push_back(read_text(dir / "reports" / f));
    const RunReport second = run(cfg);
    e.identical = e.first.files == second.files;
    for (std::size_t i = 0; i < names.size(); ++i) {
        if (read_text(dir / "reports" / names[i]) != before[i]) {
            e.identical = false;
            e.mismatch += " " + names[i];
        }
    }
    e.files = names.size();
    return e;
}

Outcome discrimination(const RunReport& rep) {
    const ParamSummary* beta = nullptr;
    for (const auto& s : rep.scan.summary)
        if (s.parameter == ParamName::Beta) beta = &s;
    if (!beta || !beta->strongest) return {false, "no beta scan"};
    const double peak = depth_um(beta->strongest->depth);
    const bool peak_ok = peak >= 40.0 && peak <= 60.0;
    std::size_t depths = 0, quiet = 0;
    std::string loud;
    for (const auto& row : rep.scan.rows) {
        if (row.parameter != ParamName::Gamma) continue;
        ++depths;
        if (!row.reject_h0_t) {
            ++quiet;
        } else {
            loud += " " + depth_string(row.depth);
        }
    }
    const double frac = depths ? static_cast<double>(quiet) / static_cast<double>(depths) : 0.0;
    return {peak_ok && frac >= 0.95, "beta peak at " + depth_string(beta->strongest->depth) +
                                         " um (window 40 to 60); gamma not significant at " + std::to_string(quiet) +
                                         " of " + std::to_string(depths) + " depths" +
                                         (loud.empty() ? "" : ", significant at" + loud + " um")};
}

Outcome classification(const RunReport& rep) {
    const auto pct = [](double v) { return fmt_fixed(report_percent(v), 1); };
    const Metrics t2 = metrics({22, 5, 2, 16});
    const Metrics t3 = metrics({24, 3, 5, 13});
    const auto same = [](const Metrics& m, std::array<double, 4> want) {
        return report_percent(*m.sensitivity) == want[0] && report_percent(*m.specificity) == want[1] &&
               report_percent(*m.precision) == want[2] && report_percent(*m.accuracy) == want[3];
    };
    const bool fixtures = same(t2, {81.4, 88.8, 91.6, 84.4}) && same(t3, {88.8, 72.2, 82.7, 82.2});

    const double acc = *rep.classification.at(ParamName::Beta).metrics.accuracy;
    const ParamMap params = rep.fits.params();
    const auto feats = window_features(params, rep.stacks, ParamName::Beta, 40.0, 60.0);
    double shuffled = 0;
    const int shuffles = 20;
    for (int k = 0; k < shuffles; ++k) {
        auto f = feats;
        std::vector<Label> labels;
        for (const auto& p : f) labels.push_back(p.label);
        std::mt19937_64 g(derive_seed(9, k));
        std::shuffle(labels.begin(), labels.end(), g);
        for (std::size_t i = 0; i < f.size(); ++i) f[i].label = labels[i];
        shuffled += *leave_one_out(f, {.repeats = 100, .seed = derive_seed(10, k)}).metrics.accuracy / shuffles;
    }
    return {fixtures && acc >= 90.0 && std::abs(shuffled - 50.0) <= 8.0,
            std::string("confusion fixtures ") + (fixtures ? "exact" : "wrong") + ", beta LOO accuracy " + pct(acc) +
                "%, mean over 20 label shuffles " + fmt_fixed(shuffled, 1) + "%"};
}

}  // namespace

int main() {
    int failed = 0;
    const auto report = [&](int id, const std::string& name, const std::function<Outcome()>& body) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = body();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (!o.pass) ++failed;
        std::printf("criterion %2d %s: %s (%s; %.1fs)\n", id, o.pass ? "PASS" : "FAIL", name.c_str(),
                    o.detail.c_str(), secs);
        std::fflush(stdout);
    };

    report(1, "gradient correctness", gradient);
    report(2, "fisher correctness", fisher);
    report(3, "synthetic experiment", synthetic_experiment);
    report(4, "estimator agreement", agreement);
    report(5, "KS behaviour", ks_behaviour);
    report(6, "hypothesis fixtures", hypothesis_fixtures);
    report(7, "null calibration", null_calibration);

    std::random_device rd;
    const fs::path dir = fs::temp_directory_path() / ("ggd_accept_" + std::to_string(rd()));
    EndToEnd e;
    bool have_run = false;
    std::string run_error;
    try {
        e = end_to_end(dir);
        have_run = true;
    } catch (const std::exception& ex) {
        run_error = ex.what();
    }
    const auto need_run = [&](const std::function<Outcome()>& f) {
        return [&, f] { return have_run ? f() : Outcome{false, "pipeline run failed: " + run_error}; };
    };
    report(8, "discrimination recovery", need_run([&] { return discrimination(e.first); }));
    report(9, "classification", need_run([&] { return classification(e.first); }));
    report(10, "end-to-end determinism", need_run([&] {
               return Outcome{e.identical, std::to_string(e.files) + " report files compared byte for byte" +
                                               (e.mismatch.empty() ? "" : "; differ:" + e.mismatch)};
           }));
    std::error_code ec;
    fs::remove_all(dir, ec);
    return failed;
}
