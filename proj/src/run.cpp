#include <chrono>
#include <functional>
#include <sstream>

#include "ggd/config.hpp"
#include "ggd/error.hpp"
#include "ggd/format.hpp"
#include "ggd/io.hpp"
#include "ggd/pipeline.hpp"
#include "ggd/version.hpp"

namespace ggd {

void RunConfig::validate() const {
    fit.validate();
    if (selection_repeats < 1) throw InvalidArgument("run: selection_repeats must be at least 1");
    if (loo_repeats < 1) throw InvalidArgument("run: loo_repeats must be at least 1");
    if (!(window_lo_um <= window_hi_um)) throw InvalidArgument("run: empty depth window");
    if (!(pfa > 0.0 && pfa < 1.0)) throw InvalidArgument("run: pfa must lie in (0, 1)");
    if (!(svm_c > 0.0)) throw InvalidArgument("run: svm_c must be positive");
    if (jobs < 1) throw InvalidArgument("run: jobs must be at least 1");
    if (input_root.empty()) throw InvalidArgument("run: input_root is required");
}

namespace {

std::string fits_csv(const std::vector<PatientStack>& stacks, const FitTable& t) {
    std::map<std::string, Label> labels;
    for (const auto& st : stacks) labels[st.patient] = st.label;
    std::ostringstream os;
    os << "patient,label,acquisition,depth_um,gamma,beta,rho,log_likelihood,iterations\n";
    for (const auto& [k, r] : t.fits) {
        os << k.patient << ',' << to_string(labels[k.patient]) << ',' << k.acquisition + 1 << ','
           << depth_string(k.depth) << ',' << fmt_double(r.params.gamma) << ','
           << fmt_double(r.params.beta) << ',' << fmt_double(r.params.rho) << ','
           << fmt_double(r.log_likelihood) << ',' << r.iterations << '\n';
    }
    return os.str();
}

std::string quoted(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + '"';
}

std::string failures_csv(const FitTable& t) {
    std::ostringstream os;
    os << "patient,acquisition,depth_um,source,reason\n";
    for (const auto& f : t.failures) {
        os << f.key.patient << ',' << f.key.acquisition + 1 << ',' << depth_string(f.key.depth) << ','
           << quoted(f.source) << ',' << quoted(f.reason) << '\n';
    }
    return os.str();
}

std::string curves_csv(const std::vector<SelectionCurve>& rows) {
    std::ostringstream os;
    os << "label,depth_um,n_patients,mean_g,mean_b,mean_r,sel_std_g,sel_std_b,sel_std_r,"
          "patient_std_g,patient_std_b,patient_std_r\n";
    for (const auto& c : rows) {
        os << to_string(c.label) << ',' << depth_string(c.depth) << ',' << c.n_patients;
        for (const Vec3* v : {&c.mean, &c.selection_std, &c.patient_std}) {
            for (int k = 0; k < 3; ++k) os << ',' << fmt_double((*v)[k]);
        }
        os << '\n';
    }
    return os.str();
}

Json scan_row_json(const DepthScan& r) {
    return {{"depth_um", depth_um(r.depth)},
            {"t", r.t},
            {"nu", r.nu},
            {"p_value", r.p_value},
            {"t_pfa", r.t_pfa},
            {"bayes_factor", r.bayes_factor},
            {"label", std::string(to_string(r.label))}};
}

Json scan_summary_json(const ScanResult& s, double pfa) {
    Json params = Json::array();
    for (const auto& p : s.summary) {
        Json ranges = Json::array();
        for (const auto& r : p.ranges) {
            ranges.push_back({{"from_um", depth_um(r.from)},
                              {"to_um", depth_um(r.to)},
                              {"peak_um", depth_um(r.peak_depth)},
                              {"peak_t", r.peak_t}});
        }
        Json j{{"parameter", std::string(to_string(p.parameter))}, {"significant_ranges", ranges}};
        j["strongest"] = p.strongest ? scan_row_json(*p.strongest) : Json(nullptr);
        j["near_peak_um"] = p.near_peak ? Json{depth_um(p.near_peak->first), depth_um(p.near_peak->second)}
                                        : Json(nullptr);
        params.push_back(j);
    }
    Json skipped = Json::array();
    for (const auto& k : s.skipped) {
        skipped.push_back({{"parameter", std::string(to_string(k.parameter))},
                           {"depth_um", depth_um(k.depth)},
                           {"reason", k.reason}});
    }
    return {{"pfa", pfa},
            {"parameters", params},
            {"skipped", skipped},
            {"t_bf_agreement", s.t_bf_agreement}};
}

Json metrics_json(ParamName p, const LooResult& r) {
    const auto pct = [](std::optional<double> v) {
        return v ? Json(report_percent(*v)) : Json(nullptr);
    };
    return {{"parameter", std::string(to_string(p))},
            {"tp", r.confusion.tp},
            {"fn", r.confusion.fn},
            {"fp", r.confusion.fp},
            {"tn", r.confusion.tn},
            {"sensitivity", pct(r.metrics.sensitivity)},
            {"specificity", pct(r.metrics.specificity)},
            {"precision", pct(r.metrics.precision)},
            {"accuracy", pct(r.metrics.accuracy)},
            {"repeats", r.repeats}};
}

}  // namespace

RunReport run(const RunConfig& cfg) {
    cfg.validate();
    namespace fs = std::filesystem;
    RunReport rep;
    Json stages = Json::array();
    Json timings = Json::object();
    const fs::path out = cfg.output_dir;
    fs::create_directories(out);

    const auto emit = [&](const std::string& name, const std::string& text) {
        write_text(out / name, text);
        rep.files.push_back(name);
    };
    const auto manifest = [&](const std::optional<std::string>& failed) {
        Json files = Json::array();
        for (const auto& f : rep.files) files.push_back(f);
        Json m{{"tool", "ggdfit"},
               {"version", std::string(kVersion)},
               {"config", to_json(cfg)},
               {"seed", cfg.seed},
               {"stages", stages},
               {"status", failed ? "FAILED" : "ok"},
               {"files", files},
               {"timings_file", "timings.json"},
               {"notes",
                {"KS summaries and the scan use one random acquisition per patient "
                 "(selection repeat 0); classification redraws the acquisition every repeat.",
                 "Wall-clock per stage is kept in timings.json so the other reports are "
                 "reproducible byte for byte."}}};
        if (failed) m["failed_stage"] = *failed;
        write_text(out / "manifest.json", m.dump(2) + "\n");
        write_text(out / "timings.json", timings.dump(2) + "\n");
    };
    const auto stage = [&](const std::string& name, const std::function<void()>& body) {
        const auto t0 = std::chrono::steady_clock::now();
        try {
            body();
        } catch (const std::exception& e) {
            stages.push_back({{"name", name}, {"status", "FAILED"}, {"error", e.what()}});
            timings[name] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
            manifest(name);
            throw StageError(name, e.what());
        }
        timings[name] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        stages.push_back({{"name", name}, {"status", "ok"}});
        rep.stages.push_back(name);
    };

    stage("ingest", [&] {
        rep.stacks = ingest(cfg.input_root);
        if (rep.stacks.empty()) throw IngestError(cfg.input_root.string() + ": no patients found");
    });
    stage("fit", [&] {
        rep.fits = fit_all(rep.stacks, cfg.method, cfg.fit, cfg.jobs);
        emit("fits.csv", fits_csv(rep.stacks, rep.fits));
        emit("failures.csv", failures_csv(rep.fits));
    });
    const ParamMap params = rep.fits.params();
    const Selection primary = draw_selection(rep.stacks, cfg.seed, 0);
    stage("gof", [&] {
        // failed images have no fit to test against
        std::vector<PatientStack> fitted = rep.stacks;
        for (auto& st : fitted) {
            for (std::size_t a = 0; a < st.acquisitions.size(); ++a) {
                std::erase_if(st.acquisitions[a], [&](const auto& kv) {
                    return !params.count(ImageKey{st.patient, a, kv.first});
                });
            }
        }
        rep.ks = mean_ks_by_depth(fitted, params, &primary);
        std::ostringstream os;
        write_ks_csv(os, rep.ks);
        emit("ks_by_depth.csv", os.str());
    });
    stage("selection", [&] {
        rep.curves = average_over_selections(params, rep.stacks, cfg.selection_repeats, cfg.seed);
        emit("selection_curves.csv", curves_csv(rep.curves));
    });
    stage("scan", [&] {
        std::map<std::string, Label> labels;
        for (const auto& st : rep.stacks) labels[st.patient] = st.label;
        rep.scan = scan_depths(selected_params(params, rep.stacks, primary), labels,
                               {cfg.pfa, cfg.bf_variant});
        std::ostringstream os;
        write_scan_csv(os, rep.scan.rows);
        emit("scan.csv", os.str());
        emit("scan_summary.json", scan_summary_json(rep.scan, cfg.pfa).dump(2) + "\n");
    });
    stage("classify", [&] {
        Json all = Json::array();
        for (ParamName p : cfg.classify_params) {
            const auto data = window_features(params, rep.stacks, p, cfg.window_lo_um, cfg.window_hi_um);
            LooConfig lc;
            lc.svm.c = cfg.svm_c;
            lc.repeats = cfg.loo_repeats;
            lc.seed = cfg.seed;
            lc.standardize = cfg.standardize;
            const LooResult r = leave_one_out(data, lc);
            rep.classification[p] = r;
            std::ostringstream os;
            write_confusion_csv(os, r.confusion);
            emit("confusion_" + std::string(to_string(p)) + ".csv", os.str());
            all.push_back(metrics_json(p, r));
        }
        emit("classification.json", all.dump(2) + "\n");
    });
    manifest(std::nullopt);
    return rep;
}

}  // namespace ggd
