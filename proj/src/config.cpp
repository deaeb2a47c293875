#include "ggd/config.hpp"

#include <initializer_list>

#include "ggd/error.hpp"
#include "ggd/io.hpp"

namespace ggd {

namespace {

void check_keys(const Json& j, std::initializer_list<std::string_view> allowed, const char* what) {
    if (!j.is_object()) throw InvalidArgument(std::string(what) + ": expected a JSON object");
    for (const auto& [key, _] : j.items()) {
        bool ok = false;
        for (auto a : allowed) ok = ok || key == a;
        if (!ok) throw InvalidArgument(std::string(what) + ": unknown key '" + key + "'");
    }
}

template <typename T>
void read(const Json& j, const char* key, T& out) {
    if (j.contains(key)) out = j.at(key).get<T>();
}

Json method_list(const std::vector<Method>& ms) {
    Json a = Json::array();
    for (Method m : ms) a.push_back(std::string(to_string(m)));
    return a;
}

}  // namespace

Json to_json(const GgdParams& p) { return {{"gamma", p.gamma}, {"beta", p.beta}, {"rho", p.rho}}; }

GgdParams params_from_json(const Json& j) {
    check_keys(j, {"gamma", "beta", "rho"}, "params");
    GgdParams p{j.at("gamma").get<double>(), j.at("beta").get<double>(), j.at("rho").get<double>()};
    p.validate();
    return p;
}

Json to_json(const FitConfig& c) {
    Json j{{"step_size", c.step_size},
           {"max_iters", c.max_iters},
           {"rel_tol", c.rel_tol},
           {"eps_shape", c.eps_shape}};
    j["eps_support"] = c.eps_support ? Json(*c.eps_support) : Json(nullptr);
    return j;
}

FitConfig fit_config_from_json(const Json& j) {
    check_keys(j, {"step_size", "max_iters", "rel_tol", "eps_support", "eps_shape"}, "fit");
    FitConfig c;
    read(j, "step_size", c.step_size);
    read(j, "max_iters", c.max_iters);
    read(j, "rel_tol", c.rel_tol);
    read(j, "eps_shape", c.eps_shape);
    if (j.contains("eps_support") && !j.at("eps_support").is_null()) {
        c.eps_support = j.at("eps_support").get<double>();
    }
    c.validate();
    return c;
}

Json to_json(const ExperimentConfig& c) {
    Json j{{"truth", to_json(c.truth)},
           {"sample_sizes", c.sample_sizes},
           {"realizations", c.realizations},
           {"methods", method_list(c.methods)},
           {"seed", c.seed},
           {"fit", to_json(c.fit)},
           {"jobs", c.jobs}};
    if (c.sweep) {
        j["sweep"] = {{"parameter", std::string(to_string(c.sweep->parameter))},
                      {"values", c.sweep->values}};
    }
    return j;
}

ExperimentConfig experiment_from_json(const Json& j) {
    check_keys(j, {"truth", "sample_sizes", "realizations", "methods", "seed", "sweep", "fit", "jobs"},
               "experiment");
    ExperimentConfig c;
    if (j.contains("truth")) c.truth = params_from_json(j.at("truth"));
    read(j, "sample_sizes", c.sample_sizes);
    read(j, "realizations", c.realizations);
    read(j, "seed", c.seed);
    read(j, "jobs", c.jobs);
    if (j.contains("methods")) {
        c.methods.clear();
        for (const auto& m : j.at("methods")) c.methods.push_back(parse_method(m.get<std::string>()));
    }
    if (j.contains("fit")) c.fit = fit_config_from_json(j.at("fit"));
    if (j.contains("sweep")) {
        const Json& s = j.at("sweep");
        check_keys(s, {"parameter", "values"}, "sweep");
        c.sweep = Sweep{parse_param_name(s.at("parameter").get<std::string>()),
                        s.at("values").get<std::vector<double>>()};
    }
    c.validate();
    return c;
}

Json to_json(const CohortSpec& c) {
    const auto cls = [](const ClassSpec& s) {
        Json knots = Json::array();
        for (const auto& k : s.profile.knots) {
            Json kj = to_json(k.params);
            kj["depth_um"] = k.depth_um;
            knots.push_back(kj);
        }
        return Json{{"n_patients", s.n_patients}, {"profile", knots}};
    };
    Json depths = Json::array();
    for (DepthCode d : c.depths) depths.push_back(depth_um(d));
    return {{"depths_um", depths},
            {"healthy", cls(c.healthy)},
            {"lentigo", cls(c.lentigo)},
            {"acquisitions", c.acquisitions},
            {"width", c.width},
            {"height", c.height},
            {"patient_sd", {{"gamma", c.patient_sd[0]}, {"beta", c.patient_sd[1]}, {"rho", c.patient_sd[2]}}},
            {"depth_correlation", c.depth_correlation},
            {"seed", c.seed}};
}

CohortSpec cohort_spec_from_json(const Json& j) {
    check_keys(j,
               {"depths_um", "healthy", "lentigo", "acquisitions", "width", "height", "patient_sd",
                "depth_correlation", "seed", "preset"},
               "cohort");
    CohortSpec c = default_cohort_spec(j.value("preset", std::string("separated")) != "null");
    if (j.contains("preset")) {
        const auto p = j.at("preset").get<std::string>();
        if (p != "separated" && p != "null") {
            throw InvalidArgument("cohort: preset must be 'separated' or 'null'");
        }
    }
    if (j.contains("depths_um")) {
        c.depths.clear();
        for (const auto& d : j.at("depths_um")) c.depths.push_back(depth_code(d.get<double>()));
    }
    const auto cls = [](const Json& s, ClassSpec& out) {
        check_keys(s, {"n_patients", "profile"}, "cohort class");
        read(s, "n_patients", out.n_patients);
        if (s.contains("profile")) {
            out.profile.knots.clear();
            for (const auto& k : s.at("profile")) {
                Json p = k;
                const double depth = p.at("depth_um").get<double>();
                p.erase("depth_um");
                out.profile.knots.push_back({depth, params_from_json(p)});
            }
        }
    };
    if (j.contains("healthy")) cls(j.at("healthy"), c.healthy);
    if (j.contains("lentigo")) cls(j.at("lentigo"), c.lentigo);
    read(j, "acquisitions", c.acquisitions);
    read(j, "width", c.width);
    read(j, "height", c.height);
    read(j, "depth_correlation", c.depth_correlation);
    read(j, "seed", c.seed);
    if (j.contains("patient_sd")) {
        const Json& s = j.at("patient_sd");
        check_keys(s, {"gamma", "beta", "rho"}, "patient_sd");
        read(s, "gamma", c.patient_sd[0]);
        read(s, "beta", c.patient_sd[1]);
        read(s, "rho", c.patient_sd[2]);
    }
    c.validate();
    return c;
}

Json to_json(const RunConfig& c) {
    Json params = Json::array();
    for (ParamName p : c.classify_params) params.push_back(std::string(to_string(p)));
    return {{"input_root", c.input_root.generic_string()},
            {"output_dir", c.output_dir.generic_string()},
            {"fit", to_json(c.fit)},
            {"method", std::string(to_string(c.method))},
            {"selection_repeats", c.selection_repeats},
            {"window_um", {c.window_lo_um, c.window_hi_um}},
            {"pfa", c.pfa},
            {"bf_variant", std::string(to_string(c.bf_variant))},
            {"svm_c", c.svm_c},
            {"loo_repeats", c.loo_repeats},
            {"standardize", c.standardize},
            {"classify_params", params},
            {"seed", c.seed},
            {"jobs", c.jobs}};
}

RunConfig run_config_from_json(const Json& j, const std::filesystem::path& base) {
    check_keys(j,
               {"input_root", "output_dir", "fit", "method", "selection_repeats", "window_um", "pfa",
                "bf_variant", "svm_c", "loo_repeats", "standardize", "classify_params", "seed",
                "jobs"},
               "run");
    RunConfig c;
    const auto path = [&](const char* key, std::filesystem::path& out) {
        if (!j.contains(key)) return;
        std::filesystem::path p = j.at(key).get<std::string>();
        out = p.is_relative() && !base.empty() ? base / p : p;
    };
    path("input_root", c.input_root);
    path("output_dir", c.output_dir);
    if (j.contains("fit")) c.fit = fit_config_from_json(j.at("fit"));
    if (j.contains("method")) c.method = parse_method(j.at("method").get<std::string>());
    read(j, "selection_repeats", c.selection_repeats);
    if (j.contains("window_um")) {
        const auto w = j.at("window_um").get<std::vector<double>>();
        if (w.size() != 2) throw InvalidArgument("run: window_um must hold two depths");
        c.window_lo_um = w[0];
        c.window_hi_um = w[1];
    }
    read(j, "pfa", c.pfa);
    if (j.contains("bf_variant")) c.bf_variant = parse_bf_variant(j.at("bf_variant").get<std::string>());
    read(j, "svm_c", c.svm_c);
    read(j, "loo_repeats", c.loo_repeats);
    read(j, "standardize", c.standardize);
    if (j.contains("classify_params")) {
        c.classify_params.clear();
        for (const auto& p : j.at("classify_params")) {
            c.classify_params.push_back(parse_param_name(p.get<std::string>()));
        }
    }
    read(j, "seed", c.seed);
    read(j, "jobs", c.jobs);
    c.validate();
    return c;
}

Json truth_to_json(const PatientParams& truth) {
    Json j = Json::object();
    for (const auto& [patient, by_depth] : truth) {
        Json rows = Json::array();
        for (const auto& [d, p] : by_depth) {
            Json r = to_json(p);
            r["depth_um"] = depth_um(d);
            rows.push_back(r);
        }
        j[patient] = rows;
    }
    return j;
}

Json to_json(const FitResult& r, bool with_trace) {
    Json j{{"method", std::string(to_string(r.method))},
           {"params", to_json(r.params)},
           {"log_likelihood", r.log_likelihood},
           {"iterations", r.iterations},
           {"converged", r.converged},
           {"elapsed_s", r.elapsed}};
    if (with_trace) {
        Json t = Json::array();
        for (const auto& p : r.trace) {
            t.push_back({{"iteration", p.iteration},
                         {"params", to_json(p.params)},
                         {"log_likelihood", p.log_likelihood}});
        }
        j["trace"] = t;
    }
    return j;
}

Json to_json(const MetricRow& r) {
    const auto v = [](const Vec3& x) { return Json{x[0], x[1], x[2]}; };
    Json j{{"method", std::string(to_string(r.method))},
           {"n", r.n},
           {"truth", to_json(r.truth)},
           {"bias", v(r.bias)},
           {"variance", v(r.variance)},
           {"rmse", v(r.rmse)},
           {"root_rmse", v(r.root_rmse)},
           {"mean_elapsed_s", r.mean_elapsed},
           {"convergence_rate", r.convergence_rate},
           {"failures", r.failures}};
    if (r.sweep_param) {
        j["sweep_param"] = std::string(to_string(*r.sweep_param));
        j["sweep_value"] = r.sweep_value;
    }
    return j;
}

Json parse_json_file(const std::filesystem::path& path) {
    try {
        return Json::parse(read_text(path));
    } catch (const Json::parse_error& e) {
        throw InvalidArgument(path.string() + ": " + e.what());
    }
}

}  // namespace ggd
