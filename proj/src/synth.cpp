#include <algorithm>
#include <cmath>

#include <nlohmann/json.hpp>

#include "ggd/config.hpp"
#include "ggd/error.hpp"
#include "ggd/io.hpp"
#include "ggd/pipeline.hpp"
#include "ggd/rng.hpp"

namespace ggd {

GgdParams DepthProfile::at(double depth) const {
    if (knots.empty()) throw InvalidArgument("depth profile has no knots");
    if (depth <= knots.front().depth_um) return knots.front().params;
    if (depth >= knots.back().depth_um) return knots.back().params;
    const auto hi = std::upper_bound(knots.begin(), knots.end(), depth,
                                     [](double v, const ProfileKnot& k) { return v < k.depth_um; });
    const auto lo = hi - 1;
    const double w = (depth - lo->depth_um) / (hi->depth_um - lo->depth_um);
    const Vec3 v = (1.0 - w) * to_vec(lo->params) + w * to_vec(hi->params);
    return from_vec(v);
}

void CohortSpec::validate() const {
    if (depths.empty()) throw InvalidArgument("cohort: no depths");
    if (!std::is_sorted(depths.begin(), depths.end()) ||
        std::adjacent_find(depths.begin(), depths.end()) != depths.end()) {
        throw InvalidArgument("cohort: depths must be strictly increasing");
    }
    for (const ClassSpec* c : {&healthy, &lentigo}) {
        if (c->n_patients > 0 && c->profile.knots.empty()) {
            throw InvalidArgument("cohort: class profile has no knots");
        }
        for (std::size_t i = 0; i < c->profile.knots.size(); ++i) {
            c->profile.knots[i].params.validate();
            if (i > 0 && !(c->profile.knots[i].depth_um > c->profile.knots[i - 1].depth_um)) {
                throw InvalidArgument("cohort: profile knots must be strictly increasing in depth");
            }
        }
    }
    if (healthy.n_patients + lentigo.n_patients == 0) throw InvalidArgument("cohort: no patients");
    if (acquisitions < 1) throw InvalidArgument("cohort: acquisitions must be at least 1");
    if (width * height < 3) throw InvalidArgument("cohort: images need at least 3 pixels");
    for (double sd : patient_sd) {
        if (!(sd >= 0.0) || !std::isfinite(sd)) throw InvalidArgument("cohort: bad patient_sd");
    }
    if (!(std::abs(depth_correlation) < 1.0)) {
        throw InvalidArgument("cohort: depth_correlation must lie in (-1, 1)");
    }
}

CohortSpec default_cohort_spec(bool separated) {
    CohortSpec spec;
    for (int i = 0; i < 25; ++i) spec.depths.push_back(450 * i);
    const DepthProfile base{{{0.0, {100.0, 180.0, 3.0}},
                             {50.0, {100.0, 150.0, 4.0}},
                             {108.0, {100.0, 120.0, 3.5}}}};
    spec.healthy.n_patients = 18;
    spec.lentigo.n_patients = 27;
    const double shift = 1.0 + 4.0 * spec.patient_sd[1];
    for (DepthCode d : spec.depths) {
        const double um = depth_um(d);
        GgdParams h = base.at(um);
        GgdParams l = h;
        if (separated && um >= 40.0 && um <= 60.0) l.beta *= shift;
        spec.healthy.profile.knots.push_back({um, h});
        spec.lentigo.profile.knots.push_back({um, l});
    }
    return spec;
}

SyntheticCohort synthesize_cohort(const CohortSpec& spec) {
    spec.validate();
    SyntheticCohort out;
    const std::size_t total = spec.healthy.n_patients + spec.lentigo.n_patients;
    const std::size_t digits = std::to_string(total).size();
    const double phi = spec.depth_correlation;
    const double innov = std::sqrt(1.0 - phi * phi);
    for (std::size_t p = 0; p < total; ++p) {
        const bool is_healthy = p < spec.healthy.n_patients;
        const ClassSpec& cls = is_healthy ? spec.healthy : spec.lentigo;
        std::string id = std::to_string(p + 1);
        id = "P" + std::string(std::max<std::size_t>(digits, 2) - id.size(), '0') + id;

        Rng effects(derive_seed(spec.seed, 0xeffULL, p));
        Vec3 z(effects.normal(), effects.normal(), effects.normal());
        std::vector<GgdParams> truth;
        for (std::size_t i = 0; i < spec.depths.size(); ++i) {
            if (i > 0) {
                for (int k = 0; k < 3; ++k) z[k] = phi * z[k] + innov * effects.normal();
            }
            GgdParams t = cls.profile.at(depth_um(spec.depths[i]));
            t.gamma += spec.patient_sd[0] * z[0];
            t.beta *= std::max(0.2, 1.0 + spec.patient_sd[1] * z[1]);
            t.rho *= std::max(0.2, 1.0 + spec.patient_sd[2] * z[2]);
            truth.push_back(t);
            out.truth[id][spec.depths[i]] = t;
        }

        PatientStack st;
        st.patient = id;
        st.label = is_healthy ? Label::Healthy : Label::Lentigo;
        for (std::size_t a = 0; a < spec.acquisitions; ++a) {
            Acquisition acq;
            for (std::size_t i = 0; i < spec.depths.size(); ++i) {
                Rng rng(derive_seed(spec.seed, 0x91aULL, p, a, i));
                std::vector<double> px = draw(truth[i], spec.width * spec.height, rng);
                for (double& v : px) v = std::clamp(std::round(v), 0.0, 65535.0);
                acq.emplace(spec.depths[i],
                            Image{Sample(std::move(px)), "synthetic:" + id + "/" + std::to_string(a) +
                                                             "/" + std::to_string(spec.depths[i])});
            }
            st.acquisitions.push_back(std::move(acq));
        }
        out.stacks.push_back(std::move(st));
    }
    return out;
}

SyntheticCohort generate_synthetic_cohort(const CohortSpec& spec, const std::filesystem::path& out_dir) {
    SyntheticCohort cohort = synthesize_cohort(spec);
    for (auto& st : cohort.stacks) {
        for (std::size_t a = 0; a < st.acquisitions.size(); ++a) {
            for (auto& [d, img] : st.acquisitions[a]) {
                const auto path = out_dir / st.patient / std::string(to_string(st.label)) /
                                  ("acq_" + std::to_string(a + 1)) / (std::to_string(d) + ".pgm");
                GrayImage g;
                g.width = spec.width;
                g.height = spec.height;
                g.maxval = 65535;
                g.pixels.reserve(img.sample.size());
                for (double v : img.sample.values()) g.pixels.push_back(static_cast<std::uint16_t>(v));
                write_pgm16(path, g);
                img.source = path.string();
            }
        }
    }
    write_text(out_dir / "truth.json", truth_to_json(cohort.truth).dump(2) + "\n");
    write_text(out_dir / "spec.json", to_json(spec).dump(2) + "\n");
    return cohort;
}

}  // namespace ggd
