#include "ggd/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <thread>

#include "ggd/error.hpp"
#include "ggd/io.hpp"
#include "ggd/rng.hpp"

namespace fs = std::filesystem;

namespace ggd {

namespace {

std::vector<fs::path> sorted_entries(const fs::path& dir) {
    std::vector<fs::path> out;
    for (const auto& e : fs::directory_iterator(dir)) {
        const auto name = e.path().filename().string();
        if (!name.empty() && name.front() == '.') continue;
        out.push_back(e.path());
    }
    std::sort(out.begin(), out.end());
    return out;
}

// Orders "acq_2" before "acq_10".
bool natural_less(const fs::path& a, const fs::path& b) {
    const auto split = [](const std::string& s) {
        std::size_t i = s.size();
        while (i > 0 && std::isdigit(static_cast<unsigned char>(s[i - 1]))) --i;
        long long num = -1;
        if (i < s.size()) std::from_chars(s.data() + i, s.data() + s.size(), num);
        return std::pair{s.substr(0, i), num};
    };
    return split(a.filename().string()) < split(b.filename().string());
}

Image load_image(const fs::path& file) {
    const auto ext = file.extension().string();
    std::vector<double> values;
    if (ext == ".pgm") {
        const GrayImage img = read_pgm(file);
        values.assign(img.pixels.begin(), img.pixels.end());
    } else {
        values = read_value_csv(file);
    }
    if (values.empty()) throw IngestError(file.string() + ": no values");
    return {Sample(std::move(values)), file.string()};
}

DepthCode parse_depth_stem(const fs::path& file) {
    const auto stem = file.stem().string();
    DepthCode d = 0;
    const auto res = std::from_chars(stem.data(), stem.data() + stem.size(), d);
    if (res.ec != std::errc{} || res.ptr != stem.data() + stem.size() || d < 0) {
        throw IngestError(file.string() + ": file name must be the depth in um x 100");
    }
    return d;
}

}  // namespace

std::vector<PatientStack> ingest(const fs::path& root) {
    std::vector<PatientStack> out;
    if (!fs::exists(root)) return out;
    if (!fs::is_directory(root)) throw IngestError(root.string() + ": not a directory");
    for (const auto& pdir : sorted_entries(root)) {
        if (!fs::is_directory(pdir)) continue;
        PatientStack st;
        st.patient = pdir.filename().string();
        const auto labels = sorted_entries(pdir);
        if (labels.size() != 1 || !fs::is_directory(labels.front())) {
            throw IngestError(pdir.string() + ": expected exactly one label directory");
        }
        try {
            st.label = parse_label(labels.front().filename().string());
        } catch (const InvalidArgument&) {
            throw IngestError(labels.front().string() + ": unknown label directory");
        }
        auto acqs = sorted_entries(labels.front());
        std::sort(acqs.begin(), acqs.end(), natural_less);
        for (const auto& adir : acqs) {
            if (!fs::is_directory(adir)) {
                throw IngestError(adir.string() + ": expected an acquisition directory");
            }
            Acquisition acq;
            for (const auto& file : sorted_entries(adir)) {
                const auto ext = file.extension().string();
                if (!fs::is_regular_file(file) || (ext != ".pgm" && ext != ".csv")) {
                    throw IngestError(file.string() + ": expected a .pgm or .csv image");
                }
                const DepthCode d = parse_depth_stem(file);
                if (acq.count(d)) throw IngestError(file.string() + ": duplicate depth");
                acq.emplace(d, load_image(file));
            }
            if (acq.empty()) throw IngestError(adir.string() + ": no images");
            st.acquisitions.push_back(std::move(acq));
        }
        if (st.acquisitions.empty()) throw IngestError(labels.front().string() + ": no acquisitions");
        try {
            st.validate();
        } catch (const InvalidArgument& e) {
            throw IngestError(pdir.string() + ": " + e.what());
        }
        out.push_back(std::move(st));
    }
    return out;
}

ParamMap FitTable::params() const {
    ParamMap out;
    for (const auto& [k, r] : fits) out.emplace(k, r.params);
    return out;
}

FitTable fit_all(const std::vector<PatientStack>& stacks, Method method, const FitConfig& cfg,
                 std::size_t jobs) {
    struct Job {
        ImageKey key;
        const Image* image;
    };
    std::vector<Job> work;
    for (const auto& st : stacks) {
        for (std::size_t a = 0; a < st.acquisitions.size(); ++a) {
            for (const auto& [d, img] : st.acquisitions[a]) work.push_back({{st.patient, a, d}, &img});
        }
    }
    std::vector<std::optional<FitResult>> results(work.size());
    std::vector<std::string> errors(work.size());
    const auto one = [&](std::size_t i) {
        try {
            FitResult r = fit(method, work[i].image->sample, cfg);
            r.trace.clear();
            r.trace.shrink_to_fit();
            if (r.converged) results[i] = std::move(r);
            else errors[i] = "did not converge within " + std::to_string(cfg.max_iters) + " iterations";
        } catch (const std::exception& e) {
            errors[i] = e.what();
        }
    };
    if (jobs <= 1) {
        for (std::size_t i = 0; i < work.size(); ++i) one(i);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::jthread> pool;
        for (std::size_t j = 0; j < jobs; ++j) {
            pool.emplace_back([&] {
                for (std::size_t i = next++; i < work.size(); i = next++) one(i);
            });
        }
    }
    FitTable table;
    for (std::size_t i = 0; i < work.size(); ++i) {
        if (results[i]) table.fits.emplace(work[i].key, std::move(*results[i]));
        else table.failures.push_back({work[i].key, work[i].image->source, errors[i]});
    }
    return table;
}

Selection draw_selection(const std::vector<PatientStack>& stacks, std::uint64_t seed,
                         std::size_t repeat) {
    Selection sel;
    for (std::size_t i = 0; i < stacks.size(); ++i) {
        const auto& st = stacks[i];
        std::size_t a = 0;
        if (st.acquisitions.size() > 1) {
            Rng rng(derive_seed(seed, 0x5e1ULL, repeat, i));
            a = static_cast<std::size_t>(rng.below(st.acquisitions.size()));
        }
        sel[st.patient] = a;
    }
    return sel;
}

PatientParams selected_params(const ParamMap& fits, const std::vector<PatientStack>& stacks,
                              const Selection& selection) {
    PatientParams out;
    for (const auto& st : stacks) {
        const auto it = selection.find(st.patient);
        const std::size_t a = it == selection.end() ? 0 : it->second;
        if (a >= st.acquisitions.size()) continue;
        for (const auto& [d, _] : st.acquisitions[a]) {
            const auto f = fits.find(ImageKey{st.patient, a, d});
            if (f != fits.end()) out[st.patient][d] = f->second;
        }
    }
    return out;
}

std::vector<SelectionCurve> average_over_selections(const ParamMap& fits,
                                                    const std::vector<PatientStack>& stacks,
                                                    std::size_t repeats, std::uint64_t seed) {
    if (repeats < 1) throw InvalidArgument("average_over_selections: repeats must be at least 1");
    struct Acc {
        std::vector<Vec3> means;
        std::vector<Vec3> spreads;
        std::size_t n = 0;
    };
    std::map<std::pair<Label, DepthCode>, Acc> acc;
    std::map<std::string, Label> labels;
    for (const auto& st : stacks) labels[st.patient] = st.label;

    for (std::size_t r = 0; r < repeats; ++r) {
        const PatientParams sel = selected_params(fits, stacks, draw_selection(stacks, seed, r));
        std::map<std::pair<Label, DepthCode>, std::vector<Vec3>> groups;
        for (const auto& [patient, by_depth] : sel) {
            for (const auto& [d, p] : by_depth) groups[{labels[patient], d}].push_back(to_vec(p));
        }
        for (const auto& [key, vs] : groups) {
            Vec3 m = Vec3::Zero();
            for (const auto& v : vs) m += v;
            m /= static_cast<double>(vs.size());
            Vec3 ss = Vec3::Zero();
            for (const auto& v : vs) ss += (v - m).cwiseAbs2();
            const double dof = vs.size() > 1 ? static_cast<double>(vs.size() - 1) : 1.0;
            Acc& a = acc[key];
            a.means.push_back(m);
            a.spreads.push_back((ss / dof).cwiseSqrt());
            a.n = std::max(a.n, vs.size());
        }
    }
    std::vector<SelectionCurve> out;
    for (const auto& [key, a] : acc) {
        SelectionCurve c;
        c.label = key.first;
        c.depth = key.second;
        c.n_patients = a.n;
        const double k = static_cast<double>(a.means.size());
        for (const auto& m : a.means) c.mean += m;
        c.mean /= k;
        Vec3 ss = Vec3::Zero();
        for (const auto& m : a.means) ss += (m - c.mean).cwiseAbs2();
        c.selection_std = (ss / k).cwiseSqrt();
        for (const auto& s : a.spreads) c.patient_std += s;
        c.patient_std /= k;
        out.push_back(c);
    }
    return out;
}

std::vector<PatientFeatures> window_features(const ParamMap& fits,
                                             const std::vector<PatientStack>& stacks,
                                             ParamName param, double lo_um, double hi_um) {
    std::vector<PatientFeatures> out;
    for (const auto& st : stacks) {
        if (st.label == Label::Unlabeled) continue;
        PatientFeatures pf{st.patient, st.label, {}};
        for (std::size_t a = 0; a < st.acquisitions.size(); ++a) {
            std::vector<double> x;
            bool complete = true;
            for (const auto& [d, _] : st.acquisitions[a]) {
                const double um = depth_um(d);
                if (um < lo_um || um > hi_um) continue;
                const auto f = fits.find(ImageKey{st.patient, a, d});
                if (f == fits.end()) {
                    complete = false;
                    break;
                }
                x.push_back(to_vec(f->second)[static_cast<int>(param)]);
            }
            if (complete && !x.empty()) pf.acquisitions.push_back(std::move(x));
        }
        if (!pf.acquisitions.empty()) out.push_back(std::move(pf));
    }
    return out;
}

}  // namespace ggd
