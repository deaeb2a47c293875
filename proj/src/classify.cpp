#include "ggd/classify.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "ggd/error.hpp"
#include "ggd/format.hpp"
#include "ggd/rng.hpp"

namespace ggd {

namespace {

std::optional<double> ratio(double num, double den) {
    if (!(den > 0.0)) return std::nullopt;
    return 100.0 * num / den;
}

double sign_of(Label l) { return l == Label::Lentigo ? 1.0 : -1.0; }

}  // namespace

Metrics metrics(const ConfusionMatrix& cm) {
    return {ratio(cm.tp, cm.tp + cm.fn), ratio(cm.tn, cm.fp + cm.tn), ratio(cm.tp, cm.tp + cm.fp),
            ratio(cm.tp + cm.tn, cm.total())};
}

double report_percent(double pct) {
    // the small offset keeps exact decimals such as 72.2 from dropping to 72.1
    return std::floor(pct * 10.0 + 1e-9) / 10.0;
}

double LinearModel::decision(const std::vector<double>& x) const {
    if (static_cast<Eigen::Index>(x.size()) != w.size()) {
        throw InvalidArgument("decision: feature dimension mismatch");
    }
    double d = b;
    for (std::size_t j = 0; j < x.size(); ++j) d += w[static_cast<Eigen::Index>(j)] * x[j];
    return d;
}

Label LinearModel::predict(const std::vector<double>& x) const {
    return decision(x) >= 0.0 ? Label::Lentigo : Label::Healthy;
}

double svm_objective(const LinearModel& m, const std::vector<FeatureVector>& data, double c) {
    double obj = 0.5 * (m.w.squaredNorm() + m.b * m.b);
    for (const auto& fv : data) obj += c * std::max(0.0, 1.0 - sign_of(fv.label) * m.decision(fv.features));
    return obj;
}

LinearModel train_svm(const std::vector<FeatureVector>& data, const SvmOptions& opt) {
    if (!(opt.c > 0.0)) throw InvalidArgument("train_svm: c must be positive");
    if (data.empty()) throw DegenerateTraining("train_svm: no training data");
    const std::size_t dim = data.front().features.size();
    bool pos = false, neg = false;
    for (const auto& fv : data) {
        if (fv.features.size() != dim) throw InvalidArgument("train_svm: feature dimensions differ");
        if (fv.label == Label::Lentigo) pos = true;
        else if (fv.label == Label::Healthy) neg = true;
        else throw InvalidArgument("train_svm: unlabeled patient " + fv.patient);
    }
    if (!pos || !neg) throw DegenerateTraining("train_svm: training data holds a single class");

    const auto n = static_cast<Eigen::Index>(data.size());
    const auto d = static_cast<Eigen::Index>(dim) + 1;
    Eigen::MatrixXd x(n, d);  // rows already multiplied by their label
    for (Eigen::Index i = 0; i < n; ++i) {
        const double y = sign_of(data[static_cast<std::size_t>(i)].label);
        for (Eigen::Index j = 0; j + 1 < d; ++j) {
            x(i, j) = y * data[static_cast<std::size_t>(i)].features[static_cast<std::size_t>(j)];
        }
        x(i, d - 1) = y;
    }
    const Eigen::VectorXd q = x.rowwise().squaredNorm();
    Eigen::VectorXd alpha = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd w = Eigen::VectorXd::Zero(d);

    for (std::size_t epoch = 0; epoch < opt.max_epochs; ++epoch) {
        for (Eigen::Index i = 0; i < n; ++i) {
            const double g = x.row(i).dot(w) - 1.0;
            const double a = std::clamp(alpha[i] - g / q[i], 0.0, opt.c);
            if (a != alpha[i]) {
                w += (a - alpha[i]) * x.row(i).transpose();
                alpha[i] = a;
            }
        }
        const double half = 0.5 * w.squaredNorm();
        const double hinge = (1.0 - (x * w).array()).max(0.0).sum();
        const double primal = half + opt.c * hinge;
        const double dual = alpha.sum() - half;
        if (primal - dual <= opt.tol * std::max(1.0, std::abs(primal))) break;
    }
    LinearModel m;
    m.w = w.head(d - 1);
    m.b = w[d - 1];
    return m;
}

Standardizer Standardizer::fit(const std::vector<FeatureVector>& data) {
    Standardizer s;
    if (data.empty()) return s;
    const std::size_t dim = data.front().features.size();
    const double n = static_cast<double>(data.size());
    s.mean.assign(dim, 0.0);
    s.scale.assign(dim, 1.0);
    for (const auto& fv : data) {
        for (std::size_t j = 0; j < dim; ++j) s.mean[j] += fv.features[j];
    }
    for (double& m : s.mean) m /= n;
    for (std::size_t j = 0; j < dim; ++j) {
        double ss = 0.0;
        for (const auto& fv : data) ss += (fv.features[j] - s.mean[j]) * (fv.features[j] - s.mean[j]);
        const double sd = std::sqrt(ss / n);
        if (sd > 0.0) s.scale[j] = sd;
    }
    return s;
}

std::vector<double> Standardizer::apply(const std::vector<double>& x) const {
    std::vector<double> out(x.size());
    for (std::size_t j = 0; j < x.size(); ++j) out[j] = (x[j] - mean[j]) / scale[j];
    return out;
}

LooResult leave_one_out(const std::vector<PatientFeatures>& data, const LooConfig& cfg) {
    if (data.size() < 3) throw InvalidArgument("leave_one_out: needs at least three patients");
    if (cfg.repeats < 1) throw InvalidArgument("leave_one_out: repeats must be at least 1");
    for (const auto& p : data) {
        if (p.acquisitions.empty()) {
            throw InvalidArgument("leave_one_out: patient " + p.patient + " has no features");
        }
    }

    ConfusionMatrix sum;
    std::vector<FeatureVector> chosen(data.size());
    for (std::size_t r = 0; r < cfg.repeats; ++r) {
        for (std::size_t i = 0; i < data.size(); ++i) {
            const auto& p = data[i];
            std::size_t a = 0;
            if (p.acquisitions.size() > 1) {
                Rng rng(derive_seed(cfg.seed, 0x100ULL, r, i));
                a = static_cast<std::size_t>(rng.below(p.acquisitions.size()));
            }
            chosen[i] = {p.patient, p.label, p.acquisitions[a]};
        }
        std::vector<FeatureVector> train;
        train.reserve(chosen.size() - 1);
        for (std::size_t held = 0; held < chosen.size(); ++held) {
            train.clear();
            for (std::size_t i = 0; i < chosen.size(); ++i) {
                if (i != held) train.push_back(chosen[i]);
            }
            std::vector<double> probe = chosen[held].features;
            if (cfg.standardize) {
                const Standardizer z = Standardizer::fit(train);
                for (auto& fv : train) fv.features = z.apply(fv.features);
                probe = z.apply(probe);
            }
            const Label pred = train_svm(train, cfg.svm).predict(probe);
            const bool pos = chosen[held].label == Label::Lentigo;
            if (pos) (pred == Label::Lentigo ? sum.tp : sum.fn) += 1.0;
            else (pred == Label::Lentigo ? sum.fp : sum.tn) += 1.0;
        }
    }
    const double reps = static_cast<double>(cfg.repeats);
    LooResult out;
    out.confusion = {sum.tp / reps, sum.fn / reps, sum.fp / reps, sum.tn / reps};
    out.metrics = metrics(out.confusion);
    out.repeats = cfg.repeats;
    return out;
}

void write_confusion_csv(std::ostream& os, const ConfusionMatrix& cm) {
    const auto pct = [](std::optional<double> v) {
        return v ? fmt_fixed(report_percent(*v), 1) : std::string("undefined");
    };
    const Metrics m = metrics(cm);
    const auto npv = ratio(cm.tn, cm.tn + cm.fn);
    os << "row,predicted_lentigo,predicted_healthy,rate\n";
    os << "lentigo," << fmt_double(cm.tp) << ',' << fmt_double(cm.fn) << ',' << pct(m.sensitivity) << '\n';
    os << "healthy," << fmt_double(cm.fp) << ',' << fmt_double(cm.tn) << ',' << pct(m.specificity) << '\n';
    os << "precision," << pct(m.precision) << ',' << pct(npv) << ",\n";
    os << "accuracy," << pct(m.accuracy) << ",,\n";
}

}  // namespace ggd
