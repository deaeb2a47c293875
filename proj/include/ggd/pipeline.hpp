#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "ggd/benchmark.hpp"
#include "ggd/classify.hpp"
#include "ggd/cohort.hpp"
#include "ggd/error.hpp"
#include "ggd/estimation.hpp"
#include "ggd/gof.hpp"
#include "ggd/hypothesis.hpp"

namespace ggd {

/// Reads root/<patient>/<label>/<acquisition>/<depth x 100>.(pgm|csv).
/// Regular files directly under root are ignored. A missing or empty root
/// yields an empty list.
[[nodiscard]] std::vector<PatientStack> ingest(const std::filesystem::path& root);

struct FitFailure {
    ImageKey key;
    std::string source;
    std::string reason;
};

struct FitTable {
    std::map<ImageKey, FitResult> fits;
    std::vector<FitFailure> failures;

    [[nodiscard]] ParamMap params() const;
};

/// Fits every image; failures (exceptions or non-convergence) are recorded,
/// never thrown.
[[nodiscard]] FitTable fit_all(const std::vector<PatientStack>& stacks, Method method,
                               const FitConfig& cfg, std::size_t jobs = 1);

/// One acquisition index per patient, drawn for the given repeat.
[[nodiscard]] Selection draw_selection(const std::vector<PatientStack>& stacks,
                                       std::uint64_t seed, std::size_t repeat);

struct SelectionCurve {
    Label label = Label::Healthy;
    DepthCode depth = 0;
    std::size_t n_patients = 0;
    Vec3 mean = Vec3::Zero();            // mean over repeats of the class average
    Vec3 selection_std = Vec3::Zero();   // spread of the class average over repeats
    Vec3 patient_std = Vec3::Zero();     // mean over repeats of the across-patient spread
};

/// Rows sorted by (label, depth). Images missing from `fits` are skipped.
[[nodiscard]] std::vector<SelectionCurve> average_over_selections(
    const ParamMap& fits, const std::vector<PatientStack>& stacks, std::size_t repeats,
    std::uint64_t seed);

/// Per-patient parameters at each depth for one selection.
[[nodiscard]] PatientParams selected_params(const ParamMap& fits,
                                            const std::vector<PatientStack>& stacks,
                                            const Selection& selection);

/// Per-patient features: one parameter's estimates at the depths in [lo, hi] um.
[[nodiscard]] std::vector<PatientFeatures> window_features(const ParamMap& fits,
                                                           const std::vector<PatientStack>& stacks,
                                                           ParamName param, double lo_um,
                                                           double hi_um);

// ---------------------------------------------------------------------------
// Synthetic cohorts

struct ProfileKnot {
    double depth_um = 0.0;
    GgdParams params;
};

/// Piecewise-linear depth profile; constant beyond the end knots.
struct DepthProfile {
    std::vector<ProfileKnot> knots;

    [[nodiscard]] GgdParams at(double depth_um) const;
};

struct ClassSpec {
    std::size_t n_patients = 0;
    DepthProfile profile;
};

struct CohortSpec {
    std::vector<DepthCode> depths;
    ClassSpec healthy;
    ClassSpec lentigo;
    std::size_t acquisitions = 2;
    std::size_t width = 128;
    std::size_t height = 128;
    /// Patient random effects: additive for gamma, relative for beta and rho.
    std::array<double, 3> patient_sd{5.0, 0.05, 0.05};
    /// Lag-one correlation of the random effects between adjacent depths.
    double depth_correlation = 0.8;
    std::uint64_t seed = 1;

    void validate() const;
};

/// 18 healthy and 27 lentigo patients, 25 depths every 4.5 um from 0 to
/// 108 um, two acquisitions of 128 x 128 pixels. With `separated`, lentigo
/// beta is raised by four patient standard deviations at 40 to 60 um.
[[nodiscard]] CohortSpec default_cohort_spec(bool separated = true);

struct SyntheticCohort {
    std::vector<PatientStack> stacks;
    /// Ground-truth parameters per patient and depth (shared by acquisitions).
    PatientParams truth;
};

/// Pixels are rounded and clamped to [0, 65535] as in a 16-bit image.
[[nodiscard]] SyntheticCohort synthesize_cohort(const CohortSpec& spec);

/// Writes the cohort in the ingest layout plus truth.json and spec.json.
SyntheticCohort generate_synthetic_cohort(const CohortSpec& spec,
                                          const std::filesystem::path& out_dir);

// ---------------------------------------------------------------------------
// End-to-end run

struct RunConfig {
    std::filesystem::path input_root;
    std::filesystem::path output_dir = "out";
    FitConfig fit;
    Method method = Method::NaturalGradient;
    std::size_t selection_repeats = 300;
    double window_lo_um = 40.0;
    double window_hi_um = 60.0;
    double pfa = 0.05;
    BfVariant bf_variant = BfVariant::Verbatim;
    double svm_c = 1.0;
    std::size_t loo_repeats = 100;
    bool standardize = true;
    std::vector<ParamName> classify_params{ParamName::Beta, ParamName::Rho};
    std::uint64_t seed = 1;
    std::size_t jobs = 1;

    void validate() const;
};

/// Thrown when a stage fails; `stage()` names it.
class StageError : public Error {
public:
    StageError(std::string stage, const std::string& what)
        : Error(stage + ": " + what), stage_(std::move(stage)) {}
    [[nodiscard]] const std::string& stage() const noexcept { return stage_; }

private:
    std::string stage_;
};

struct RunReport {
    std::vector<PatientStack> stacks;
    FitTable fits;
    std::vector<DepthKs> ks;
    std::vector<SelectionCurve> curves;
    ScanResult scan;
    std::map<ParamName, LooResult> classification;
    std::vector<std::string> stages;  // completed, in order
    std::vector<std::string> files;   // written, relative to output_dir
};

/// ingest -> fit -> gof -> selection -> scan -> classify. Every report
/// except timings.json is a deterministic function of the configuration.
RunReport run(const RunConfig& cfg);

}  // namespace ggd
