#pragma once

#include <nlohmann/json.hpp>

#include "ggd/benchmark.hpp"
#include "ggd/pipeline.hpp"

namespace ggd {

// JSON forms of the configuration types. Parsing rejects unknown keys and
// leaves absent keys at their defaults.

using Json = nlohmann::json;

[[nodiscard]] Json to_json(const GgdParams& p);
[[nodiscard]] GgdParams params_from_json(const Json& j);

[[nodiscard]] Json to_json(const FitConfig& c);
[[nodiscard]] FitConfig fit_config_from_json(const Json& j);

[[nodiscard]] Json to_json(const ExperimentConfig& c);
[[nodiscard]] ExperimentConfig experiment_from_json(const Json& j);

[[nodiscard]] Json to_json(const CohortSpec& c);
[[nodiscard]] CohortSpec cohort_spec_from_json(const Json& j);

/// Relative paths in the configuration are resolved against `base`.
[[nodiscard]] Json to_json(const RunConfig& c);
[[nodiscard]] RunConfig run_config_from_json(const Json& j,
                                             const std::filesystem::path& base = {});

[[nodiscard]] Json truth_to_json(const PatientParams& truth);
[[nodiscard]] Json to_json(const FitResult& r, bool with_trace);
[[nodiscard]] Json to_json(const MetricRow& r);

[[nodiscard]] Json parse_json_file(const std::filesystem::path& path);

}  // namespace ggd
