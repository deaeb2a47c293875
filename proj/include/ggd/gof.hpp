#pragma once

#include <iosfwd>
#include <vector>

#include "ggd/cohort.hpp"

namespace ggd {

struct KsReport {
    double statistic = 0.0;
    std::size_t n = 0;
    double band_99 = 0.0;  // 1.63 / sqrt(n)
};

[[nodiscard]] KsReport ks_statistic(const Sample& s, const GgdParams& p);

struct DepthKs {
    DepthCode depth = 0;
    double mean_ks = 0.0;
    std::size_t n_images = 0;
};

/// Mean KS statistic per depth over all images (or only the selected
/// acquisition of each patient when `selection` is given). Throws
/// IncompleteInput when an image has no entry in `fits`.
[[nodiscard]] std::vector<DepthKs> mean_ks_by_depth(const std::vector<PatientStack>& stacks,
                                                    const ParamMap& fits,
                                                    const Selection* selection = nullptr);

void write_ks_csv(std::ostream& os, const std::vector<DepthKs>& rows);

}  // namespace ggd
