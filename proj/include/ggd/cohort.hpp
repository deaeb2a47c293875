#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "ggd/distribution.hpp"

namespace ggd {

enum class Label { Healthy, Lentigo, Unlabeled };

[[nodiscard]] std::string_view to_string(Label l);
[[nodiscard]] Label parse_label(std::string_view s);

/// Depth in hundredths of a micrometre (4950 is 49.5 um).
using DepthCode = std::int32_t;

[[nodiscard]] double depth_um(DepthCode d);
[[nodiscard]] std::string depth_string(DepthCode d);
[[nodiscard]] DepthCode depth_code(double um);

struct Image {
    Sample sample;
    std::string source;  // file path, or a synthetic tag
};

using Acquisition = std::map<DepthCode, Image>;

struct PatientStack {
    std::string patient;
    Label label = Label::Unlabeled;
    std::vector<Acquisition> acquisitions;

    /// Depth grid of the first acquisition.
    [[nodiscard]] std::vector<DepthCode> depths() const;
    /// Throws InvalidArgument if acquisitions disagree on the depth grid.
    void validate() const;
};

struct ImageKey {
    std::string patient;
    std::size_t acquisition = 0;
    DepthCode depth = 0;

    friend auto operator<=>(const ImageKey&, const ImageKey&) = default;
};

using ParamMap = std::map<ImageKey, GgdParams>;

/// Chosen acquisition index per patient.
using Selection = std::map<std::string, std::size_t>;

}  // namespace ggd
