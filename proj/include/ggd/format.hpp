#pragma once

#include <string>

namespace ggd {

/// Shortest round-trip decimal form; "nan", "inf", "-inf" for non-finite.
[[nodiscard]] std::string fmt_double(double v);

/// Fixed notation with `digits` decimals.
[[nodiscard]] std::string fmt_fixed(double v, int digits);

}  // namespace ggd
