#include "ggd/cohort.hpp"

#include <cmath>
#include <cstdlib>

#include "ggd/error.hpp"

namespace ggd {

std::string_view to_string(Label l) {
    switch (l) {
        case Label::Healthy: return "healthy";
        case Label::Lentigo: return "lentigo";
        case Label::Unlabeled: return "unlabeled";
    }
    return "unlabeled";
}

Label parse_label(std::string_view s) {
    if (s == "healthy") return Label::Healthy;
    if (s == "lentigo") return Label::Lentigo;
    if (s == "unlabeled") return Label::Unlabeled;
    throw InvalidArgument("unknown label '" + std::string(s) + "'");
}

double depth_um(DepthCode d) { return static_cast<double>(d) / 100.0; }

std::string depth_string(DepthCode d) {
    const DepthCode a = std::abs(d);
    std::string out = (d < 0 ? "-" : "") + std::to_string(a / 100);
    DepthCode frac = a % 100;
    if (frac != 0) {
        out += '.';
        out += static_cast<char>('0' + frac / 10);
        if (frac % 10 != 0) out += static_cast<char>('0' + frac % 10);
    }
    return out;
}

DepthCode depth_code(double um) { return static_cast<DepthCode>(std::lround(um * 100.0)); }

std::vector<DepthCode> PatientStack::depths() const {
    std::vector<DepthCode> out;
    if (acquisitions.empty()) return out;
    for (const auto& [d, _] : acquisitions.front()) out.push_back(d);
    return out;
}

void PatientStack::validate() const {
    if (acquisitions.empty()) throw InvalidArgument("patient " + patient + ": no acquisitions");
    const auto grid = depths();
    for (std::size_t k = 1; k < acquisitions.size(); ++k) {
        std::vector<DepthCode> other;
        for (const auto& [d, _] : acquisitions[k]) other.push_back(d);
        if (other != grid) {
            throw InvalidArgument("patient " + patient + ": acquisition " + std::to_string(k) +
                                  " has a different depth grid");
        }
    }
}

}  // namespace ggd
