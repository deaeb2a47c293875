#include "ggd/gof.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>

#include "ggd/error.hpp"
#include "ggd/format.hpp"

namespace ggd {

KsReport ks_statistic(const Sample& s, const GgdParams& p) {
    p.validate();
    std::vector<double> x(s.values().begin(), s.values().end());
    std::sort(x.begin(), x.end());
    const double n = static_cast<double>(x.size());
    double d = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double f = cdf(x[i], p);
        const double hi = static_cast<double>(i + 1) / n;
        const double lo = static_cast<double>(i) / n;
        d = std::max({d, std::abs(hi - f), std::abs(lo - f)});
    }
    return {std::min(d, 1.0), x.size(), 1.63 / std::sqrt(n)};
}

std::vector<DepthKs> mean_ks_by_depth(const std::vector<PatientStack>& stacks,
                                      const ParamMap& fits, const Selection* selection) {
    std::map<DepthCode, std::pair<double, std::size_t>> acc;
    for (const auto& st : stacks) {
        for (std::size_t a = 0; a < st.acquisitions.size(); ++a) {
            if (selection) {
                const auto it = selection->find(st.patient);
                if (it != selection->end() && it->second != a) continue;
            }
            for (const auto& [depth, img] : st.acquisitions[a]) {
                const auto f = fits.find(ImageKey{st.patient, a, depth});
                if (f == fits.end()) {
                    throw IncompleteInput("no fit for " + st.patient + " acquisition " +
                                          std::to_string(a) + " depth " + depth_string(depth));
                }
                auto& [sum, count] = acc[depth];
                sum += ks_statistic(img.sample, f->second).statistic;
                ++count;
            }
        }
    }
    std::vector<DepthKs> out;
    for (const auto& [depth, sc] : acc) {
        out.push_back({depth, sc.first / static_cast<double>(sc.second), sc.second});
    }
    return out;
}

void write_ks_csv(std::ostream& os, const std::vector<DepthKs>& rows) {
    os << "depth_um,mean_ks,n_images\n";
    for (const auto& r : rows) {
        os << depth_string(r.depth) << ',' << fmt_double(r.mean_ks) << ',' << r.n_images << '\n';
    }
}

}  // namespace ggd
