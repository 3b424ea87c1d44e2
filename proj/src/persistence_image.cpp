#include "topohk/persistence_image.hpp"

#include <cmath>
#include <numbers>

#include "topohk/error.hpp"

namespace topohk {

void PiParams::validate() const {
    if (!(r0 < r1)) throw InvalidArgument("PiParams: requires r0 < r1");
    if (res < 1) throw InvalidArgument("PiParams: requires res >= 1");
    if (!(sigma > 0.0)) throw InvalidArgument("PiParams: requires sigma > 0");
}

std::vector<double> persistence_image(const WindowedDiagram& diag, const PiParams& params) {
    params.validate();
    const int res = params.res;
    const double span = params.r1 - params.r0;
    const double px = span / res;  // pixel width on both axes
    const double area = px * px;
    const double inv_two_sigma_sq = 1.0 / (2.0 * params.sigma * params.sigma);
    const double norm = 1.0 / (2.0 * std::numbers::pi * params.sigma * params.sigma);

    std::vector<double> image(static_cast<size_t>(res) * res, 0.0);
    for (const Interval& iv : diag.intervals) {
        const double b = iv.birth;
        const double pers = iv.death - iv.birth;
        const double weight = pers / span;
        for (int i = 0; i < res; ++i) {
            const double cx = params.r0 + (i + 0.5) * px;
            const double dx = cx - b;
            for (int j = 0; j < res; ++j) {
                const double cy = (j + 0.5) * px;
                const double dy = cy - pers;
                image[static_cast<size_t>(i) * res + j] +=
                    weight * norm * std::exp(-(dx * dx + dy * dy) * inv_two_sigma_sq) * area;
            }
        }
    }
    return image;
}

TopoFeature hk_feature_vector(const DistanceMatrix& dist, const PiParams& params) {
    params.validate();
    const auto complex = build_rips(dist, params.r1);
    auto [h0, h1] = compute_persistence(complex);
    const WindowedDiagram w0 = window_intervals(h0, params.r0, params.r1);
    const WindowedDiagram w1 = window_intervals(h1, params.r0, params.r1);

    TopoFeature feat;
    feat.values = persistence_image(w0, params);
    const auto img1 = persistence_image(w1, params);
    feat.values.insert(feat.values.end(), img1.begin(), img1.end());
    return feat;
}

}  // namespace topohk
