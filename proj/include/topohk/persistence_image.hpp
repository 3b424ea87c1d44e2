#pragma once

#include <vector>

#include "topohk/persistence.hpp"

namespace topohk {

// Persistence-image parameters. r0/r1 bound the filtration window, res is
// pixels per axis, sigma the Gaussian bandwidth in filtration units.
struct PiParams {
    double r0 = 0.4;
    double r1 = 1.2;
    int res = 10;
    double sigma = 0.1;

    void validate() const;
    int feature_dim() const { return 2 * res * res; }
};

// Concatenated H0 || H1 persistence-image vector, length 2*res^2.
struct TopoFeature {
    std::vector<double> values;
};

// Vectorize one windowed diagram onto a res x res grid over
// [r0, r1] x [0, r1 - r0] in birth-persistence coordinates. Each interval
// (b, d) contributes a Gaussian bump at (b, d - b), weighted by
// (d - b)/(r1 - r0), evaluated at pixel centers and scaled by pixel area.
// Layout is row-major over (birth index, persistence index).
std::vector<double> persistence_image(const WindowedDiagram& diag, const PiParams& params);

// Full per-graph feature: Rips up to r1, persistence, windowing, one image
// per homology dimension, concatenated H0 then H1.
TopoFeature hk_feature_vector(const DistanceMatrix& dist, const PiParams& params);

}  // namespace topohk
