#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "otlab/geometry.hpp"
#include "otlab/potential.hpp"

namespace otlab {

struct FieldSample {
    Vec2 point;
    double d = 0.0;       // boundary distance
    double proxy = 0.0;   // |D^2 u| surrogate
    double weight = 0.0;  // quadrature area
};

struct FieldOptions {
    double d0 = 0.125;      // coverage cutoff at level 0
    double d_min = 1e-4;    // cutoff floor (resolution limit of the proxy)
    int base_depth = 4;     // quadtree depth at level 0
    double cap = 0.01;      // section height cap for the discrete proxy
    int threads = 0;
    // When positive, thin the leaves (per log-distance stratum, weights
    // rescaled) so the field costs at most this many proxy evaluations.
    // Meant for section-based proxies, whose evaluation dominates.
    int max_samples = 0;
};

// Samples on a quadtree graded toward the domain boundary: leaves are split
// until they certifiably fit inside the domain at half their distance scale,
// coverage extends down to d_cut(level) = max(d0 * 2^-level, d_min). Each
// leaf contributes a 2x2 sub-sample. Analytic potentials supply the proxy in
// closed form; discrete ones go through the maximal-section eccentricity.
std::vector<FieldSample> hessian_field(const ConvexPotential& u, const HoledDomain& dom,
                                       int grid_level, const FieldOptions& opts = {});

struct NormReport {
    double p = 0.0;
    double value = 0.0;                     // at the deepest level
    std::vector<double> refinement_series;  // one value per level
};

// Compensated weighted power sum over one sample set.
double w2p_value(const std::vector<FieldSample>& samples, double p);

// Refinement series over successive sample sets (one per grid level).
NormReport w2p_estimate(const std::vector<std::vector<FieldSample>>& levels, double p);

struct SlopeFit {
    double slope = 0.0;
    double ci_lo = 0.0;
    double ci_hi = 0.0;
    int n_band = 0;     // samples inside the band
    int n_bins = 0;     // envelope points used
};

// Least-squares slope of log(proxy) against log(d) on the upper envelope
// (max proxy per d-bin, 20 log-spaced bins) inside [d_lo, d_hi].
// Throws UnderSampled with fewer than 50 samples in the band.
SlopeFit blowup_fit(const std::vector<FieldSample>& samples, double d_lo, double d_hi);

using PointPair = std::pair<Vec2, Vec2>;

// max over pairs of |grad u(x) - grad u(y)| / |x - y|^alpha.
double holder_seminorm(const ConvexPotential& u, const std::vector<PointPair>& pairs,
                       double alpha = 0.5);

// Pair sets for the seminorm: random chords inside the domain plus
// hole-boundary-straddling normal segments whose separations shrink with the
// pair count (so genuinely super-1/2 exponents blow up under refinement).
std::vector<PointPair> gradient_pair_set(const HoledDomain& dom, int count,
                                         std::uint64_t rng_seed);

}  // namespace otlab
