#pragma once

#include <optional>
#include <vector>

#include "otlab/geometry.hpp"
#include "otlab/potential.hpp"

namespace otlab {

// Default cap on section heights: below it a section meets at most one hole
// for the bundled configurations (checked at runtime where it matters).
inline constexpr double kHeightCap = 0.01;

// =====================================================================
//  Centered sections
// =====================================================================

// Sublevel set {u < L} of height h whose defining affine function L is
// tilted until the set's barycenter sits at the center point.
struct Section {
    Vec2 center;
    double height = 0.0;
    Vec2 slope;                 // gradient of L; L(z) = level + slope·(z - center)
    double level = 0.0;         // L(center) = u(center) + height
    ConvexPolygon poly;
    JohnBox box;                // enclosing rectangle, recentered at `center`
    int iterations = 0;
    double centering_error = 0.0;  // |barycenter - center| / diam at exit

    double lambda() const { return box.half_short; }
    double Lambda() const { return box.half_long; }
    double eccentricity() const { return box.eccentricity(); }
};

// Per-point acceleration for max-of-affine sublevel sets: seeds ordered by
// slack u(x) - (x·y_i - w_i), so a section of radius rho only needs the
// prefix with slack <= rho * |y_i - slope| + h.
struct DiscreteWorkspace {
    Vec2 x;
    double u_x = 0.0;
    std::vector<int> order;          // seed indices by ascending slack
    std::vector<double> slack;       // sorted slacks, same order
    double max_seed_norm = 0.0;

    static DiscreteWorkspace build(const DiscretePotential& u, const Vec2& x);
};

struct SectionOptions {
    int max_iterations = 200;
    double center_tol = 1e-6;   // relative to the sublevel-set diameter
    int rays = 512;             // polygonization rays for analytic potentials
    std::optional<Vec2> warm_slope;
    double window = 0.0;        // starting half-width for halfplane clipping
    const DiscreteWorkspace* workspace = nullptr;  // must match the center point
};

// Thrown when the barycenter iteration stalls; carries the best iterate.
struct CenteringFailure : Error {
    Section best;
    explicit CenteringFailure(Section s)
        : Error("centered_section: centering did not converge"), best(std::move(s)) {}
};

Section centered_section(const ConvexPotential& u, const Vec2& x, double h,
                         const SectionOptions& opts = {});

// =====================================================================
//  Maximal sections
// =====================================================================

struct MaxHeightResult {
    double height = 0.0;
    Section section;
    std::optional<Vec2> contact;  // boundary point realizing tangency, if any
};

// Largest h with the section polygon inside the source domain, by bisection
// in log height over [1e-12, cap].
MaxHeightResult max_height(const ConvexPotential& u, const HoledDomain& dom,
                           const Vec2& x, double cap = kHeightCap,
                           const SectionOptions& opts = {});

// =====================================================================
//  Diagnostics and the three-case classifier
// =====================================================================

enum class SectionCase { Bounded, InteriorLike, Transversal, ModelGeometry };

const char* to_string(SectionCase c);

struct ClassifierThresholds {
    double eps1 = 0.05;      // exterior area fraction
    double eps2 = 0.1;       // tangent chord / long half-axis
    double M1 = 4.0;         // height shrink after an interior-like step
    double M2 = 4.0;         // height shrink after a transversal step
    double eta_floor = 20.0; // eccentricities below this are Bounded
};

struct SectionDiagnostics {
    double exterior_fraction = 0.0;   // |box \ source| / |box|
    double tangent_length = 0.0;      // chord of the tangent line in the box
    double tangent_length_ratio = 0.0;  // tangent_length / Lambda
    double eccentricity = 1.0;
    double sup_distance = 0.0;        // max boundary distance over the box
    SectionCase case_label = SectionCase::Bounded;
};

// Box-based diagnostics. The tangent line is taken at the section center
// when it lies on a hole boundary, else at the nearest hole-boundary point
// (the line is always drawn through the center).
SectionDiagnostics diagnostics(const Section& sec, const HoledDomain& dom);

SectionCase classify(const SectionDiagnostics& d, const ClassifierThresholds& thr);

// =====================================================================
//  Engulfing audit
// =====================================================================

struct EngulfReport {
    double K = 1.0;        // smallest dilation of the boundary box containing the section
    Vec2 tangency;         // hole-boundary point used as the dilation center
    double height = 0.0;
};

// For a section at x of height h contained in the source domain and tangent
// to a hole: the smallest K >= 1 with the section inside the K-dilation
// (about the tangency point) of the box of the boundary-centered section of
// the same height. Throws NotApplicable when there is no tangency.
EngulfReport engulfing_check(const ConvexPotential& u, const HoledDomain& dom,
                             const Vec2& x, double h,
                             const SectionOptions& opts = {});

// =====================================================================
//  Eccentricity cascade
// =====================================================================

struct CascadeStep {
    double height = 0.0;
    double eta = 0.0;
    double lambda = 0.0;
    double Lambda = 0.0;
    SectionCase label = SectionCase::Bounded;
    double contraction = 1.0;  // box containment factor versus the previous step
};

struct CascadeTrace {
    std::vector<CascadeStep> steps;
    int k = 0;        // interior-like descents
    int l = 0;        // transversal descents
    int l_prime = 0;  // transversal descents where eccentricity increased
    double r = 1.0;   // accumulated contraction over the counted steps
    bool centering_failed = false;
};

// Starting from the cap height at a hole-boundary point, classify and
// descend by M1 (interior-like) or M2 (transversal) until the height drops
// below h_stop or a Bounded / ModelGeometry case ends the run.
CascadeTrace cascade(const ConvexPotential& u, const HoledDomain& dom, const Vec2& y,
                     double h_stop, const ClassifierThresholds& thr,
                     double h_start = kHeightCap, const SectionOptions& opts = {});

// Eccentricity of the maximal section: the |D^2 u| surrogate used for
// discrete potentials.
double hessian_proxy(const ConvexPotential& u, const HoledDomain& dom, const Vec2& x,
                     double cap = kHeightCap);

}  // namespace otlab
