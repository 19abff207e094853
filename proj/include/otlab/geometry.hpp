#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "otlab/error.hpp"
#include "otlab/vec2.hpp"

namespace otlab {

// Relative tolerance for geometric predicates (scaled by diameter).
inline constexpr double kGeomTol = 1e-12;
// Tolerance for projections onto analytic boundary curves.
inline constexpr double kProjTol = 1e-8;

// =====================================================================
//  Convex polygons
// =====================================================================

struct ConvexPolygon {
    std::vector<Vec2> v;  // counterclockwise, no duplicate consecutive vertices

    ConvexPolygon() = default;
    explicit ConvexPolygon(std::vector<Vec2> verts) : v(std::move(verts)) {}

    bool empty() const { return v.size() < 3; }
    double area() const;
    Vec2 centroid() const;
    double diameter() const;
    Vec2 bbox_min() const;
    Vec2 bbox_max() const;
    bool contains(const Vec2& p, double tol = 0.0) const;

    // Central second moments (integrals of (x-cx)^2 etc. over the polygon).
    struct Moments {
        double area = 0.0;
        Vec2 centroid;
        double cxx = 0.0, cxy = 0.0, cyy = 0.0;
    };
    Moments moments() const;

    // Throws DegeneratePolygon if convexity / separation / positive-area
    // invariants fail (tolerance 1e-12 relative to diameter).
    void validate() const;

    void ensure_ccw();
};

// poly ∩ {x : x·normal <= offset}. Empty result is a valid value.
ConvexPolygon clip_halfplane(const ConvexPolygon& poly, const Vec2& normal, double offset);

// Intersection of two convex polygons (clips a by the edges of b).
ConvexPolygon polygon_intersection(const ConvexPolygon& a, const ConvexPolygon& b);

ConvexPolygon regular_polygon(const Vec2& center, double circumradius, int n,
                              double phase = 0.0);
ConvexPolygon rectangle(const Vec2& lo, const Vec2& hi);
ConvexPolygon convex_hull(std::vector<Vec2> pts);

// =====================================================================
//  Enclosing rectangle
// =====================================================================

// Minimal-area enclosing rectangle of a convex polygon, with half side
// lengths half_long >= half_short and the empirical trapping factor: the
// largest alpha such that center + alpha*(box - center) fits inside the
// generating polygon.
struct JohnBox {
    Vec2 center;
    Vec2 axis;            // unit direction of the long side
    double half_long = 0.0;
    double half_short = 0.0;
    double trapping = 0.0;

    double eccentricity() const { return half_long / half_short; }
    double area() const { return 4.0 * half_long * half_short; }
    ConvexPolygon polygon() const;
    JohnBox recentered(const Vec2& c) const;
    // Dilation norm: smallest k with p inside the k-times dilation of the
    // box about its center.
    double box_norm(const Vec2& p) const;
};

JohnBox min_area_rectangle(const ConvexPolygon& poly);

// =====================================================================
//  Domains with convex holes
// =====================================================================

struct ConvexHole {
    enum class Kind { Disk, Ellipse };

    Kind kind = Kind::Disk;
    Vec2 center;
    double a = 0.0;       // semi-axis along `angle` (disk: radius)
    double b = 0.0;       // other semi-axis (disk: radius)
    double angle = 0.0;
    ConvexPolygon poly;   // inscribed discretization, vertices on the curve
    double kappa_min = 0.0;
    double kappa_max = 0.0;

    static ConvexHole disk(const Vec2& c, double radius, int n = 256);
    static ConvexHole ellipse(const Vec2& c, double a, double b, double angle,
                              int n = 256);

    bool inside(const Vec2& x, double tol = 0.0) const;
    // Distance from x to the hole as a set (0 inside).
    double distance(const Vec2& x) const;
    // Closest point on the boundary curve.
    Vec2 project(const Vec2& x) const;
    // Tangent direction and the normal pointing away from the hole at a
    // boundary point y.
    void tangent_frame(const Vec2& y, Vec2* tangent, Vec2* normal) const;
    void rescale(double s);

private:
    Vec2 to_frame(const Vec2& x) const;
    Vec2 from_frame(const Vec2& q) const;
};

struct HoledDomain {
    ConvexPolygon outer;   // discretization of the convex outer boundary
    std::optional<std::pair<Vec2, double>> outer_disk;  // analytic outer, if circular
    std::vector<ConvexHole> holes;
    double delta = 0.0;
    double scale = 1.0;    // normalization factor applied at construction

    // Constructors rescale the whole configuration so the source area
    // (outer minus holes, polygonal) is exactly 1, then validate the
    // separation / curvature / enclosing-ball requirements.
    static HoledDomain make(ConvexPolygon outer, std::vector<ConvexHole> holes,
                            double delta);
    static HoledDomain make_disk(const Vec2& c, double radius,
                                 std::vector<ConvexHole> holes, double delta,
                                 int n = 256);

    double source_area() const;
    double diameter() const;
    bool contains(const Vec2& x, double tol = 0.0) const;
    bool in_outer(const Vec2& x, double tol = 0.0) const;

    // Distance from x to the complement of the source domain.
    // Throws OutsideDomain when x is not in the (closed) domain.
    double distance(const Vec2& x) const;
    // Same, but 0 outside the domain instead of throwing.
    double distance_or_zero(const Vec2& x) const;
    // Positive inside the source domain, negative outside.
    double signed_distance(const Vec2& x) const;
    double outer_boundary_distance(const Vec2& x) const;

    // |poly ∩ source domain| via clipping against the outer polygon and
    // subtracting hole-polygon intersections.
    double area_in_domain(const ConvexPolygon& poly) const;
    // Length of the part of segment [p, q] inside the source domain
    // (outer treated polygonally, holes analytically).
    double segment_length_inside(const Vec2& p, const Vec2& q) const;
    bool segment_inside(const Vec2& p, const Vec2& q, int samples = 64) const;

    void validate() const;
};

// Tangent direction and inward (into the source domain) normal at a point on
// a hole boundary. Throws NotOnBoundary if y is not within projection
// tolerance of any hole boundary.
std::pair<Vec2, Vec2> tangent_data(const HoledDomain& dom, const Vec2& y);

// Distance between two convex polygons (0 if they intersect).
double polygon_distance(const ConvexPolygon& a, const ConvexPolygon& b);

}  // namespace otlab
