#include "otlab/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace otlab {

namespace {

constexpr double kPi = 3.14159265358979323846;

double seg_point_distance(const Vec2& a, const Vec2& b, const Vec2& p) {
    Vec2 d = b - a;
    double len2 = d.norm2();
    if (len2 <= 0.0) return dist(a, p);
    double t = dot(p - a, d) / len2;
    t = std::clamp(t, 0.0, 1.0);
    return dist(a + t * d, p);
}

}  // namespace

// =====================================================================
//  ConvexPolygon
// =====================================================================

double ConvexPolygon::area() const {
    if (v.size() < 3) return 0.0;
    double s = 0.0;
    for (std::size_t i = 0, n = v.size(); i < n; ++i) {
        const Vec2& p = v[i];
        const Vec2& q = v[(i + 1) % n];
        s += cross(p, q);
    }
    return 0.5 * s;
}

Vec2 ConvexPolygon::centroid() const {
    if (v.empty()) return {};
    if (v.size() == 1) return v[0];
    if (v.size() == 2) return 0.5 * (v[0] + v[1]);
    double a = 0.0;
    Vec2 c;
    for (std::size_t i = 0, n = v.size(); i < n; ++i) {
        const Vec2& p = v[i];
        const Vec2& q = v[(i + 1) % n];
        double w = cross(p, q);
        a += w;
        c += (p + q) * w;
    }
    if (std::abs(a) < 1e-300) {
        Vec2 m;
        for (const Vec2& p : v) m += p;
        return m / static_cast<double>(v.size());
    }
    return c / (3.0 * a);
}

double ConvexPolygon::diameter() const {
    double d2 = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i)
        for (std::size_t j = i + 1; j < v.size(); ++j)
            d2 = std::max(d2, (v[i] - v[j]).norm2());
    return std::sqrt(d2);
}

Vec2 ConvexPolygon::bbox_min() const {
    Vec2 m{std::numeric_limits<double>::max(), std::numeric_limits<double>::max()};
    for (const Vec2& p : v) {
        m.x = std::min(m.x, p.x);
        m.y = std::min(m.y, p.y);
    }
    return m;
}

Vec2 ConvexPolygon::bbox_max() const {
    Vec2 m{std::numeric_limits<double>::lowest(), std::numeric_limits<double>::lowest()};
    for (const Vec2& p : v) {
        m.x = std::max(m.x, p.x);
        m.y = std::max(m.y, p.y);
    }
    return m;
}

bool ConvexPolygon::contains(const Vec2& p, double tol) const {
    if (v.size() < 3) return false;
    for (std::size_t i = 0, n = v.size(); i < n; ++i) {
        if (cross(v[(i + 1) % n] - v[i], p - v[i]) < -tol) return false;
    }
    return true;
}

ConvexPolygon::Moments ConvexPolygon::moments() const {
    Moments m;
    if (v.size() < 3) return m;
    m.centroid = centroid();
    double a = 0.0, sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0, n = v.size(); i < n; ++i) {
        Vec2 p = v[i] - m.centroid;
        Vec2 q = v[(i + 1) % n] - m.centroid;
        double w = cross(p, q);
        a += w;
        sxx += w * (p.x * p.x + p.x * q.x + q.x * q.x);
        sxy += w * (2.0 * p.x * p.y + p.x * q.y + q.x * p.y + 2.0 * q.x * q.y);
        syy += w * (p.y * p.y + p.y * q.y + q.y * q.y);
    }
    m.area = 0.5 * a;
    m.cxx = sxx / 12.0;
    m.cxy = sxy / 24.0;
    m.cyy = syy / 12.0;
    return m;
}

void ConvexPolygon::validate() const {
    if (v.size() < 3) throw DegeneratePolygon("polygon has fewer than 3 vertices");
    double d = diameter();
    double a = area();
    if (!(a > 0.0)) throw DegeneratePolygon("polygon area not positive");
    for (std::size_t i = 0, n = v.size(); i < n; ++i) {
        const Vec2& p = v[i];
        const Vec2& q = v[(i + 1) % n];
        const Vec2& r = v[(i + 2) % n];
        if (dist(p, q) <= kGeomTol * d)
            throw DegeneratePolygon("duplicate consecutive vertices");
        if (cross(q - p, r - q) < -kGeomTol * d * d)
            throw DegeneratePolygon("polygon is not convex");
    }
}

void ConvexPolygon::ensure_ccw() {
    if (area() < 0.0) std::reverse(v.begin(), v.end());
}

ConvexPolygon clip_halfplane(const ConvexPolygon& poly, const Vec2& normal, double offset) {
    if (poly.empty()) return {};
    const std::size_t n = poly.v.size();
    std::vector<double> s(n);
    double smax = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        s[i] = dot(poly.v[i], normal) - offset;
        smax = std::max(smax, std::abs(s[i]));
    }
    const double eps = kGeomTol * std::max(1.0, smax);
    ConvexPolygon out;
    out.v.reserve(n + 2);
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t j = (i + 1) % n;
        bool in_i = s[i] <= eps;
        bool in_j = s[j] <= eps;
        if (in_i) out.v.push_back(poly.v[i]);
        if (in_i != in_j && std::abs(s[i] - s[j]) > 0.0) {
            double t = s[i] / (s[i] - s[j]);
            if (t > 0.0 && t < 1.0)
                out.v.push_back(poly.v[i] + t * (poly.v[j] - poly.v[i]));
        }
    }
    // drop near-duplicate consecutive vertices introduced by the cut
    if (out.v.size() >= 2) {
        double d = 0.0;
        for (std::size_t i = 0; i + 1 < out.v.size(); ++i)
            d = std::max(d, (out.v[i + 1] - out.v[i]).norm());
        double tol = kGeomTol * std::max(1.0, d);
        std::vector<Vec2> dedup;
        dedup.reserve(out.v.size());
        for (const Vec2& p : out.v) {
            if (dedup.empty() || dist(dedup.back(), p) > tol) dedup.push_back(p);
        }
        while (dedup.size() > 1 && dist(dedup.front(), dedup.back()) <= tol)
            dedup.pop_back();
        out.v = std::move(dedup);
    }
    if (out.v.size() < 3 || out.area() <= 0.0) return {};
    return out;
}

ConvexPolygon polygon_intersection(const ConvexPolygon& a, const ConvexPolygon& b) {
    if (a.empty() || b.empty()) return {};
    ConvexPolygon cur = a;
    for (std::size_t i = 0, n = b.v.size(); i < n; ++i) {
        Vec2 e = b.v[(i + 1) % n] - b.v[i];
        Vec2 normal = -e.perp();  // inside of b is to the left of the edge
        cur = clip_halfplane(cur, normal, dot(normal, b.v[i]));
        if (cur.empty()) return {};
    }
    return cur;
}

ConvexPolygon regular_polygon(const Vec2& center, double circumradius, int n, double phase) {
    ConvexPolygon p;
    p.v.reserve(n);
    for (int k = 0; k < n; ++k) {
        double t = phase + 2.0 * kPi * k / n;
        p.v.push_back(center + circumradius * Vec2{std::cos(t), std::sin(t)});
    }
    return p;
}

ConvexPolygon rectangle(const Vec2& lo, const Vec2& hi) {
    return ConvexPolygon({{lo.x, lo.y}, {hi.x, lo.y}, {hi.x, hi.y}, {lo.x, hi.y}});
}

ConvexPolygon convex_hull(std::vector<Vec2> pts) {
    std::sort(pts.begin(), pts.end(), [](const Vec2& a, const Vec2& b) {
        return a.x < b.x || (a.x == b.x && a.y < b.y);
    });
    pts.erase(std::unique(pts.begin(), pts.end(),
                          [](const Vec2& a, const Vec2& b) {
                              return a.x == b.x && a.y == b.y;
                          }),
              pts.end());
    if (pts.size() < 3) return ConvexPolygon(pts);
    std::vector<Vec2> hull;
    for (const Vec2& p : pts) {
        while (hull.size() >= 2 &&
               cross(hull.back() - hull[hull.size() - 2], p - hull[hull.size() - 2]) <= 0)
            hull.pop_back();
        hull.push_back(p);
    }
    std::size_t lower = hull.size() + 1;
    for (auto it = pts.rbegin() + 1; it != pts.rend(); ++it) {
        while (hull.size() >= lower &&
               cross(hull.back() - hull[hull.size() - 2], *it - hull[hull.size() - 2]) <= 0)
            hull.pop_back();
        hull.push_back(*it);
    }
    hull.pop_back();
    return ConvexPolygon(std::move(hull));
}

// =====================================================================
//  JohnBox
// =====================================================================

ConvexPolygon JohnBox::polygon() const {
    Vec2 u = axis * half_long;
    Vec2 w = axis.perp() * half_short;
    return ConvexPolygon({center - u - w, center + u - w, center + u + w, center - u + w});
}

JohnBox JohnBox::recentered(const Vec2& c) const {
    JohnBox b = *this;
    b.center = c;
    return b;
}

double JohnBox::box_norm(const Vec2& p) const {
    Vec2 d = p - center;
    return std::max(std::abs(dot(d, axis)) / half_long,
                    std::abs(dot(d, axis.perp())) / half_short);
}

JohnBox min_area_rectangle(const ConvexPolygon& poly) {
    if (poly.v.size() < 3 || poly.area() <= kGeomTol)
        throw DegeneratePolygon("min_area_rectangle: degenerate polygon");
    const auto& v = poly.v;
    const std::size_t n = v.size();
    double best_area = std::numeric_limits<double>::max();
    Vec2 best_dir;
    double bu0 = 0, bu1 = 0, bw0 = 0, bw1 = 0;
    for (std::size_t i = 0; i < n; ++i) {
        Vec2 e = v[(i + 1) % n] - v[i];
        double len = e.norm();
        if (len <= 0.0) continue;
        Vec2 dir = e / len;
        Vec2 prp = dir.perp();
        double u0 = std::numeric_limits<double>::max(), u1 = -u0;
        double w0 = u0, w1 = -u0;
        for (const Vec2& p : v) {
            double u = dot(p, dir), w = dot(p, prp);
            u0 = std::min(u0, u); u1 = std::max(u1, u);
            w0 = std::min(w0, w); w1 = std::max(w1, w);
        }
        double a = (u1 - u0) * (w1 - w0);
        if (a < best_area) {
            best_area = a;
            best_dir = dir;
            bu0 = u0; bu1 = u1; bw0 = w0; bw1 = w1;
        }
    }
    JohnBox box;
    Vec2 prp = best_dir.perp();
    box.center = best_dir * (0.5 * (bu0 + bu1)) + prp * (0.5 * (bw0 + bw1));
    double hu = 0.5 * (bu1 - bu0);
    double hw = 0.5 * (bw1 - bw0);
    if (hu >= hw) {
        box.axis = best_dir;
        box.half_long = hu;
        box.half_short = hw;
    } else {
        box.axis = prp;
        box.half_long = hw;
        box.half_short = hu;
    }
    // Trapping certificate: for each box corner, the exit parameter of the
    // ray from the box center; the polygon contains the alpha-shrunk box for
    // alpha = min over corners.
    double alpha = 1.0;
    for (const Vec2& corner : box.polygon().v) {
        Vec2 w = corner - box.center;
        double t = std::numeric_limits<double>::max();
        for (std::size_t i = 0; i < n; ++i) {
            Vec2 edge = v[(i + 1) % n] - v[i];
            Vec2 normal = -edge.perp();
            double num = dot(normal, v[i] - box.center);
            double den = dot(normal, w);
            if (den > 0.0) t = std::min(t, num / den);
        }
        alpha = std::min(alpha, std::max(0.0, t));
    }
    box.trapping = alpha;
    return box;
}

// =====================================================================
//  ConvexHole
// =====================================================================

Vec2 ConvexHole::to_frame(const Vec2& x) const {
    Vec2 d = x - center;
    double c = std::cos(angle), s = std::sin(angle);
    return {c * d.x + s * d.y, -s * d.x + c * d.y};
}

Vec2 ConvexHole::from_frame(const Vec2& q) const {
    double c = std::cos(angle), s = std::sin(angle);
    return center + Vec2{c * q.x - s * q.y, s * q.x + c * q.y};
}

ConvexHole ConvexHole::disk(const Vec2& c, double radius, int n) {
    if (radius <= 0.0) throw InvalidParameter("disk hole: radius must be positive");
    ConvexHole h;
    h.kind = Kind::Disk;
    h.center = c;
    h.a = h.b = radius;
    h.poly = regular_polygon(c, radius, n);
    h.kappa_min = h.kappa_max = 1.0 / radius;
    return h;
}

ConvexHole ConvexHole::ellipse(const Vec2& c, double a, double b, double angle, int n) {
    if (a <= 0.0 || b <= 0.0) throw InvalidParameter("ellipse hole: semi-axes must be positive");
    ConvexHole h;
    h.kind = Kind::Ellipse;
    h.center = c;
    h.a = a;
    h.b = b;
    h.angle = angle;
    h.poly.v.reserve(n);
    for (int k = 0; k < n; ++k) {
        double t = 2.0 * kPi * k / n;
        h.poly.v.push_back(h.from_frame({a * std::cos(t), b * std::sin(t)}));
    }
    h.poly.ensure_ccw();
    double hi = std::max(a, b), lo = std::min(a, b);
    h.kappa_max = hi / (lo * lo);
    h.kappa_min = lo / (hi * hi);
    return h;
}

bool ConvexHole::inside(const Vec2& x, double tol) const {
    Vec2 q = to_frame(x);
    double f = (q.x / a) * (q.x / a) + (q.y / b) * (q.y / b);
    return f < 1.0 - tol;
}

double ConvexHole::distance(const Vec2& x) const {
    if (kind == Kind::Disk) {
        double d = dist(x, center) - a;
        return std::max(d, 0.0);
    }
    Vec2 q = to_frame(x);
    double f = (q.x / a) * (q.x / a) + (q.y / b) * (q.y / b);
    if (f <= 1.0) return 0.0;
    return dist(x, project(x));
}

Vec2 ConvexHole::project(const Vec2& x) const {
    if (kind == Kind::Disk) {
        Vec2 d = x - center;
        double n = d.norm();
        if (n <= 0.0) return center + Vec2{a, 0.0};
        return center + d * (a / n);
    }
    Vec2 q = to_frame(x);
    // Newton on g(t) = (p(t) - q)·p'(t), p(t) = (a cos t, b sin t); a dense
    // scan seeds the iteration so it stays on the nearest-point branch.
    double best_t = 0.0;
    double best_d2 = std::numeric_limits<double>::max();
    const int scan = 64;
    for (int k = 0; k < scan; ++k) {
        double t = 2.0 * kPi * k / scan;
        Vec2 p{a * std::cos(t), b * std::sin(t)};
        double d2 = (p - q).norm2();
        if (d2 < best_d2) {
            best_d2 = d2;
            best_t = t;
        }
    }
    double t = best_t;
    for (int it = 0; it < 60; ++it) {
        double ct = std::cos(t), st = std::sin(t);
        Vec2 p{a * ct, b * st};
        Vec2 dp{-a * st, b * ct};
        Vec2 ddp{-a * ct, -b * st};
        double g = dot(p - q, dp);
        double dg = dot(dp, dp) + dot(p - q, ddp);
        if (std::abs(dg) < 1e-300) break;
        double step = g / dg;
        t -= step;
        if (std::abs(step) < 1e-15) break;
    }
    return from_frame({a * std::cos(t), b * std::sin(t)});
}

void ConvexHole::tangent_frame(const Vec2& y, Vec2* tangent, Vec2* normal) const {
    Vec2 q = to_frame(y);
    // Gradient of the implicit equation (x/a)^2 + (y/b)^2 = 1 points outward.
    Vec2 g{2.0 * q.x / (a * a), 2.0 * q.y / (b * b)};
    double c = std::cos(angle), s = std::sin(angle);
    Vec2 n = Vec2{c * g.x - s * g.y, s * g.x + c * g.y}.normalized();
    if (normal) *normal = n;
    if (tangent) *tangent = n.perp();
}

void ConvexHole::rescale(double s) {
    center *= s;
    a *= s;
    b *= s;
    for (Vec2& p : poly.v) p *= s;
    kappa_min /= s;
    kappa_max /= s;
}

// =====================================================================
//  HoledDomain
// =====================================================================

HoledDomain HoledDomain::make(ConvexPolygon outer, std::vector<ConvexHole> holes,
                              double delta) {
    HoledDomain dom;
    outer.ensure_ccw();
    dom.outer = std::move(outer);
    dom.holes = std::move(holes);
    dom.delta = delta;

    double raw = dom.source_area();
    if (!(raw > 0.0)) throw InvalidParameter("domain: source area must be positive");
    double s = 1.0 / std::sqrt(raw);
    for (Vec2& p : dom.outer.v) p *= s;
    for (ConvexHole& h : dom.holes) h.rescale(s);
    dom.delta *= s;
    dom.scale = s;
    if (dom.outer_disk) {
        dom.outer_disk->first *= s;
        dom.outer_disk->second *= s;
    }
    dom.validate();
    return dom;
}

HoledDomain HoledDomain::make_disk(const Vec2& c, double radius,
                                   std::vector<ConvexHole> holes, double delta, int n) {
    ConvexPolygon outer = regular_polygon(c, radius, n);
    HoledDomain dom;
    outer.ensure_ccw();
    dom.outer = std::move(outer);
    dom.outer_disk = std::make_pair(c, radius);
    dom.holes = std::move(holes);
    dom.delta = delta;
    double raw = dom.source_area();
    if (!(raw > 0.0)) throw InvalidParameter("domain: source area must be positive");
    double s = 1.0 / std::sqrt(raw);
    for (Vec2& p : dom.outer.v) p *= s;
    for (ConvexHole& h : dom.holes) h.rescale(s);
    dom.delta *= s;
    dom.scale = s;
    dom.outer_disk->first *= s;
    dom.outer_disk->second *= s;
    dom.validate();
    return dom;
}

double HoledDomain::source_area() const {
    double a = outer.area();
    for (const ConvexHole& h : holes) a -= h.poly.area();
    return a;
}

double HoledDomain::diameter() const { return outer.diameter(); }

bool HoledDomain::in_outer(const Vec2& x, double tol) const {
    if (outer_disk) return dist(x, outer_disk->first) <= outer_disk->second + tol;
    return outer.contains(x, tol * std::max(1.0, outer.diameter()));
}

bool HoledDomain::contains(const Vec2& x, double tol) const {
    if (!in_outer(x, tol)) return false;
    for (const ConvexHole& h : holes)
        if (h.inside(x, tol)) return false;
    return true;
}

double HoledDomain::outer_boundary_distance(const Vec2& x) const {
    if (outer_disk) return outer_disk->second - dist(x, outer_disk->first);
    double d = std::numeric_limits<double>::max();
    for (std::size_t i = 0, n = outer.v.size(); i < n; ++i)
        d = std::min(d, seg_point_distance(outer.v[i], outer.v[(i + 1) % n], x));
    return outer.contains(x) ? d : -d;
}

double HoledDomain::signed_distance(const Vec2& x) const {
    double d = outer_boundary_distance(x);
    for (const ConvexHole& h : holes) {
        if (h.inside(x)) return -dist(x, h.project(x));
        d = std::min(d, h.distance(x));
    }
    return d;
}

double HoledDomain::distance(const Vec2& x) const {
    double sd = signed_distance(x);
    if (sd < -kProjTol) throw OutsideDomain("point is not in the source domain");
    return std::max(sd, 0.0);
}

double HoledDomain::distance_or_zero(const Vec2& x) const {
    return std::max(signed_distance(x), 0.0);
}

double HoledDomain::area_in_domain(const ConvexPolygon& poly) const {
    if (poly.empty()) return 0.0;
    ConvexPolygon in_outer_poly = polygon_intersection(poly, outer);
    if (in_outer_poly.empty()) return 0.0;
    double a = in_outer_poly.area();
    for (const ConvexHole& h : holes) {
        // quick reject by bounding circle
        double reach = std::max(h.a, h.b);
        Vec2 lo = poly.bbox_min(), hi = poly.bbox_max();
        if (h.center.x + reach < lo.x || h.center.x - reach > hi.x ||
            h.center.y + reach < lo.y || h.center.y - reach > hi.y)
            continue;
        ConvexPolygon cap = polygon_intersection(in_outer_poly, h.poly);
        if (!cap.empty()) a -= cap.area();
    }
    return a;
}

namespace {

// Parameter interval of segment p + t(q - p), t in [0,1], inside a convex
// polygon. Returns false if the intersection is empty.
bool segment_polygon_interval(const ConvexPolygon& poly, const Vec2& p, const Vec2& q,
                              double* t0, double* t1) {
    double lo = 0.0, hi = 1.0;
    Vec2 d = q - p;
    for (std::size_t i = 0, n = poly.v.size(); i < n; ++i) {
        Vec2 e = poly.v[(i + 1) % n] - poly.v[i];
        Vec2 normal = -e.perp();
        double den = dot(normal, d);
        double num = dot(normal, poly.v[i] - p);
        if (std::abs(den) < 1e-300) {
            if (num < 0.0) return false;
        } else if (den > 0.0) {
            hi = std::min(hi, num / den);
        } else {
            lo = std::max(lo, num / den);
        }
        if (lo >= hi) return false;
    }
    *t0 = lo;
    *t1 = hi;
    return true;
}

// Parameter interval of the segment inside an analytic hole.
bool segment_hole_interval(const ConvexHole& h, const Vec2& p, const Vec2& q,
                           double* t0, double* t1) {
    // Work in the hole frame scaled to the unit circle.
    double c = std::cos(h.angle), s = std::sin(h.angle);
    auto frame = [&](const Vec2& x) {
        Vec2 d = x - h.center;
        return Vec2{(c * d.x + s * d.y) / h.a, (-s * d.x + c * d.y) / h.b};
    };
    Vec2 fp = frame(p), fq = frame(q);
    Vec2 d = fq - fp;
    double A = d.norm2();
    double B = 2.0 * dot(fp, d);
    double C = fp.norm2() - 1.0;
    if (A < 1e-300) return C < 0.0 ? (*t0 = 0.0, *t1 = 1.0, true) : false;
    double disc = B * B - 4.0 * A * C;
    if (disc <= 0.0) return false;
    double r = std::sqrt(disc);
    double lo = (-B - r) / (2.0 * A);
    double hi = (-B + r) / (2.0 * A);
    lo = std::max(lo, 0.0);
    hi = std::min(hi, 1.0);
    if (lo >= hi) return false;
    *t0 = lo;
    *t1 = hi;
    return true;
}

}  // namespace

double HoledDomain::segment_length_inside(const Vec2& p, const Vec2& q) const {
    double t0, t1;
    if (!segment_polygon_interval(outer, p, q, &t0, &t1)) return 0.0;
    double len = (t1 - t0);
    for (const ConvexHole& h : holes) {
        double h0, h1;
        if (!segment_hole_interval(h, p, q, &h0, &h1)) continue;
        double lo = std::max(h0, t0), hi = std::min(h1, t1);
        if (hi > lo) len -= (hi - lo);
    }
    return std::max(len, 0.0) * dist(p, q);
}

bool HoledDomain::segment_inside(const Vec2& p, const Vec2& q, int samples) const {
    for (int i = 0; i <= samples; ++i) {
        double t = static_cast<double>(i) / samples;
        if (!contains(p + t * (q - p), 1e-9)) return false;
    }
    return true;
}

void HoledDomain::validate() const {
    outer.validate();
    if (!(delta > 0.0)) throw InvalidParameter("domain: delta must be positive");
    double area = source_area();
    if (std::abs(area - 1.0) > 1e-9)
        throw InvalidParameter("domain: source area must normalize to 1");
    double ball = 1.0 / delta;
    for (const Vec2& p : outer.v)
        if (p.norm() > ball)
            throw InvalidParameter("domain: outer boundary escapes the 1/delta ball");
    for (std::size_t i = 0; i < holes.size(); ++i) {
        const ConvexHole& h = holes[i];
        if (h.kappa_min < delta - 1e-12 || h.kappa_max > ball + 1e-12)
            throw InvalidParameter("domain: hole curvature out of [delta, 1/delta]");
        // vertices of the discretization must lie on the analytic curve
        for (const Vec2& p : h.poly.v) {
            Vec2 proj = h.project(p);
            if (dist(p, proj) > 1e-10 * std::max(h.a, h.b))
                throw InvalidParameter("domain: hole polygon off the analytic curve");
        }
        double to_outer = std::numeric_limits<double>::max();
        for (const Vec2& p : h.poly.v)
            to_outer = std::min(to_outer, outer_boundary_distance(p));
        if (to_outer < delta - 1e-12)
            throw InvalidParameter("domain: hole too close to the outer boundary");
        for (std::size_t j = i + 1; j < holes.size(); ++j) {
            if (polygon_distance(h.poly, holes[j].poly) < delta - 1e-12)
                throw InvalidParameter("domain: holes closer than delta");
        }
    }
}

std::pair<Vec2, Vec2> tangent_data(const HoledDomain& dom, const Vec2& y) {
    for (const ConvexHole& h : dom.holes) {
        Vec2 proj = h.project(y);
        if (dist(y, proj) <= kProjTol * std::max(1.0, std::max(h.a, h.b))) {
            Vec2 t, n;
            h.tangent_frame(proj, &t, &n);
            return {t, n};
        }
    }
    throw NotOnBoundary("point is not on any hole boundary");
}

double polygon_distance(const ConvexPolygon& a, const ConvexPolygon& b) {
    if (!polygon_intersection(a, b).empty()) return 0.0;
    double d = std::numeric_limits<double>::max();
    for (std::size_t i = 0, n = a.v.size(); i < n; ++i)
        for (const Vec2& p : b.v)
            d = std::min(d, seg_point_distance(a.v[i], a.v[(i + 1) % n], p));
    for (std::size_t i = 0, n = b.v.size(); i < n; ++i)
        for (const Vec2& p : a.v)
            d = std::min(d, seg_point_distance(b.v[i], b.v[(i + 1) % n], p));
    return d;
}

}  // namespace otlab
