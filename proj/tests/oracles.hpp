// Test-side oracles: brute-force or quadrature routes kept independent of
// the library implementations they check.
#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "otlab/geometry.hpp"
#include "otlab/rng.hpp"

namespace oracles {

using otlab::ConvexPolygon;
using otlab::HoledDomain;
using otlab::Rng;
using otlab::Vec2;

// Adaptive Simpson quadrature.
inline double simpson(const std::function<double(double)>& f, double a, double b) {
    double m = 0.5 * (a + b);
    return (b - a) / 6.0 * (f(a) + 4.0 * f(m) + f(b));
}

inline double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                               double tol, int depth = 0) {
    double m = 0.5 * (a + b);
    double whole = simpson(f, a, b);
    double left = simpson(f, a, m);
    double right = simpson(f, m, b);
    if (depth > 60 || std::abs(left + right - whole) < 15.0 * tol)
        return left + right + (left + right - whole) / 15.0;
    return adaptive_simpson(f, a, m, 0.5 * tol, depth + 1) +
           adaptive_simpson(f, m, b, 0.5 * tol, depth + 1);
}

// Distance to the domain complement by dense boundary sampling. Two passes:
// a coarse scan sizes the sample spacing so the foot-quantization error
// (spacing^2 / 8d) stays below the requested relative tolerance.
inline double dense_boundary_distance(const HoledDomain& dom, const Vec2& x,
                                      double rel_tol = 1e-7) {
    auto scan = [&](double spacing) {
        double best = std::numeric_limits<double>::max();
        for (std::size_t i = 0, n = dom.outer.v.size(); i < n; ++i) {
            Vec2 a = dom.outer.v[i], b = dom.outer.v[(i + 1) % n];
            int steps = std::max(2, static_cast<int>(otlab::dist(a, b) / spacing));
            for (int k = 0; k <= steps; ++k) {
                double t = static_cast<double>(k) / steps;
                best = std::min(best, otlab::dist(a + t * (b - a), x));
            }
        }
        for (const auto& h : dom.holes) {
            double per = 2.0 * 3.14159265358979323846 * std::max(h.a, h.b);
            int n = std::max(256, static_cast<int>(per / spacing));
            for (int k = 0; k < n; ++k) {
                double t = 2.0 * 3.14159265358979323846 * k / n;
                double c = std::cos(h.angle), s = std::sin(h.angle);
                Vec2 q{h.a * std::cos(t), h.b * std::sin(t)};
                Vec2 p = h.center + Vec2{c * q.x - s * q.y, s * q.x + c * q.y};
                best = std::min(best, otlab::dist(p, x));
            }
        }
        return best;
    };
    double coarse = scan(dom.outer.diameter() / 512.0);
    double spacing = std::sqrt(8.0 * rel_tol) * coarse;
    return scan(spacing);
}

// Minimal enclosing-rectangle area over a 1-degree orientation sweep.
inline double rectangle_sweep_area(const ConvexPolygon& poly) {
    double best = std::numeric_limits<double>::max();
    for (int deg = 0; deg < 90; ++deg) {
        double t = deg * 3.14159265358979323846 / 180.0;
        Vec2 u{std::cos(t), std::sin(t)};
        Vec2 w = u.perp();
        double u0 = 1e300, u1 = -1e300, w0 = 1e300, w1 = -1e300;
        for (const Vec2& p : poly.v) {
            u0 = std::min(u0, dot(p, u)); u1 = std::max(u1, dot(p, u));
            w0 = std::min(w0, dot(p, w)); w1 = std::max(w1, dot(p, w));
        }
        best = std::min(best, (u1 - u0) * (w1 - w0));
    }
    return best;
}

// Monte-Carlo area of {inside(p)} over an axis box, with the standard error.
struct McArea {
    double area;
    double stderr_;
};

inline McArea mc_area(const std::function<bool(const Vec2&)>& inside, const Vec2& lo,
                      const Vec2& hi, int n, std::uint64_t seed) {
    Rng rng(seed);
    int hits = 0;
    for (int i = 0; i < n; ++i)
        if (inside(rng.in_box(lo, hi))) ++hits;
    double box = (hi.x - lo.x) * (hi.y - lo.y);
    double p = static_cast<double>(hits) / n;
    McArea r;
    r.area = p * box;
    r.stderr_ = box * std::sqrt(std::max(p * (1.0 - p), 1e-12) / n);
    return r;
}

inline ConvexPolygon random_hull(Rng& rng, int n_points, double radius = 1.0,
                                 Vec2 center = {}) {
    std::vector<Vec2> pts;
    for (int i = 0; i < n_points; ++i)
        pts.push_back(center + Vec2{rng.uniform(-radius, radius), rng.uniform(-radius, radius)});
    return otlab::convex_hull(pts);
}

// Central finite difference of a scalar function of one variable.
inline double central_diff(const std::function<double(double)>& f, double x, double h) {
    return (f(x + h) - f(x - h)) / (2.0 * h);
}

inline double central_diff2(const std::function<double(double)>& f, double x, double h) {
    return (f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h);
}

}  // namespace oracles
