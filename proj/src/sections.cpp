#include "otlab/sections.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace otlab {

namespace {

constexpr double kPi = 3.14159265358979323846;

// ---------------------------------------------------------------------
//  Sublevel-set polygonization
// ---------------------------------------------------------------------

// Halfplane form of {u < L} for a max-of-affine potential:
// z·(y_i - slope) < w_i + level - slope·x for every seed i.
ConvexPolygon discrete_sublevel(const DiscretePotential& u, const Vec2& x, double level,
                                const Vec2& slope, double* window_io,
                                const DiscreteWorkspace* ws, bool* bounded) {
    double c0 = level - dot(slope, x);
    if (ws && (ws->x.x != x.x || ws->x.y != x.y)) ws = nullptr;
    double h = level - (ws ? ws->u_x : u.eval(x));
    for (int attempt = 0; attempt < 4; ++attempt) {
        double window = *window_io;
        ConvexPolygon poly = rectangle(x - Vec2{window, window}, x + Vec2{window, window});
        double rho = window * std::sqrt(2.0);
        auto apply = [&](std::size_t i) {
            Vec2 n = u.seeds[i] - slope;
            double off = u.weights[i] + c0;
            double n2 = n.norm2();
            if (n2 < 1e-28) {
                if (off <= 0.0) poly = {};
                return;
            }
            // skip constraints that cannot cut the current polygon
            double reach = -std::numeric_limits<double>::max();
            for (const Vec2& v : poly.v) reach = std::max(reach, dot(v, n));
            if (reach <= off) return;
            poly = clip_halfplane(poly, n, off);
            if (!poly.empty()) {
                double r2 = 0.0;
                for (const Vec2& v : poly.v) r2 = std::max(r2, (v - x).norm2());
                rho = std::sqrt(r2);
            }
        };
        if (ws) {
            // The cut line of constraint i sits at distance (h + slack_i)/|n_i|
            // from x; only the ascending-slack prefix with
            // slack <= rho * |n_i| - h can touch the polygon.
            double n_max = ws->max_seed_norm + slope.norm();
            for (std::size_t k = 0; k < ws->order.size() && !poly.empty(); ++k) {
                if (ws->slack[k] > rho * n_max - h && ws->slack[k] > 0.0) break;
                apply(static_cast<std::size_t>(ws->order[k]));
            }
        } else {
            for (std::size_t i = 0; i < u.seeds.size() && !poly.empty(); ++i) apply(i);
        }
        if (poly.empty()) {
            *bounded = true;
            return poly;
        }
        bool touches = false;
        for (const Vec2& v : poly.v) {
            if (std::max(std::abs(v.x - x.x), std::abs(v.y - x.y)) > 0.999 * window) {
                touches = true;
                break;
            }
        }
        if (!touches) {
            *bounded = true;
            return poly;
        }
        *window_io = window * 4.0;
    }
    *bounded = false;
    return {};
}

// Polygonization by ray bisection from x: g(t) = u(x + t e) - L(x + t e)
// starts at -h and is convex along the ray, so it has a single root.
ConvexPolygon analytic_sublevel(const ConvexPotential& u, const Vec2& x, double level,
                                const Vec2& slope, int rays, std::vector<double>* radii,
                                bool* bounded) {
    ConvexPolygon poly;
    poly.v.reserve(rays);
    bool warm = radii->size() == static_cast<std::size_t>(rays);
    if (!warm) radii->assign(rays, 0.0);
    double c0 = level - dot(slope, x);
    for (int k = 0; k < rays; ++k) {
        double th = 2.0 * kPi * k / rays;
        Vec2 e{std::cos(th), std::sin(th)};
        auto g = [&](double t) {
            Vec2 z = x + t * e;
            return u.eval(z) - (dot(slope, z) + c0);
        };
        double lo = 0.0, hi = 0.0;
        if (warm && (*radii)[k] > 0.0) {
            hi = (*radii)[k] * 2.0;
            lo = (*radii)[k] * 0.5;
            if (g(lo) > 0.0) { hi = lo; lo = 0.0; }
            else if (g(hi) <= 0.0) { warm = false; }
        }
        if (!warm || hi <= lo) {
            lo = 0.0;
            hi = 1e-3;
            int grow = 0;
            while (g(hi) <= 0.0) {
                lo = hi;
                hi *= 2.0;
                if (++grow > 70) {
                    *bounded = false;
                    return {};
                }
            }
        }
        for (int it = 0; it < 50; ++it) {
            double mid = 0.5 * (lo + hi);
            (g(mid) <= 0.0 ? lo : hi) = mid;
        }
        double t = 0.5 * (lo + hi);
        (*radii)[k] = t;
        poly.v.push_back(x + t * e);
    }
    *bounded = true;
    return poly;
}

// Principal-axis step scale from the polygon's second moments: along each
// axis the barycenter responds to a slope change like the inverse local
// Hessian, which for a section of height h has eigenvalue ~ h / (2 sigma^2).
Vec2 precondition_step(const ConvexPolygon& poly, double h, const Vec2& displacement) {
    auto m = poly.moments();
    double a = m.cxx / m.area, b = m.cxy / m.area, c = m.cyy / m.area;
    double tr = a + c;
    double det = a * c - b * b;
    double disc = std::sqrt(std::max(0.0, 0.25 * tr * tr - det));
    double s1 = 0.5 * tr + disc;  // variances along principal axes
    double s2 = std::max(0.5 * tr - disc, 1e-30);
    Vec2 e1 = std::abs(b) > 1e-30 ? Vec2{s1 - c, b}.normalized()
                                  : (a >= c ? Vec2{1, 0} : Vec2{0, 1});
    Vec2 e2 = e1.perp();
    double d1 = dot(displacement, e1), d2 = dot(displacement, e2);
    return e1 * (d1 * h / (2.0 * s1)) + e2 * (d2 * h / (2.0 * s2));
}

}  // namespace

// =====================================================================
//  centered_section
// =====================================================================

DiscreteWorkspace DiscreteWorkspace::build(const DiscretePotential& u, const Vec2& x) {
    DiscreteWorkspace ws;
    ws.x = x;
    ws.u_x = u.eval(x);
    const std::size_t n = u.seeds.size();
    std::vector<std::pair<double, int>> by_slack(n);
    for (std::size_t i = 0; i < n; ++i) {
        double s = ws.u_x - (dot(x, u.seeds[i]) - u.weights[i]);
        by_slack[i] = {s, static_cast<int>(i)};
        ws.max_seed_norm = std::max(ws.max_seed_norm, u.seeds[i].norm());
    }
    std::sort(by_slack.begin(), by_slack.end());
    ws.order.resize(n);
    ws.slack.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        ws.slack[i] = by_slack[i].first;
        ws.order[i] = by_slack[i].second;
    }
    return ws;
}

Section centered_section(const ConvexPotential& u, const Vec2& x, double h,
                         const SectionOptions& opts) {
    if (!(h > 0.0)) throw InvalidParameter("centered_section: height must be positive");
    const DiscretePotential* disc =
        u.is_discrete() ? static_cast<const DiscretePotential*>(&u) : nullptr;
    const DiscreteWorkspace* ws = opts.workspace;
    const double ux = (ws && ws->x.x == x.x && ws->x.y == x.y) ? ws->u_x : u.eval(x);
    const double level = ux + h;

    Vec2 slope = opts.warm_slope.value_or(u.subgradient(x));
    double window = opts.window;
    if (window <= 0.0) {
        window = 4.0;
        if (disc) {
            double reach = 0.0;
            for (const Vec2& s : disc->seeds) reach = std::max(reach, s.norm());
            window = std::max(4.0, 8.0 * reach);
        }
    }

    std::vector<double> radii;  // warm ray lengths for analytic potentials
    Section best;
    double best_err = std::numeric_limits<double>::max();
    double tau = 1.0;
    Vec2 prev_slope = slope;

    for (int iter = 0; iter < opts.max_iterations; ++iter) {
        bool bounded = false;
        ConvexPolygon poly =
            disc ? discrete_sublevel(*disc, x, level, slope, &window, ws, &bounded)
                 : analytic_sublevel(u, x, level, slope, opts.rays, &radii, &bounded);
        if (!bounded || poly.empty()) {
            if (iter == 0) throw UnboundedSection("centered_section: sublevel set unbounded");
            // overshot outside the gradient range: retreat and damp
            tau *= 0.5;
            slope = prev_slope + tau * (slope - prev_slope);
            continue;
        }
        Vec2 bary = poly.centroid();
        double diam = poly.diameter();
        double err = dist(bary, x) / std::max(diam, 1e-300);
        if (err < best_err) {
            best_err = err;
            best.center = x;
            best.height = h;
            best.slope = slope;
            best.level = level;
            best.poly = std::move(poly);
            best.iterations = iter + 1;
            best.centering_error = err;
            if (err <= opts.center_tol) {
                best.box = min_area_rectangle(best.poly).recentered(x);
                return best;
            }
            tau = std::min(tau * 1.5, 1.0);
        } else {
            tau *= 0.5;
            if (tau < 1e-6) break;
        }
        prev_slope = slope;
        slope = best.slope + tau * precondition_step(best.poly, h, x - best.poly.centroid());
    }
    if (!best.poly.empty()) best.box = min_area_rectangle(best.poly).recentered(x);
    throw CenteringFailure(std::move(best));
}

// =====================================================================
//  max_height
// =====================================================================

namespace {

bool section_inside(const ConvexPolygon& poly, const HoledDomain& dom) {
    const std::size_t n = poly.v.size();
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2& p = poly.v[i];
        if (!dom.contains(p, 1e-12)) return false;
        Vec2 mid = 0.5 * (p + poly.v[(i + 1) % n]);
        if (!dom.contains(mid, 1e-12)) return false;
    }
    return true;
}

// Deepest polygon boundary point (vertices and edge midpoints) against the
// source-domain complement.
std::pair<Vec2, double> closest_boundary_sample(const ConvexPolygon& poly,
                                                const HoledDomain& dom) {
    Vec2 arg = poly.v.front();
    double best = std::numeric_limits<double>::max();
    const std::size_t n = poly.v.size();
    for (std::size_t i = 0; i < n; ++i) {
        for (const Vec2& p : {poly.v[i], 0.5 * (poly.v[i] + poly.v[(i + 1) % n])}) {
            double d = dom.signed_distance(p);
            if (d < best) {
                best = d;
                arg = p;
            }
        }
    }
    return {arg, best};
}

// Nearest point of the source-domain boundary to p (holes first, then the
// outer boundary).
Vec2 project_to_boundary(const HoledDomain& dom, const Vec2& p) {
    double best = std::numeric_limits<double>::max();
    Vec2 arg = p;
    for (const ConvexHole& h : dom.holes) {
        Vec2 q = h.project(p);
        double d = dist(p, q);
        if (d < best) {
            best = d;
            arg = q;
        }
    }
    double od = std::abs(dom.outer_boundary_distance(p));
    if (od < best && dom.outer_disk) {
        Vec2 dir = (p - dom.outer_disk->first).normalized();
        arg = dom.outer_disk->first + dir * dom.outer_disk->second;
    }
    return arg;
}

}  // namespace

MaxHeightResult max_height(const ConvexPotential& u, const HoledDomain& dom,
                           const Vec2& x, double cap, const SectionOptions& opts) {
    const double h_min = 1e-12;
    SectionOptions o = opts;
    DiscreteWorkspace ws;
    if (u.is_discrete() && !o.workspace) {
        ws = DiscreteWorkspace::build(static_cast<const DiscretePotential&>(u), x);
        o.workspace = &ws;
    }
    auto solve = [&](double h) {
        Section s = centered_section(u, x, h, o);
        o.warm_slope = s.slope;
        o.window = 2.0 * s.poly.diameter();
        return s;
    };

    Section at_cap = solve(cap);
    MaxHeightResult res;
    if (section_inside(at_cap.poly, dom)) {
        res.height = cap;
        res.section = std::move(at_cap);
        auto [p, d] = closest_boundary_sample(res.section.poly, dom);
        if (d < 1e-6 * res.section.poly.diameter()) res.contact = project_to_boundary(dom, p);
        return res;
    }

    double lo = std::log(h_min), hi = std::log(cap);
    Section lo_section;
    bool has_lo = false;
    for (int it = 0; it < 30; ++it) {
        double mid = 0.5 * (lo + hi);
        Section s = solve(std::exp(mid));
        if (section_inside(s.poly, dom)) {
            lo = mid;
            lo_section = std::move(s);
            has_lo = true;
        } else {
            hi = mid;
        }
    }
    if (!has_lo) {
        // touching the boundary already at the floor height
        res.height = h_min;
        res.section = solve(h_min);
        auto [p, d] = closest_boundary_sample(res.section.poly, dom);
        (void)d;
        res.contact = project_to_boundary(dom, p);
        return res;
    }
    res.height = std::exp(lo);
    res.section = std::move(lo_section);
    auto [p, d] = closest_boundary_sample(res.section.poly, dom);
    (void)d;
    res.contact = project_to_boundary(dom, p);
    return res;
}

// =====================================================================
//  Diagnostics / classifier
// =====================================================================

const char* to_string(SectionCase c) {
    switch (c) {
        case SectionCase::Bounded: return "Bounded";
        case SectionCase::InteriorLike: return "InteriorLike";
        case SectionCase::Transversal: return "Transversal";
        case SectionCase::ModelGeometry: return "ModelGeometry";
    }
    return "?";
}

SectionDiagnostics diagnostics(const Section& sec, const HoledDomain& dom) {
    SectionDiagnostics d;
    const JohnBox& box = sec.box;
    ConvexPolygon box_poly = box.polygon();
    double box_area = box_poly.area();
    d.exterior_fraction =
        std::clamp(1.0 - dom.area_in_domain(box_poly) / box_area, 0.0, 1.0);
    d.eccentricity = box.eccentricity();

    // Tangent chord: tangent direction at the center when it sits on a hole
    // boundary, else at its nearest hole-boundary point; line through the
    // center either way.
    Vec2 tangent_dir{0.0, 0.0};
    bool have_tangent = false;
    try {
        auto [t, nrm] = tangent_data(dom, sec.center);
        (void)nrm;
        tangent_dir = t;
        have_tangent = true;
    } catch (const NotOnBoundary&) {
        double best = std::numeric_limits<double>::max();
        for (const ConvexHole& h : dom.holes) {
            Vec2 q = h.project(sec.center);
            double dd = dist(sec.center, q);
            if (dd < best) {
                best = dd;
                Vec2 t, nrm;
                h.tangent_frame(q, &t, &nrm);
                tangent_dir = t;
                have_tangent = true;
            }
        }
    }
    if (have_tangent) {
        // chord of the line center + t*dir inside the box
        Vec2 rel{dot(sec.center - box.center, box.axis),
                 dot(sec.center - box.center, box.axis.perp())};
        Vec2 dir{dot(tangent_dir, box.axis), dot(tangent_dir, box.axis.perp())};
        double t_lo = -std::numeric_limits<double>::max();
        double t_hi = std::numeric_limits<double>::max();
        double half[2] = {box.half_long, box.half_short};
        double pos[2] = {rel.x, rel.y};
        double vel[2] = {dir.x, dir.y};
        bool feasible = true;
        for (int axis = 0; axis < 2; ++axis) {
            if (std::abs(vel[axis]) < 1e-300) {
                if (std::abs(pos[axis]) > half[axis]) feasible = false;
                continue;
            }
            double a = (-half[axis] - pos[axis]) / vel[axis];
            double b = (half[axis] - pos[axis]) / vel[axis];
            t_lo = std::max(t_lo, std::min(a, b));
            t_hi = std::min(t_hi, std::max(a, b));
        }
        if (feasible && t_hi > t_lo) d.tangent_length = t_hi - t_lo;
    }
    d.tangent_length_ratio = d.tangent_length / box.half_long;

    // sup of the boundary distance over a 64x64 grid on the box
    double sup_d = 0.0;
    for (int i = 0; i < 64; ++i) {
        double s = -1.0 + 2.0 * (i + 0.5) / 64.0;
        for (int j = 0; j < 64; ++j) {
            double t = -1.0 + 2.0 * (j + 0.5) / 64.0;
            Vec2 p = box.center + box.axis * (s * box.half_long) +
                     box.axis.perp() * (t * box.half_short);
            sup_d = std::max(sup_d, dom.distance_or_zero(p));
        }
    }
    d.sup_distance = sup_d;
    return d;
}

SectionCase classify(const SectionDiagnostics& d, const ClassifierThresholds& thr) {
    if (d.eccentricity <= thr.eta_floor) return SectionCase::Bounded;
    if (d.exterior_fraction <= thr.eps1) return SectionCase::InteriorLike;
    if (d.tangent_length_ratio <= thr.eps2) return SectionCase::Transversal;
    return SectionCase::ModelGeometry;
}

// =====================================================================
//  Engulfing
// =====================================================================

EngulfReport engulfing_check(const ConvexPotential& u, const HoledDomain& dom,
                             const Vec2& x, double h, const SectionOptions& opts) {
    SectionOptions ox = opts;
    DiscreteWorkspace wx;
    if (u.is_discrete() && !ox.workspace) {
        wx = DiscreteWorkspace::build(static_cast<const DiscretePotential&>(u), x);
        ox.workspace = &wx;
    }
    Section sec = centered_section(u, x, h, ox);
    auto [p, sd] = closest_boundary_sample(sec.poly, dom);
    if (sd < -1e-9 * sec.poly.diameter())
        throw NotApplicable("engulfing_check: section leaves the source domain");
    if (sd > 1e-3 * sec.poly.diameter())
        throw NotApplicable("engulfing_check: section is not tangent to the boundary");
    Vec2 y = project_to_boundary(dom, p);

    SectionOptions oy = opts;
    oy.workspace = nullptr;
    DiscreteWorkspace wy;
    if (u.is_discrete()) {
        wy = DiscreteWorkspace::build(static_cast<const DiscretePotential&>(u), y);
        oy.workspace = &wy;
    }
    Section bsec = centered_section(u, y, h, oy);
    JohnBox box = bsec.box.recentered(y);
    double K = 1.0;
    for (const Vec2& v : sec.poly.v) K = std::max(K, box.box_norm(v));
    EngulfReport rep;
    rep.K = K;
    rep.tangency = y;
    rep.height = h;
    return rep;
}

// =====================================================================
//  Cascade
// =====================================================================

namespace {

int holes_met(const ConvexPolygon& poly, const HoledDomain& dom) {
    int hit = 0;
    for (const ConvexHole& h : dom.holes)
        if (!polygon_intersection(poly, h.poly).empty()) ++hit;
    return hit;
}

}  // namespace

CascadeTrace cascade(const ConvexPotential& u, const HoledDomain& dom, const Vec2& y,
                     double h_stop, const ClassifierThresholds& thr, double h_start,
                     const SectionOptions& opts) {
    CascadeTrace trace;
    SectionOptions o = opts;
    DiscreteWorkspace wy;
    if (u.is_discrete() && !o.workspace) {
        wy = DiscreteWorkspace::build(static_cast<const DiscretePotential&>(u), y);
        o.workspace = &wy;
    }
    double h = h_start;
    std::optional<JohnBox> prev_box;
    double prev_eta = 0.0;
    // descent type that led to the current height, if any
    std::optional<SectionCase> descent;
    while (h >= h_stop) {
        Section sec;
        try {
            sec = centered_section(u, y, h, o);
        } catch (const CenteringFailure&) {
            trace.centering_failed = true;
            return trace;
        }
        o.warm_slope = sec.slope;
        o.window = 2.0 * sec.poly.diameter();
        if (!descent && holes_met(sec.poly, dom) > 1)
            throw Error("cascade: section at the cap height meets two holes");

        SectionDiagnostics diag = diagnostics(sec, dom);
        SectionCase label = classify(diag, thr);

        CascadeStep step;
        step.height = h;
        step.eta = diag.eccentricity;
        step.lambda = sec.lambda();
        step.Lambda = sec.Lambda();
        step.label = label;
        if (prev_box) {
            JohnBox b = sec.box.recentered(y);
            double rho = 0.0;
            for (const Vec2& corner : b.polygon().v)
                rho = std::max(rho, prev_box->box_norm(corner));
            step.contraction = rho;
        }
        trace.steps.push_back(step);

        // The contraction of the step belongs to the descent that produced
        // it; transversal descents count only when eccentricity went up.
        if (descent == SectionCase::InteriorLike) {
            trace.r *= step.contraction;
        } else if (descent == SectionCase::Transversal && diag.eccentricity > prev_eta) {
            trace.l_prime += 1;
            trace.r *= step.contraction;
        }

        if (label == SectionCase::Bounded || label == SectionCase::ModelGeometry) break;
        if (label == SectionCase::InteriorLike) {
            trace.k += 1;
            h /= thr.M1;
        } else {
            trace.l += 1;
            h /= thr.M2;
        }
        descent = label;
        prev_box = sec.box.recentered(y);
        prev_eta = diag.eccentricity;
    }
    return trace;
}

// =====================================================================
//  Hessian surrogate
// =====================================================================

double hessian_proxy(const ConvexPotential& u, const HoledDomain& dom, const Vec2& x,
                     double cap) {
    MaxHeightResult mh = max_height(u, dom, x, cap);
    return mh.section.eccentricity();
}

}  // namespace otlab
