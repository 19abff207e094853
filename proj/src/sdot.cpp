#include "otlab/sdot.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

#include "otlab/parallel.hpp"
#include "otlab/rng.hpp"

namespace otlab {

namespace {

// ---------------------------------------------------------------------
//  Labeled convex clipping (edge provenance survives the cut)
// ---------------------------------------------------------------------

struct LabeledPoly {
    std::vector<Vec2> v;
    std::vector<int> label;  // label[i] belongs to edge v[i] -> v[i+1]

    bool empty() const { return v.size() < 3; }
};

LabeledPoly labeled_from(const ConvexPolygon& p, int lbl) {
    LabeledPoly lp;
    lp.v = p.v;
    lp.label.assign(p.v.size(), lbl);
    return lp;
}

// Keep x·n <= off; edges created by the cut get label `cut_label`.
void clip_labeled(LabeledPoly& poly, const Vec2& n, double off, int cut_label) {
    const std::size_t m = poly.v.size();
    if (m < 3) {
        poly.v.clear();
        poly.label.clear();
        return;
    }
    static thread_local std::vector<double> s;
    s.resize(m);
    bool any_out = false, any_in = false;
    for (std::size_t i = 0; i < m; ++i) {
        s[i] = dot(poly.v[i], n) - off;
        (s[i] > 0.0 ? any_out : any_in) = true;
    }
    if (!any_out) return;
    if (!any_in) {
        poly.v.clear();
        poly.label.clear();
        return;
    }
    LabeledPoly out;
    out.v.reserve(m + 2);
    out.label.reserve(m + 2);
    for (std::size_t i = 0; i < m; ++i) {
        std::size_t j = (i + 1) % m;
        bool in_i = s[i] <= 0.0, in_j = s[j] <= 0.0;
        if (in_i) {
            out.v.push_back(poly.v[i]);
            out.label.push_back(in_j ? poly.label[i] : poly.label[i]);
        }
        if (in_i != in_j) {
            double t = s[i] / (s[i] - s[j]);
            Vec2 p = poly.v[i] + t * (poly.v[j] - poly.v[i]);
            if (in_i) {
                // leaving: cut edge starts here
                out.v.push_back(p);
                out.label.push_back(cut_label);
            } else {
                // entering: remainder of the original edge
                out.v.push_back(p);
                out.label.push_back(poly.label[i]);
            }
        }
    }
    if (out.v.size() < 3) {
        out.v.clear();
        out.label.clear();
    }
    poly = std::move(out);
}

// ---------------------------------------------------------------------
//  Seed grid for candidate pruning
// ---------------------------------------------------------------------

struct SeedGrid {
    Vec2 lo, hi;
    double cell = 1.0;
    int nx = 1, ny = 1;
    std::vector<std::vector<int>> buckets;

    void build(const std::vector<Vec2>& seeds) {
        lo = {std::numeric_limits<double>::max(), std::numeric_limits<double>::max()};
        hi = {-lo.x, -lo.y};
        for (const Vec2& s : seeds) {
            lo.x = std::min(lo.x, s.x); lo.y = std::min(lo.y, s.y);
            hi.x = std::max(hi.x, s.x); hi.y = std::max(hi.y, s.y);
        }
        double w = std::max(hi.x - lo.x, hi.y - lo.y);
        int n = std::max(1, static_cast<int>(std::sqrt(static_cast<double>(seeds.size()) / 2.0)));
        cell = std::max(w / n, 1e-12);
        nx = static_cast<int>((hi.x - lo.x) / cell) + 1;
        ny = static_cast<int>((hi.y - lo.y) / cell) + 1;
        buckets.assign(static_cast<std::size_t>(nx) * ny, {});
        for (std::size_t i = 0; i < seeds.size(); ++i)
            buckets[index_of(seeds[i])].push_back(static_cast<int>(i));
    }

    std::size_t index_of(const Vec2& p) const {
        int ix = std::clamp(static_cast<int>((p.x - lo.x) / cell), 0, nx - 1);
        int iy = std::clamp(static_cast<int>((p.y - lo.y) / cell), 0, ny - 1);
        return static_cast<std::size_t>(iy) * nx + ix;
    }

    // Seeds in the square ring at Chebyshev distance `ring` around p's bucket.
    void collect_ring(const Vec2& p, int ring, std::vector<int>* out) const {
        int ix = std::clamp(static_cast<int>((p.x - lo.x) / cell), 0, nx - 1);
        int iy = std::clamp(static_cast<int>((p.y - lo.y) / cell), 0, ny - 1);
        int x0 = ix - ring, x1 = ix + ring, y0 = iy - ring, y1 = iy + ring;
        for (int y = y0; y <= y1; ++y) {
            if (y < 0 || y >= ny) continue;
            for (int x = x0; x <= x1; ++x) {
                if (x < 0 || x >= nx) continue;
                if (ring > 0 && x != x0 && x != x1 && y != y0 && y != y1) continue;
                const auto& b = buckets[static_cast<std::size_t>(y) * nx + x];
                out->insert(out->end(), b.begin(), b.end());
            }
        }
    }

    int max_ring() const { return std::max(nx, ny); }
};

// Clip the bisector halfplanes x·(y_j - y_i) <= w_j - w_i into `cell`,
// scanning candidates outward by seed distance with a security-radius stop.
void clip_bisectors(LabeledPoly& cell, int i, const std::vector<Vec2>& seeds,
                    const std::vector<double>& weights, const SeedGrid& grid,
                    double phi_min) {
    const Vec2 yi = seeds[i];
    const double phi_i = weights[i] - 0.5 * yi.norm2();
    std::vector<int> ring;
    std::vector<std::pair<double, int>> cand;
    for (int r = 0; r <= grid.max_ring() && !cell.empty(); ++r) {
        // Farthest cell vertex from the seed bounds which bisectors can cut.
        double rho2 = 0.0;
        for (const Vec2& v : cell.v) rho2 = std::max(rho2, (v - yi).norm2());
        double rho = std::sqrt(rho2);
        double safe = rho + std::sqrt(std::max(0.0, rho2 + 2.0 * (phi_i - phi_min)));
        double ring_min_dist = (r - 1) * grid.cell;
        if (r > 0 && ring_min_dist > safe) break;
        ring.clear();
        grid.collect_ring(yi, r, &ring);
        cand.clear();
        for (int j : ring)
            if (j != i) cand.push_back({(seeds[j] - yi).norm2(), j});
        std::sort(cand.begin(), cand.end());
        for (auto [d2, j] : cand) {
            Vec2 n = seeds[j] - yi;
            double off = weights[j] - weights[i];
            // skip bisectors that cannot touch the current cell
            double reach = 0.0;
            for (const Vec2& v : cell.v) reach = std::max(reach, dot(v, n));
            if (reach <= off) continue;
            clip_labeled(cell, n, off, j);
            if (cell.empty()) break;
        }
    }
}

// Precomputed window data: bisector clipping runs inside a small expanding
// square around the seed; the window polygon itself only enters for cells
// that escape its inscribed circle.
struct WindowInfo {
    const ConvexPolygon* poly;
    Vec2 center;
    double inradius = 0.0;
    double circumradius = 0.0;
};

WindowInfo window_info(const ConvexPolygon& window) {
    WindowInfo w;
    w.poly = &window;
    w.center = window.centroid();
    w.inradius = std::numeric_limits<double>::max();
    for (std::size_t i = 0, n = window.v.size(); i < n; ++i) {
        Vec2 e = window.v[(i + 1) % n] - window.v[i];
        Vec2 nrm = -e.perp().normalized();
        w.inradius = std::min(w.inradius, dot(nrm, window.v[i] - w.center));
        w.circumradius = std::max(w.circumradius, dist(window.v[i], w.center));
    }
    return w;
}

LabeledPoly build_cell(int i, const std::vector<Vec2>& seeds,
                       const std::vector<double>& weights, const SeedGrid& grid,
                       const WindowInfo& win, double phi_min) {
    const Vec2 yi = seeds[i];
    for (double half = 6.0 * grid.cell;; half *= 4.0) {
        if (half >= 2.0 * win.circumradius) break;  // no point in local windows
        LabeledPoly cell;
        cell.v = {yi + Vec2{-half, -half}, yi + Vec2{half, -half},
                  yi + Vec2{half, half}, yi + Vec2{-half, half}};
        cell.label.assign(4, -2);
        clip_bisectors(cell, i, seeds, weights, grid, phi_min);
        if (cell.empty()) return cell;
        bool open = false;
        for (int lbl : cell.label)
            if (lbl == -2) open = true;
        if (open) continue;  // cell is cut off by the local window, retry larger
        // clip against the window only when the cell can cross its boundary
        bool inside = true;
        for (const Vec2& v : cell.v)
            if (dist(v, win.center) >= win.inradius) inside = false;
        if (!inside) {
            for (std::size_t e = 0, n = win.poly->v.size(); e < n && !cell.empty(); ++e) {
                Vec2 ev = win.poly->v[(e + 1) % n] - win.poly->v[e];
                Vec2 nrm = -ev.perp();
                double off = dot(nrm, win.poly->v[e]);
                double reach = -std::numeric_limits<double>::max();
                for (const Vec2& v : cell.v) reach = std::max(reach, dot(v, nrm));
                if (reach <= off) continue;
                clip_labeled(cell, nrm, off, -1);
            }
        }
        return cell;
    }
    LabeledPoly cell = labeled_from(*win.poly, -1);
    clip_bisectors(cell, i, seeds, weights, grid, phi_min);
    return cell;
}

}  // namespace

// =====================================================================
//  Target sampling
// =====================================================================

std::vector<Vec2> sample_target(const ConvexPolygon& omega2, int n, std::uint64_t rng_seed) {
    if (n < 1) throw InvalidParameter("sample_target: need n >= 1");
    Rng rng(rng_seed);
    Vec2 lo = omega2.bbox_min(), hi = omega2.bbox_max();
    std::vector<Vec2> pts;
    pts.reserve(n);
    while (static_cast<int>(pts.size()) < n) {
        Vec2 p = rng.in_box(lo, hi);
        if (omega2.contains(p)) pts.push_back(p);
    }
    // Lloyd relaxation inside the target to even out the sampling. In the
    // max-affine convention, weights |y|^2/2 make the cells Voronoi cells.
    for (int step = 0; step < 5; ++step) {
        std::vector<double> w(n);
        for (int i = 0; i < n; ++i) w[i] = 0.5 * pts[i].norm2();
        std::vector<PowerCell> cells = power_cells(pts, w, omega2);
        for (int i = 0; i < n; ++i)
            if (!cells[i].poly.empty()) pts[i] = cells[i].poly.centroid();
    }
    return pts;
}

// =====================================================================
//  Diagram construction
// =====================================================================

std::vector<PowerCell> power_cells(const std::vector<Vec2>& seeds,
                                   const std::vector<double>& weights,
                                   const ConvexPolygon& window, int threads) {
    const std::size_t n = seeds.size();
    SeedGrid grid;
    grid.build(seeds);
    double phi_min = std::numeric_limits<double>::max();
    for (std::size_t i = 0; i < n; ++i)
        phi_min = std::min(phi_min, weights[i] - 0.5 * seeds[i].norm2());
    std::vector<PowerCell> cells(n);
    parallel_for(n, [&](std::size_t i) {
        LabeledPoly lp = build_cell(static_cast<int>(i), seeds, weights, grid, window, phi_min);
        cells[i].poly.v = std::move(lp.v);
        cells[i].edge_neighbor = std::move(lp.label);
        cells[i].area_in_source = cells[i].poly.area();
    }, threads);
    return cells;
}

LaguerreDiagram build_diagram(const HoledDomain& dom, const std::vector<Vec2>& seeds,
                              const std::vector<double>& weights, int threads) {
    LaguerreDiagram d;
    d.seeds = seeds;
    d.weights = weights;
    d.cells = power_cells(seeds, weights, dom.outer, threads);
    d.clipped_areas.resize(seeds.size());
    parallel_for(seeds.size(), [&](std::size_t i) {
        d.cells[i].area_in_source = dom.area_in_domain(d.cells[i].poly);
        d.clipped_areas[i] = d.cells[i].area_in_source;
    }, threads);
    return d;
}

std::vector<double> cell_areas(const HoledDomain& dom, const std::vector<Vec2>& seeds,
                               const std::vector<double>& weights, int threads) {
    return build_diagram(dom, seeds, weights, threads).clipped_areas;
}

// =====================================================================
//  Damped Newton solve
// =====================================================================

namespace {

struct LaplacianEdge {
    int i, j;
    double w;
};

// Edge coefficients (shared edge length inside the source domain) / |y_i - y_j|.
std::vector<LaplacianEdge> assemble_edges(const HoledDomain& dom, const LaguerreDiagram& d) {
    std::map<std::pair<int, int>, double> acc;
    for (std::size_t i = 0; i < d.cells.size(); ++i) {
        const PowerCell& c = d.cells[i];
        for (std::size_t e = 0; e < c.poly.v.size(); ++e) {
            int j = c.edge_neighbor[e];
            if (j < 0 || j <= static_cast<int>(i)) continue;  // each pair once
            Vec2 a = c.poly.v[e];
            Vec2 b = c.poly.v[(e + 1) % c.poly.v.size()];
            double len = dom.segment_length_inside(a, b);
            if (len <= 0.0) continue;
            double gap = dist(d.seeds[i], d.seeds[j]);
            acc[{static_cast<int>(i), j}] += len / gap;
        }
    }
    std::vector<LaplacianEdge> edges;
    edges.reserve(acc.size());
    for (const auto& [key, w] : acc) edges.push_back({key.first, key.second, w});
    return edges;
}

// Conjugate gradient on the grounded Laplacian (component 0 pinned to 0),
// Jacobi-preconditioned, relative tolerance 1e-12.
std::vector<double> solve_grounded_laplacian(int n, const std::vector<LaplacianEdge>& edges,
                                             const std::vector<double>& rhs) {
    std::vector<double> diag(n, 0.0);
    for (const auto& e : edges) {
        diag[e.i] += e.w;
        diag[e.j] += e.w;
    }
    auto apply = [&](const std::vector<double>& x, std::vector<double>* out) {
        std::fill(out->begin(), out->end(), 0.0);
        for (const auto& e : edges) {
            double xi = e.i == 0 ? 0.0 : x[e.i];
            double xj = e.j == 0 ? 0.0 : x[e.j];
            if (e.i != 0) (*out)[e.i] += e.w * (xi - xj);
            if (e.j != 0) (*out)[e.j] += e.w * (xj - xi);
        }
    };
    std::vector<double> x(n, 0.0), res(n, 0.0), z(n, 0.0), p(n, 0.0), ap(n, 0.0);
    for (int i = 1; i < n; ++i) res[i] = rhs[i];
    double b_norm = 0.0;
    for (int i = 1; i < n; ++i) b_norm += res[i] * res[i];
    b_norm = std::sqrt(b_norm);
    if (b_norm == 0.0) return x;
    auto precond = [&](const std::vector<double>& r, std::vector<double>* out) {
        for (int i = 1; i < n; ++i)
            (*out)[i] = diag[i] > 0.0 ? r[i] / diag[i] : r[i];
    };
    precond(res, &z);
    p = z;
    double rz = 0.0;
    for (int i = 1; i < n; ++i) rz += res[i] * z[i];
    const int max_cg = 40 * n + 100;
    for (int it = 0; it < max_cg; ++it) {
        apply(p, &ap);
        double pap = 0.0;
        for (int i = 1; i < n; ++i) pap += p[i] * ap[i];
        if (pap <= 0.0) break;
        double alpha = rz / pap;
        double r_norm = 0.0;
        for (int i = 1; i < n; ++i) {
            x[i] += alpha * p[i];
            res[i] -= alpha * ap[i];
            r_norm += res[i] * res[i];
        }
        if (std::sqrt(r_norm) <= 1e-12 * b_norm) break;
        precond(res, &z);
        double rz_new = 0.0;
        for (int i = 1; i < n; ++i) rz_new += res[i] * z[i];
        double beta = rz_new / rz;
        rz = rz_new;
        for (int i = 1; i < n; ++i) p[i] = z[i] + beta * p[i];
    }
    return x;
}

double max_residual(const std::vector<double>& areas, double target) {
    double r = 0.0;
    for (double a : areas) r = std::max(r, std::abs(a - target));
    return r;
}

double min_of(const std::vector<double>& v) {
    return *std::min_element(v.begin(), v.end());
}

// Distance from y to the source domain (0 inside), for the conjugate
// initialization below.
double dist_to_source(const HoledDomain& dom, const Vec2& y) {
    if (dom.contains(y)) return 0.0;
    for (const ConvexHole& h : dom.holes)
        if (h.inside(y)) return dist(y, h.project(y));
    double d = dom.outer_boundary_distance(y);
    return d < 0.0 ? -d : 0.0;
}

}  // namespace

DiscretePotential SolveResult::potential() const {
    return DiscretePotential(diagram.seeds, weights);
}

SolveResult solve_weights(const HoledDomain& dom, const std::vector<Vec2>& seeds,
                          double tol, int max_iter, int threads) {
    const int n = static_cast<int>(seeds.size());
    if (n < 1) throw InvalidParameter("solve_weights: need at least one seed");
    if (!(tol > 0.0)) throw InvalidParameter("solve_weights: tol must be positive");
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (seeds[i].x == seeds[j].x && seeds[i].y == seeds[j].y)
                throw InvalidParameter("solve_weights: seeds must be distinct");

    const double target = dom.source_area() / n;

    // Restricted-conjugate start: psi_i = sup_{x in source} (x·y_i - |x|^2/2)
    // = |y_i|^2/2 - dist(y_i, source)^2/2. Coincides with the identity-like
    // |y_i|^2/2 whenever the seed sees the source, and keeps every cell alive
    // when the target overlaps holes.
    std::vector<double> psi(n);
    for (int i = 0; i < n; ++i) {
        double d = dist_to_source(dom, seeds[i]);
        psi[i] = 0.5 * seeds[i].norm2() - 0.5 * d * d;
    }

    SolveResult result;
    result.diagram = build_diagram(dom, seeds, psi, threads);
    if (n > 1 && min_of(result.diagram.clipped_areas) <= 0.0) {
        // fallback: spread the weights proportionally to |y|^2 and retry
        for (int i = 0; i < n; ++i) psi[i] = seeds[i].norm2();
        result.diagram = build_diagram(dom, seeds, psi, threads);
        if (min_of(result.diagram.clipped_areas) <= 0.0)
            throw SolverFailure("solve_weights: empty cell at initialization");
    }

    SolveReport& report = result.report;
    double residual = max_residual(result.diagram.clipped_areas, target);
    report.residual_history.push_back(residual);

    for (int iter = 0; iter < max_iter && residual > tol; ++iter) {
        auto edges = assemble_edges(dom, result.diagram);
        std::vector<double> rhs(n);
        for (int i = 0; i < n; ++i) rhs[i] = result.diagram.clipped_areas[i] - target;
        std::vector<double> dpsi = solve_grounded_laplacian(n, edges, rhs);

        // Damping: halve until every clipped area stays above half the
        // pre-step minimum and the residual does not increase.
        double pre_min = min_of(result.diagram.clipped_areas);
        double t = 1.0;
        bool accepted = false;
        for (int halvings = 0; halvings < 40; ++halvings, t *= 0.5) {
            std::vector<double> trial(n);
            for (int i = 0; i < n; ++i) trial[i] = psi[i] + t * dpsi[i];
            LaguerreDiagram d = build_diagram(dom, seeds, trial, threads);
            double r = max_residual(d.clipped_areas, target);
            if (min_of(d.clipped_areas) >= 0.5 * pre_min && r <= residual) {
                psi = std::move(trial);
                result.diagram = std::move(d);
                residual = r;
                accepted = true;
                break;
            }
        }
        report.damping_history.push_back(accepted ? t : 0.0);
        report.residual_history.push_back(residual);
        report.iterations = iter + 1;
        if (!accepted) break;
    }

    report.max_area_residual = residual;
    report.converged = residual <= tol;

    // Pin the additive gauge of the weights.
    double m = min_of(psi);
    for (double& w : psi) w -= m;
    result.weights = psi;
    result.diagram.weights = psi;
    return result;
}

}  // namespace otlab
