#include "otlab/legendre.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace otlab {

GridFunction GridFunction::sample(const std::function<double(double, double)>& f,
                                  double xmin, double xmax, double ymin, double ymax,
                                  int nx, int ny) {
    if (nx < 3 || ny < 3) throw InvalidParameter("grid sample: need at least 3x3 nodes");
    GridFunction g;
    g.nx = nx;
    g.ny = ny;
    g.x0 = xmin;
    g.y0 = ymin;
    g.hx = (xmax - xmin) / (nx - 1);
    g.hy = (ymax - ymin) / (ny - 1);
    g.vals.resize(static_cast<std::size_t>(nx) * ny);
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i)
            g.at(i, j) = f(g.x(i), g.y(j));
    return g;
}

double GridFunction::row_convexity_defect() const {
    double worst = 0.0;
    for (int j = 0; j < ny; ++j)
        for (int i = 1; i + 1 < nx; ++i)
            worst = std::min(worst, at(i - 1, j) - 2.0 * at(i, j) + at(i + 1, j));
    return worst;
}

void GridFunction::require_row_convex() const {
    double scale = 0.0;
    for (double v : vals) scale = std::max(scale, std::abs(v));
    if (row_convexity_defect() < -1e-10 * std::max(scale, 1.0))
        throw InvalidParameter("grid function is not convex along rows");
}

PLTFunction plt(const GridFunction& w, const std::optional<std::vector<double>>& p_nodes) {
    w.require_row_convex();

    // Common conjugate window: every row's subgradient range is
    // [first slope, last slope]; the output grid must fit inside all of them.
    double p_lo = -std::numeric_limits<double>::max();
    double p_hi = std::numeric_limits<double>::max();
    for (int j = 0; j < w.ny; ++j) {
        double s_first = (w.at(1, j) - w.at(0, j)) / w.hx;
        double s_last = (w.at(w.nx - 1, j) - w.at(w.nx - 2, j)) / w.hx;
        p_lo = std::max(p_lo, s_first);
        p_hi = std::min(p_hi, s_last);
    }
    if (!(p_hi > p_lo))
        throw IncompatibleRanges("plt: rows have no common subgradient window");

    PLTFunction out;
    if (p_nodes) {
        out.p = *p_nodes;
        for (double p : out.p)
            if (p < p_lo - 1e-12 || p > p_hi + 1e-12)
                throw IncompatibleRanges("plt: requested p node outside the common window");
        std::sort(out.p.begin(), out.p.end());
    } else {
        out.p.resize(w.nx);
        for (int k = 0; k < w.nx; ++k)
            out.p[k] = p_lo + (p_hi - p_lo) * k / (w.nx - 1);
    }
    out.y0 = w.y0;
    out.hy = w.hy;
    out.ny = w.ny;
    out.vals.resize(out.p.size() * w.ny);

    // Monotone argmax: the maximizer index of p*x_i - w_i is non-decreasing
    // in p for a row-convex w, so each row costs O(nx + np).
    for (int j = 0; j < w.ny; ++j) {
        int i = 0;
        for (std::size_t k = 0; k < out.p.size(); ++k) {
            double p = out.p[k];
            while (i + 1 < w.nx &&
                   p * w.x(i + 1) - w.at(i + 1, j) >= p * w.x(i) - w.at(i, j))
                ++i;
            out.at(static_cast<int>(k), j) = p * w.x(i) - w.at(i, j);
        }
    }
    return out;
}

PLTResiduals plt_residuals(const PLTFunction& ws) {
    const int np = static_cast<int>(ws.p.size());
    const int ny = ws.ny;
    if (np < 5 || ny < 5)
        throw InvalidParameter("plt_residuals: grid too small");

    // locate the x2 = 0 grid line
    int j0 = -1;
    for (int j = 0; j < ny; ++j)
        if (std::abs(ws.y(j)) <= 1e-12 * std::max(1.0, std::abs(ws.hy) * ny)) j0 = j;
    if (j0 < 2 || j0 > ny - 3)
        throw InvalidParameter("plt_residuals: x2 = 0 must be an interior grid line");

    const double hy = ws.hy;
    // p spacing is uniform by construction
    const double hp = ws.p[1] - ws.p[0];

    PLTResiduals r;
    for (int j = j0 + 1; j + 1 < ny; ++j) {
        for (int k = 1; k + 1 < np; ++k) {
            double wpp = (ws.at(k - 1, j) - 2.0 * ws.at(k, j) + ws.at(k + 1, j)) / (hp * hp);
            double wyy = (ws.at(k, j - 1) - 2.0 * ws.at(k, j) + ws.at(k, j + 1)) / (hy * hy);
            r.upper_laplacian = std::max(r.upper_laplacian, std::abs(wpp + wyy));
        }
    }
    for (int k = 0; k < np; ++k) {
        double lo = ws.at(k, 0);
        double hi = ws.at(k, j0);
        for (int j = 1; j < j0; ++j) {
            double t = static_cast<double>(j) / j0;
            double lin = lo + t * (hi - lo);
            r.lower_linearity = std::max(r.lower_linearity, std::abs(ws.at(k, j) - lin));
        }
        double up = (-3.0 * ws.at(k, j0) + 4.0 * ws.at(k, j0 + 1) - ws.at(k, j0 + 2)) / (2.0 * hy);
        double dn = (3.0 * ws.at(k, j0) - 4.0 * ws.at(k, j0 - 1) + ws.at(k, j0 - 2)) / (2.0 * hy);
        r.flux_jump = std::max(r.flux_jump, std::abs(up - dn));
    }
    return r;
}

double mixed_ratio(const GridFunction& w, const GridWindow& win) {
    double worst = 0.0;
    bool seen = false;
    for (int j = 1; j + 1 < w.ny; ++j) {
        double y = w.y(j);
        if (y < win.ymin || y > win.ymax) continue;
        for (int i = 1; i + 1 < w.nx; ++i) {
            double x = w.x(i);
            if (x < win.xmin || x > win.xmax) continue;
            seen = true;
            double w11 = (w.at(i - 1, j) - 2.0 * w.at(i, j) + w.at(i + 1, j)) / (w.hx * w.hx);
            double w12 = (w.at(i + 1, j + 1) - w.at(i - 1, j + 1) - w.at(i + 1, j - 1) +
                          w.at(i - 1, j - 1)) /
                         (4.0 * w.hx * w.hy);
            if (w11 < 1e-6)
                throw DegenerateDirection("mixed_ratio: w_11 below floor in the window");
            worst = std::max(worst, std::abs(w12) / w11);
        }
    }
    if (!seen) throw InvalidParameter("mixed_ratio: window contains no interior node");
    return worst;
}

}  // namespace otlab
