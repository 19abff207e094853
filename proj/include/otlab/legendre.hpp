#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "otlab/error.hpp"
#include "otlab/vec2.hpp"

namespace otlab {

// Values of a function on a uniform rectangular grid.
struct GridFunction {
    int nx = 0, ny = 0;
    double x0 = 0.0, y0 = 0.0;  // coordinates of node (0, 0)
    double hx = 0.0, hy = 0.0;
    std::vector<double> vals;   // row-major: vals[j*nx + i]

    double& at(int i, int j) { return vals[static_cast<std::size_t>(j) * nx + i]; }
    double at(int i, int j) const { return vals[static_cast<std::size_t>(j) * nx + i]; }
    double x(int i) const { return x0 + i * hx; }
    double y(int j) const { return y0 + j * hy; }

    static GridFunction sample(const std::function<double(double, double)>& f,
                               double xmin, double xmax, double ymin, double ymax,
                               int nx, int ny);

    // Most negative second difference along rows (x direction); a row-convex
    // grid returns >= -1e-10 * scale.
    double row_convexity_defect() const;
    void require_row_convex() const;  // throws InvalidParameter on defect
};

// Row-wise convex conjugate in the first variable, sampled on a common
// p-grid (intersection of the rows' subgradient ranges).
struct PLTFunction {
    std::vector<double> p;      // conjugate variable nodes (ascending)
    double y0 = 0.0, hy = 0.0;
    int ny = 0;
    std::vector<double> vals;   // vals[j * p.size() + k]

    double at(int k, int j) const { return vals[static_cast<std::size_t>(j) * p.size() + k]; }
    double& at(int k, int j) { return vals[static_cast<std::size_t>(j) * p.size() + k]; }
    double y(int j) const { return y0 + j * hy; }
};

// Linear-time per-row conjugate via the monotone-argmax sweep.
// Throws IncompatibleRanges when the rows' slope windows do not overlap.
PLTFunction plt(const GridFunction& w,
                const std::optional<std::vector<double>>& p_nodes = std::nullopt);

struct PLTResiduals {
    double upper_laplacian = 0.0;   // sup |w*_11 + w*_22| on {x2 > 0}
    double lower_linearity = 0.0;   // deviation from linearity on vertical segments, {x2 < 0}
    double flux_jump = 0.0;         // sup |w*_2(.,0+) - w*_2(.,0-)|
};

// Requires x2 = 0 to be a grid line. Centered second differences inside each
// half, second-order one-sided differences at the interface.
PLTResiduals plt_residuals(const PLTFunction& wstar);

struct GridWindow {
    double xmin, xmax, ymin, ymax;
};

// sup |w_12| / w_11 over grid nodes in the window (finite differences).
// Throws DegenerateDirection if w_11 drops below 1e-6 anywhere in it.
double mixed_ratio(const GridFunction& w, const GridWindow& window);

}  // namespace otlab
