#pragma once

#include <cstdint>
#include <vector>

#include "otlab/geometry.hpp"
#include "otlab/potential.hpp"

namespace otlab {

// One power cell clipped to the outer polygon, with the generating
// constraint recorded per edge (-1 for outer-boundary edges).
struct PowerCell {
    ConvexPolygon poly;
    std::vector<int> edge_neighbor;  // edge i runs from poly.v[i] to poly.v[i+1]
    double area_in_source = 0.0;     // |cell ∩ source domain|
};

struct LaguerreDiagram {
    std::vector<Vec2> seeds;
    std::vector<double> weights;
    std::vector<PowerCell> cells;
    std::vector<double> clipped_areas;
};

struct SolveReport {
    int iterations = 0;
    double max_area_residual = 0.0;
    std::vector<double> residual_history;
    std::vector<double> damping_history;
    bool converged = false;
};

struct SolveResult {
    std::vector<double> weights;
    LaguerreDiagram diagram;
    SolveReport report;

    DiscretePotential potential() const;
};

// N target points of equal mass inside omega2: rejection sampling then
// 5 Lloyd relaxation steps. Deterministic for a fixed seed.
std::vector<Vec2> sample_target(const ConvexPolygon& omega2, int n,
                                std::uint64_t rng_seed);

// Power cells of max-affine weights, clipped against `window`.
std::vector<PowerCell> power_cells(const std::vector<Vec2>& seeds,
                                   const std::vector<double>& weights,
                                   const ConvexPolygon& window, int threads = 0);

LaguerreDiagram build_diagram(const HoledDomain& dom, const std::vector<Vec2>& seeds,
                              const std::vector<double>& weights, int threads = 0);

std::vector<double> cell_areas(const HoledDomain& dom, const std::vector<Vec2>& seeds,
                               const std::vector<double>& weights, int threads = 0);

// Damped Newton on the dual weights: every cell carries mass 1/N when the
// max area residual drops below tol. Throws SolverFailure on non-convergence
// (the report inside the exception message carries the residual reached).
SolveResult solve_weights(const HoledDomain& dom, const std::vector<Vec2>& seeds,
                          double tol, int max_iter, int threads = 0);

}  // namespace otlab
