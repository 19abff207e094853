#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "otlab/potential.hpp"
#include "otlab/sdot.hpp"
#include "oracles.hpp"

using namespace otlab;

namespace {
const double kPi = 3.14159265358979323846;

HoledDomain unit_square_domain() {
    return HoledDomain::make(rectangle({-0.5, -0.5}, {0.5, 0.5}), {}, 0.5);
}

ConvexPolygon unit_area_disk_target(int n = 256) {
    double radius = std::sqrt(2.0 / (n * std::sin(2.0 * kPi / n)));
    return regular_polygon({0, 0}, radius, n);
}

HoledDomain annulus_domain(double r = 0.3) {
    double R = std::sqrt(r * r + 1.0 / kPi);
    return HoledDomain::make_disk({0, 0}, R, {ConvexHole::disk({0, 0}, r)}, 0.25);
}

}  // namespace

TEST_CASE("sample_target basics") {
    ConvexPolygon sq = rectangle({-0.5, -0.5}, {0.5, 0.5});
    CHECK_THROWS_AS(sample_target(sq, 0, 1), InvalidParameter);

    // n = 1: Lloyd fixed point is the centroid
    auto one = sample_target(sq, 1, 7);
    REQUIRE(one.size() == 1);
    CHECK(one[0].norm() < 1e-9);

    // determinism
    auto a = sample_target(sq, 64, 123);
    auto b = sample_target(sq, 64, 123);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].x == b[i].x);
        CHECK(a[i].y == b[i].y);
    }
    for (const Vec2& p : a) CHECK(sq.contains(p, 1e-9));
}

TEST_CASE("sample_target uniformity: chi-squared on 16 equal-area sectors") {
    ConvexPolygon disk = unit_area_disk_target();
    const int n = 1000;
    auto pts = sample_target(disk, n, 2024);
    int counts[16] = {0};
    for (const Vec2& p : pts) {
        int sector = static_cast<int>((std::atan2(p.y, p.x) + kPi) / (2 * kPi) * 16.0);
        counts[std::clamp(sector, 0, 15)]++;
    }
    double expect = n / 16.0;
    double chi2 = 0.0;
    for (int c : counts) chi2 += (c - expect) * (c - expect) / expect;
    CHECK(chi2 < 30.578);  // chi-squared 15 dof, 1% upper quantile
}

TEST_CASE("solve_weights trivial cases") {
    HoledDomain dom = unit_square_domain();

    SolveResult r1 = solve_weights(dom, {{0.1, 0.2}}, 1e-9, 10);
    CHECK(r1.report.converged);
    CHECK(r1.weights[0] == 0.0);
    CHECK(r1.diagram.clipped_areas[0] == doctest::Approx(1.0).epsilon(1e-9));

    // symmetric pair splits along the perpendicular bisector
    SolveResult r2 = solve_weights(dom, {{-0.2, 0.0}, {0.2, 0.0}}, 1e-10, 30);
    CHECK(r2.report.converged);
    CHECK(r2.weights[0] == doctest::Approx(r2.weights[1]).epsilon(1e-9));
    CHECK(r2.diagram.clipped_areas[0] == doctest::Approx(0.5).epsilon(1e-8));
    CHECK(r2.diagram.clipped_areas[1] == doctest::Approx(0.5).epsilon(1e-8));

    CHECK_THROWS_AS(solve_weights(dom, {{0, 0}, {0, 0}}, 1e-8, 5), InvalidParameter);
    CHECK_THROWS_AS(solve_weights(dom, {{0, 0}}, -1.0, 5), InvalidParameter);
}

TEST_CASE("cell areas: symmetry, partition, Monte Carlo") {
    HoledDomain dom = unit_square_domain();
    // symmetric 4x4 lattice with equal power weights (Voronoi cells in the
    // max-affine convention) gives equal areas
    std::vector<Vec2> lattice;
    std::vector<double> w;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
            Vec2 p{-0.375 + 0.25 * i, -0.375 + 0.25 * j};
            lattice.push_back(p);
            w.push_back(0.5 * p.norm2());
        }
    auto areas = cell_areas(dom, lattice, w);
    double total = 0.0;
    for (double a : areas) {
        CHECK(a == doctest::Approx(1.0 / 16).epsilon(1e-9));
        total += a;
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-9));

    // random weights on a domain with a hole: partition plus MC oracle
    HoledDomain holed = HoledDomain::make(rectangle({-1, -1}, {1, 1}),
                                          {ConvexHole::disk({0.1, -0.15}, 0.25)}, 0.15);
    Rng rng(31);
    std::vector<Vec2> seeds;
    std::vector<double> wt;
    for (int i = 0; i < 12; ++i) {
        seeds.push_back({rng.uniform(-0.4, 0.4), rng.uniform(-0.4, 0.4)});
        wt.push_back(0.5 * seeds.back().norm2() + rng.uniform(0.0, 0.05));
    }
    auto ha = cell_areas(holed, seeds, wt);
    double sum = 0.0;
    for (double a : ha) sum += a;
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));

    DiscretePotential u(seeds, wt);
    for (int i = 0; i < 12; ++i) {
        auto mc = oracles::mc_area(
            [&](const Vec2& p) {
                return holed.contains(p) && u.argmax(p) == static_cast<std::size_t>(i);
            },
            holed.outer.bbox_min(), holed.outer.bbox_max(), 1000000, 900 + i);
        CHECK(std::abs(ha[i] - mc.area) <= 3.0 * mc.stderr_ + 2e-5);
    }
}

TEST_CASE("square to square: fast convergence at n = 256") {
    HoledDomain dom = unit_square_domain();
    ConvexPolygon target = rectangle({-0.5, -0.5}, {0.5, 0.5});
    auto seeds = sample_target(target, 256, 11);
    SolveResult res = solve_weights(dom, seeds, 1e-7, 50);
    CHECK(res.report.converged);
    CHECK(res.report.iterations < 50);
    CHECK(res.report.max_area_residual < 1e-7);
    // residual history is non-increasing across accepted steps
    for (std::size_t i = 1; i < res.report.residual_history.size(); ++i)
        CHECK(res.report.residual_history[i] <= res.report.residual_history[i - 1] + 1e-15);
    // no dead seed after the solve
    for (double a : res.diagram.clipped_areas) CHECK(a > 0.25 / 256);
}

TEST_CASE("pushforward: subgradient attains the cell seed, balanced masses") {
    HoledDomain dom = unit_square_domain();
    ConvexPolygon target = unit_area_disk_target();
    const int n = 100;
    auto seeds = sample_target(target, n, 5);
    SolveResult res = solve_weights(dom, seeds, 1e-8, 50);
    REQUIRE(res.report.converged);
    DiscretePotential u = res.potential();

    Rng rng(77);
    std::vector<int> counts(n, 0);
    const int m = 10000;
    for (int i = 0; i < m; ++i) {
        Vec2 p{rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5)};
        std::size_t k = u.argmax(p);
        Vec2 g = u.subgradient(p);
        CHECK(g.x == seeds[k].x);
        counts[k]++;
    }
    double max_frac = *std::max_element(counts.begin(), counts.end()) /
                      static_cast<double>(m);
    CHECK(max_frac <= 1.5 / n);  // 1/n plus sampling noise

    // gradient range stays inside the seed hull, hence inside the target
    for (int i = 0; i < 200; ++i) {
        Vec2 p{rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5)};
        CHECK(target.contains(u.subgradient(p), 1e-9));
    }
}

TEST_CASE("annulus to disk: solver handles seeds over the hole") {
    HoledDomain dom = annulus_domain();
    ConvexPolygon target = unit_area_disk_target();
    auto seeds = sample_target(target, 300, 17);
    SolveResult res = solve_weights(dom, seeds, 1e-7, 60);
    CHECK(res.report.converged);
    double total = 0.0;
    for (double a : res.diagram.clipped_areas) total += a;
    CHECK(total == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("annulus refinement: gradient error decreases with n") {
    HoledDomain dom = annulus_domain();
    ModelPotential model(dom.holes[0].a, dom.outer_disk->second);
    ConvexPolygon target = unit_area_disk_target();

    Rng rng(41);
    std::vector<Vec2> probes;
    while (probes.size() < 400) {
        Vec2 p{rng.uniform(-0.65, 0.65), rng.uniform(-0.65, 0.65)};
        if (dom.contains(p)) probes.push_back(p);
    }
    double prev = 1e300;
    for (int n : {200, 800}) {
        auto seeds = sample_target(target, n, 3);
        SolveResult res = solve_weights(dom, seeds, 1e-6, 60);
        REQUIRE(res.report.converged);
        DiscretePotential u = res.potential();
        double err = 0.0;
        for (const Vec2& p : probes) err += dist(u.subgradient(p), model.subgradient(p));
        err /= probes.size();
        CHECK(err < prev);
        prev = err;
    }
}
