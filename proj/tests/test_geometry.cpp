#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "otlab/geometry.hpp"
#include "otlab/rng.hpp"
#include "oracles.hpp"

using namespace otlab;

namespace {
const double kPi = 3.14159265358979323846;

ConvexPolygon unit_square() { return rectangle({0, 0}, {1, 1}); }

HoledDomain square_with_disk() {
    // [-1,1]^2 with a disk hole of radius 0.2 at the origin
    return HoledDomain::make(rectangle({-1, -1}, {1, 1}),
                             {ConvexHole::disk({0, 0}, 0.2)}, 0.15);
}

}  // namespace

TEST_CASE("clip_halfplane on the unit square") {
    ConvexPolygon sq = unit_square();

    ConvexPolygon half = clip_halfplane(sq, {1, 0}, 0.5);
    CHECK(half.area() == doctest::Approx(0.5).epsilon(1e-12));
    for (const Vec2& v : half.v) CHECK(v.x <= 0.5 + 1e-12);

    ConvexPolygon full = clip_halfplane(sq, {1, 0}, 2.0);
    CHECK(full.area() == doctest::Approx(1.0).epsilon(1e-12));

    // diagonal cut x + y <= 1: expected triangle enumerated directly
    double s = 1.0 / std::sqrt(2.0);
    ConvexPolygon tri = clip_halfplane(sq, {s, s}, s);
    CHECK(tri.area() == doctest::Approx(0.5).epsilon(1e-12));
    std::vector<Vec2> expected{{0, 0}, {1, 0}, {0, 1}};
    for (const Vec2& e : expected) {
        bool found = false;
        for (const Vec2& v : tri.v)
            if (dist(v, e) < 1e-12) found = true;
        CHECK(found);
    }

    ConvexPolygon none = clip_halfplane(sq, {1, 0}, -1.0);
    CHECK(none.empty());
}

TEST_CASE("clipping properties: monotone area and exact partition") {
    Rng rng(11);
    for (int trial = 0; trial < 60; ++trial) {
        ConvexPolygon p = oracles::random_hull(rng, 20);
        if (p.v.size() < 3) continue;
        double t = rng.uniform(0, 2 * kPi);
        Vec2 n{std::cos(t), std::sin(t)};
        double off = rng.uniform(-0.8, 0.8);
        ConvexPolygon a = clip_halfplane(p, n, off);
        ConvexPolygon b = clip_halfplane(p, -n, -off);
        double pa = p.area();
        CHECK(a.area() <= pa + 1e-12);
        CHECK(b.area() <= pa + 1e-12);
        CHECK(a.area() + b.area() == doctest::Approx(pa).epsilon(1e-10));
    }
}

TEST_CASE("polygon_intersection against Monte Carlo") {
    Rng rng(7);
    for (int trial = 0; trial < 10; ++trial) {
        ConvexPolygon a = oracles::random_hull(rng, 15);
        ConvexPolygon b = oracles::random_hull(rng, 15, 0.8, {0.3, 0.1});
        ConvexPolygon inter = polygon_intersection(a, b);
        auto mc = oracles::mc_area(
            [&](const Vec2& p) { return a.contains(p, 1e-12) && b.contains(p, 1e-12); },
            {-1.5, -1.5}, {1.5, 1.5}, 200000, 1000 + trial);
        double got = inter.empty() ? 0.0 : inter.area();
        CHECK(std::abs(got - mc.area) <= 3.5 * mc.stderr_ + 1e-6);
    }
}

TEST_CASE("domain_distance examples") {
    // annulus: min(rho - r, R - rho)
    double r = 0.3, R = std::sqrt(r * r + 1.0 / kPi);
    HoledDomain ann = HoledDomain::make_disk({0, 0}, R, {ConvexHole::disk({0, 0}, r)}, 0.25);
    double rn = ann.holes[0].a, Rn = ann.outer_disk->second;
    for (double rho : {0.35, 0.45, 0.55}) {
        double rho_n = rho * ann.scale;
        Vec2 x{rho_n, 0.0};
        CHECK(ann.distance(x) ==
              doctest::Approx(std::min(rho_n - rn, Rn - rho_n)).epsilon(1e-9));
    }

    HoledDomain dom = square_with_disk();
    // collinear case: scaled copy of min(0.3, 0.5) at (0.5, 0)
    Vec2 x{0.5 * dom.scale, 0.0};
    CHECK(dom.distance(x) == doctest::Approx(0.3 * dom.scale).epsilon(1e-10));

    CHECK_THROWS_AS(dom.distance(Vec2{0.0, 0.0}), OutsideDomain);  // inside the hole
}

TEST_CASE("domain_distance against dense boundary sampling") {
    HoledDomain dom = HoledDomain::make(
        rectangle({-1.1, -0.9}, {1.0, 1.05}),
        {ConvexHole::disk({-0.4, 0.1}, 0.18), ConvexHole::ellipse({0.45, -0.2}, 0.2, 0.12, 0.7)},
        0.06);
    Rng rng(3);
    int tested = 0;
    while (tested < 40) {
        Vec2 x{rng.uniform(-1.1, 1.0), rng.uniform(-0.9, 1.05)};
        x *= dom.scale;
        if (!dom.contains(x)) continue;
        ++tested;
        double got = dom.distance(x);
        double want = oracles::dense_boundary_distance(dom, x);
        CHECK(got == doctest::Approx(want).epsilon(1e-6));
    }
}

TEST_CASE("domain_distance is 1-Lipschitz along segments") {
    HoledDomain dom = square_with_disk();
    Rng rng(5);
    for (int trial = 0; trial < 30; ++trial) {
        Vec2 a{rng.uniform(-0.95, 0.95), rng.uniform(-0.95, 0.95)};
        Vec2 b{rng.uniform(-0.95, 0.95), rng.uniform(-0.95, 0.95)};
        a *= dom.scale;
        b *= dom.scale;
        if (!dom.contains(a) || !dom.contains(b)) continue;
        double prev = dom.distance(a);
        const int steps = 50;
        bool inside_run = true;
        for (int k = 1; k <= steps; ++k) {
            Vec2 p = a + (static_cast<double>(k) / steps) * (b - a);
            if (!dom.contains(p)) {
                inside_run = false;
                break;
            }
            double cur = dom.distance(p);
            CHECK(std::abs(cur - prev) <= dist(a, b) / steps + 1e-9);
            prev = cur;
        }
        (void)inside_run;
    }
}

TEST_CASE("tangent_data on disks and ellipses") {
    HoledDomain dom = square_with_disk();
    double r = 0.2 * dom.scale;
    auto [t1, n1] = tangent_data(dom, Vec2{r, 0.0});
    CHECK(std::abs(std::abs(t1.y) - 1.0) < 1e-12);
    CHECK(n1.x == doctest::Approx(1.0).epsilon(1e-12));

    HoledDomain edom = HoledDomain::make(
        rectangle({-1.2, -1.2}, {1.2, 1.2}), {ConvexHole::ellipse({0, 0}, 0.3, 0.15, 0.0)},
        0.05);
    double a = 0.3 * edom.scale;
    auto [t2, n2] = tangent_data(edom, Vec2{a, 0.0});
    CHECK(std::abs(std::abs(t2.y) - 1.0) < 1e-12);
    CHECK(n2.x == doctest::Approx(1.0).epsilon(1e-12));

    // generic ellipse point: tangent matches the finite-difference derivative
    // of the parametrization
    const ConvexHole& e = edom.holes[0];
    double tt = 0.83;
    Vec2 p = e.center + Vec2{e.a * std::cos(tt), e.b * std::sin(tt)};
    Vec2 tan, nrm;
    e.tangent_frame(p, &tan, &nrm);
    double h = 1e-6;
    Vec2 fd = (Vec2{e.a * std::cos(tt + h), e.b * std::sin(tt + h)} -
               Vec2{e.a * std::cos(tt - h), e.b * std::sin(tt - h)}) /
              (2 * h);
    fd = fd.normalized();
    CHECK(std::abs(std::abs(dot(fd, tan)) - 1.0) < 1e-8);
    CHECK(std::abs(dot(fd, nrm)) < 1e-8);

    CHECK_THROWS_AS(tangent_data(edom, Vec2{0.9, 0.9}), NotOnBoundary);
}

TEST_CASE("min_area_rectangle examples and sweep oracle") {
    ConvexPolygon disk = regular_polygon({0, 0}, 1.0, 256);
    JohnBox jb = min_area_rectangle(disk);
    CHECK(jb.half_long == doctest::Approx(1.0).epsilon(0.01));
    CHECK(jb.half_short == doctest::Approx(1.0).epsilon(0.01));
    CHECK(jb.eccentricity() == doctest::Approx(1.0).epsilon(0.01));

    ConvexPolygon rect = rectangle({-2, -1}, {2, 1});
    JohnBox jr = min_area_rectangle(rect);
    CHECK(jr.half_long == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(jr.half_short == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(std::abs(jr.axis.x) - 1.0) < 1e-12);

    Rng rng(21);
    for (int trial = 0; trial < 40; ++trial) {
        ConvexPolygon p = oracles::random_hull(rng, 20);
        if (p.v.size() < 3) continue;
        JohnBox b = min_area_rectangle(p);
        double box_area = b.area();
        double pa = p.area();
        CHECK(box_area >= pa - 1e-12);
        CHECK(box_area <= 2.0 * pa + 1e-9);
        CHECK(box_area <= oracles::rectangle_sweep_area(p) + 1e-9);
        // containment and the trapping certificate
        ConvexPolygon bp = b.polygon();
        for (const Vec2& v : p.v) CHECK(bp.contains(v, 1e-9));
        CHECK(b.trapping > 0.0);
        CHECK(b.trapping <= 1.0 + 1e-12);
        for (const Vec2& corner : bp.v) {
            Vec2 shrunk = b.center + (b.trapping * 0.999) * (corner - b.center);
            CHECK(p.contains(shrunk, 1e-9 * p.diameter()));
        }
    }

    CHECK_THROWS_AS(min_area_rectangle(ConvexPolygon({{0, 0}, {1, 0}})), DegeneratePolygon);
}

TEST_CASE("area_in_domain partition property") {
    HoledDomain dom = square_with_disk();
    Rng rng(13);
    for (int trial = 0; trial < 8; ++trial) {
        Vec2 lo{rng.uniform(-1.0, 0.3), rng.uniform(-1.0, 0.3)};
        Vec2 hi = lo + Vec2{rng.uniform(0.2, 0.9), rng.uniform(0.2, 0.9)};
        ConvexPolygon rect_poly = rectangle(lo, hi);
        double in = dom.area_in_domain(rect_poly);
        auto mc = oracles::mc_area(
            [&](const Vec2& p) {
                return dom.outer.contains(p, 1e-12) && !dom.holes[0].poly.contains(p, -1e-12);
            },
            lo, hi, 400000, 500 + trial);
        CHECK(std::abs(in - mc.area) <= 3.5 * mc.stderr_ + 1e-6);
        // complement splits the rectangle area exactly
        double outside = rect_poly.area() - in;
        double outer_part = polygon_intersection(rect_poly, dom.outer).empty()
                                ? 0.0
                                : polygon_intersection(rect_poly, dom.outer).area();
        double hole_part = polygon_intersection(rect_poly, dom.holes[0].poly).empty()
                               ? 0.0
                               : polygon_intersection(rect_poly, dom.holes[0].poly).area();
        CHECK(outside == doctest::Approx(rect_poly.area() - outer_part + hole_part)
                             .epsilon(1e-10));
    }
}

TEST_CASE("segment_length_inside") {
    HoledDomain dom = square_with_disk();
    double s = dom.scale;
    // chord through the hole: loses the diameter of the hole
    double len = dom.segment_length_inside(Vec2{-0.9 * s, 0}, Vec2{0.9 * s, 0});
    CHECK(len == doctest::Approx((1.8 - 0.4) * s).epsilon(1e-9));
    // fully inside
    CHECK(dom.segment_length_inside(Vec2{0.5 * s, 0.5 * s}, Vec2{0.9 * s, 0.5 * s}) ==
          doctest::Approx(0.4 * s).epsilon(1e-9));
    // fully outside
    CHECK(dom.segment_length_inside(Vec2{2 * s, 0}, Vec2{3 * s, 0}) == 0.0);
}

TEST_CASE("HoledDomain construction invariants") {
    HoledDomain dom = square_with_disk();
    CHECK(dom.source_area() == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(dom.holes[0].kappa_min >= dom.delta);
    CHECK(dom.holes[0].kappa_max <= 1.0 / dom.delta);

    // separation violation: hole touching the boundary
    CHECK_THROWS_AS(HoledDomain::make(rectangle({-1, -1}, {1, 1}),
                                      {ConvexHole::disk({0.85, 0}, 0.2)}, 0.15),
                    InvalidParameter);
    // curvature violation: tiny hole versus large delta
    CHECK_THROWS_AS(HoledDomain::make(rectangle({-1, -1}, {1, 1}),
                                      {ConvexHole::disk({0, 0}, 0.01)}, 0.15),
                    InvalidParameter);
    // two holes too close
    CHECK_THROWS_AS(HoledDomain::make(rectangle({-1, -1}, {1, 1}),
                                      {ConvexHole::disk({-0.2, 0}, 0.15),
                                       ConvexHole::disk({0.2, 0}, 0.15)},
                                      0.15),
                    InvalidParameter);
}

TEST_CASE("polygon validate catches defects") {
    ConvexPolygon ok = regular_polygon({0, 0}, 1.0, 8);
    CHECK_NOTHROW(ok.validate());

    ConvexPolygon dup = ok;
    dup.v.push_back(dup.v.back());
    CHECK_THROWS_AS(dup.validate(), DegeneratePolygon);

    ConvexPolygon nonconvex({{0, 0}, {1, 0}, {0.2, 0.2}, {0, 1}});
    CHECK_THROWS_AS(nonconvex.validate(), DegeneratePolygon);
}

TEST_CASE("moments match closed forms") {
    ConvexPolygon rect_poly = rectangle({-2, -1}, {2, 1});
    auto m = rect_poly.moments();
    CHECK(m.area == doctest::Approx(8.0));
    CHECK(m.cxx == doctest::Approx(8.0 * 16.0 / 12.0).epsilon(1e-12));  // area * width^2/12
    CHECK(m.cyy == doctest::Approx(8.0 * 4.0 / 12.0).epsilon(1e-12));
    CHECK(m.cxy == doctest::Approx(0.0).epsilon(1e-12));
}
