#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "otlab/potential.hpp"
#include "otlab/rng.hpp"
#include "oracles.hpp"

using namespace otlab;

namespace {
const double kPi = 3.14159265358979323846;

double quad_oracle(double r, double rho) {
    if (rho <= r) return 0.0;
    auto f = [r](double s) { return std::sqrt(std::max(s * s - r * r, 0.0)); };
    return oracles::adaptive_simpson(f, r, rho, 1e-13);
}

void check_convexity(const ConvexPotential& u, Rng& rng, double box) {
    for (int trial = 0; trial < 200; ++trial) {
        Vec2 x{rng.uniform(-box, box), rng.uniform(-box, box)};
        Vec2 y{rng.uniform(-box, box), rng.uniform(-box, box)};
        double t = rng.uniform();
        double lhs = u.eval(x * t + y * (1 - t));
        double rhs = t * u.eval(x) + (1 - t) * u.eval(y);
        CHECK(lhs <= rhs + 1e-10);
        Vec2 p = u.subgradient(x);
        CHECK(u.eval(y) >= u.eval(x) + dot(p, y - x) - 1e-10);
    }
}

}  // namespace

TEST_CASE("model_eval closed form against quadrature") {
    CHECK(model_eval(0.3, 0.3) == 0.0);
    CHECK(model_eval(0.3, 0.1) == 0.0);
    CHECK(model_eval(0.3, 0.6) == doctest::Approx(quad_oracle(0.3, 0.6)).epsilon(1e-10));
    for (double r : {0.1, 0.3, 0.45}) {
        for (double rho : {r + 1e-4, r + 0.05, r * 2, 1.0}) {
            CHECK(model_eval(r, rho) ==
                  doctest::Approx(quad_oracle(r, rho)).epsilon(1e-10));
        }
    }
    // r -> 0 degenerates to |x|^2 / 2
    CHECK(model_eval(1e-8, 1.0) == doctest::Approx(0.5).epsilon(1e-8));
    CHECK_THROWS_AS(model_eval(-0.1, 1.0), InvalidParameter);
    CHECK_THROWS_AS(model_eval(0.0, 1.0), InvalidParameter);
}

TEST_CASE("model_hessian eigenvalues") {
    // eigenvalue product is exactly 1
    for (int i = 0; i < 1000; ++i) {
        double rho = 0.3 + 1e-6 + i * 1e-3;
        auto [rad, tan] = model_hessian(0.3, rho);
        CHECK(std::abs(rad * tan - 1.0) <= 1e-12);
    }
    // eigenvalues against finite differences of the closed form
    double r = 0.3;
    for (double rho : {0.45, 0.6, 0.9}) {
        auto [rad, tan] = model_hessian(r, rho);
        auto u1 = [r](double s) { return model_eval(r, s); };
        double fd_rad = oracles::central_diff2(u1, rho, 1e-5);
        double fd_grad = oracles::central_diff(u1, rho, 1e-6);
        CHECK(rad == doctest::Approx(fd_rad).epsilon(1e-5));
        CHECK(tan == doctest::Approx(fd_grad / rho).epsilon(1e-6));
    }
    // blow-up rate near the inner rim: radial * sqrt(d) -> sqrt(r/2)
    double d = 1e-4;
    auto [rad, tan] = model_hessian(r, r + d);
    CHECK(rad * std::sqrt(d) == doctest::Approx(std::sqrt(r / 2.0)).epsilon(0.01));
    CHECK(tan == doctest::Approx(std::sqrt(2.0 * r * d + d * d) / (r + d)).epsilon(1e-12));
    // identity limit
    auto [rad0, tan0] = model_hessian(1e-9, 1.0);
    CHECK(rad0 == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(tan0 == doctest::Approx(1.0).epsilon(1e-12));

    CHECK_THROWS_AS(model_hessian(0.3, 0.3), InvalidParameter);
    CHECK_THROWS_AS(model_hessian(0.3, 0.2), InvalidParameter);
}

TEST_CASE("model potential as a ConvexPotential") {
    ModelPotential u(0.3);
    CHECK(u.R == doctest::Approx(std::sqrt(0.09 + 1.0 / kPi)).epsilon(1e-12));
    Rng rng(2);
    check_convexity(u, rng, 0.9);
    // gradient magnitude sqrt(rho^2 - r^2)
    for (double rho : {0.4, 0.55}) {
        Vec2 x{rho / std::sqrt(2.0), rho / std::sqrt(2.0)};
        CHECK(u.subgradient(x).norm() ==
              doctest::Approx(std::sqrt(rho * rho - 0.09)).epsilon(1e-12));
    }
    CHECK(u.subgradient(Vec2{0.1, 0.1}).norm() == 0.0);
}

TEST_CASE("model gradient is C^{1,1/2} across the rim") {
    ModelPotential u(0.3);
    Rng rng(4);
    double bound = 3.0 * std::sqrt(2.0 * u.R);
    for (int trial = 0; trial < 2000; ++trial) {
        double th = rng.uniform(0, 2 * kPi);
        Vec2 dir{std::cos(th), std::sin(th)};
        double t1 = rng.uniform(0.0, 0.2);
        double t2 = rng.uniform(0.0, 0.2);
        Vec2 x = dir * (u.r - t1);  // inside the flat core
        Vec2 y = dir * (u.r + t2);
        double sep = dist(x, y);
        if (sep <= 1e-12) continue;
        double g = dist(u.subgradient(x), u.subgradient(y));
        CHECK(g <= bound * std::sqrt(sep) + 1e-12);
    }
}

TEST_CASE("model pushforward covers the image disk") {
    ModelPotential u(0.3);
    double rim = u.image_radius();
    Rng rng(9);
    std::vector<Vec2> images;
    for (int i = 0; i < 10000; ++i) {
        double rho = std::sqrt(rng.uniform(u.r * u.r, u.R * u.R));
        double th = rng.uniform(0, 2 * kPi);
        Vec2 x = rho * Vec2{std::cos(th), std::sin(th)};
        Vec2 g = u.subgradient(x);
        CHECK(g.norm() <= rim + 1e-12);
        images.push_back(g);
    }
    // the image cloud covers the disk within Hausdorff distance 0.02
    for (int i = 0; i < 400; ++i) {
        double rho = rim * std::sqrt((i % 20 + 0.5) / 20.0);
        double th = 2 * kPi * (i / 20 + 0.5) / 20.0;
        Vec2 p = rho * Vec2{std::cos(th), std::sin(th)};
        double best = 1e300;
        for (const Vec2& g : images) best = std::min(best, dist(p, g));
        CHECK(best <= 0.02);
    }
}

TEST_CASE("quadratic potential") {
    QuadraticPotential u1(1.0);
    CHECK(u1.eval({1, 1}) == doctest::Approx(1.0));
    CHECK(u1.subgradient({1, 1}).x == doctest::Approx(1.0));
    CHECK(u1.subgradient({1, 1}).y == doctest::Approx(1.0));

    QuadraticPotential u4(4.0);
    CHECK(u4.eval({1, 0}) == doctest::Approx(2.0));
    CHECK(u4.subgradient({1, 0}).x == doctest::Approx(4.0));
    CHECK(u4.subgradient({1, 0}).y == doctest::Approx(0.0));

    // Hessian determinant is 1 for every scale
    for (double a : {0.25, 1.0, 3.0, 9.0}) {
        QuadraticPotential u(a);
        CHECK(a * (1.0 / a) == doctest::Approx(1.0).epsilon(1e-15));
        CHECK(*u.hessian_norm({0, 0}) == doctest::Approx(std::max(a, 1.0 / a)));
    }
    CHECK_THROWS_AS(QuadraticPotential(0.0), InvalidParameter);
    CHECK_THROWS_AS(QuadraticPotential(-2.0), InvalidParameter);

    Rng rng(6);
    QuadraticPotential uq(3.0);
    check_convexity(uq, rng, 2.0);
}

TEST_CASE("discrete potential evaluation and ties") {
    DiscretePotential u({{1, 0}, {0, 1}, {-1, 0}}, {0.0, 0.0, 0.0});
    CHECK(u.eval({2, 0}) == doctest::Approx(2.0));
    CHECK(u.subgradient({2, 0}).x == doctest::Approx(1.0));
    // tie on the diagonal: lowest attaining index wins
    CHECK(u.argmax({0.5, 0.5}) == 0);
    CHECK(u.is_discrete());

    Rng rng(8);
    std::vector<Vec2> seeds;
    std::vector<double> w;
    for (int i = 0; i < 40; ++i) {
        seeds.push_back({rng.uniform(-1, 1), rng.uniform(-1, 1)});
        w.push_back(rng.uniform(0, 0.3));
    }
    DiscretePotential ur(seeds, w);
    check_convexity(ur, rng, 1.5);

    CHECK_THROWS_AS(DiscretePotential({}, {}), InvalidParameter);
    CHECK_THROWS_AS(DiscretePotential({{0, 0}}, {0.0, 1.0}), InvalidParameter);
}

TEST_CASE("discrete potential JSON round-trip is exact") {
    Rng rng(10);
    std::vector<Vec2> seeds;
    std::vector<double> w;
    for (int i = 0; i < 25; ++i) {
        seeds.push_back({rng.uniform(-1, 1), rng.uniform(-1, 1)});
        w.push_back(rng.uniform(0, 1));
    }
    DiscretePotential u(seeds, w);
    DiscretePotential v = DiscretePotential::from_json(u.to_json());
    REQUIRE(v.seeds.size() == u.seeds.size());
    for (std::size_t i = 0; i < u.seeds.size(); ++i) {
        CHECK(v.seeds[i].x == u.seeds[i].x);  // bit-exact
        CHECK(v.seeds[i].y == u.seeds[i].y);
        CHECK(v.weights[i] == u.weights[i]);
    }
    CHECK(v.to_json() == u.to_json());
}
