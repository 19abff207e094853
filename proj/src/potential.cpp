#include "otlab/potential.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <json.hpp>

namespace otlab {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

// =====================================================================
//  DiscretePotential
// =====================================================================

DiscretePotential::DiscretePotential(std::vector<Vec2> s, std::vector<double> w)
    : seeds(std::move(s)), weights(std::move(w)) {
    if (seeds.size() != weights.size() || seeds.empty())
        throw InvalidParameter("discrete potential: seeds and weights must match and be non-empty");
}

std::size_t DiscretePotential::argmax(const Vec2& x) const {
    std::size_t best = 0;
    double best_v = dot(x, seeds[0]) - weights[0];
    for (std::size_t i = 1; i < seeds.size(); ++i) {
        double v = dot(x, seeds[i]) - weights[i];
        if (v > best_v) {
            best_v = v;
            best = i;
        }
    }
    return best;
}

double DiscretePotential::eval(const Vec2& x) const {
    double best = -std::numeric_limits<double>::max();
    for (std::size_t i = 0; i < seeds.size(); ++i)
        best = std::max(best, dot(x, seeds[i]) - weights[i]);
    return best;
}

Vec2 DiscretePotential::subgradient(const Vec2& x) const { return seeds[argmax(x)]; }

std::string DiscretePotential::to_json() const {
    nlohmann::json j;
    j["seeds"] = nlohmann::json::array();
    for (const Vec2& s : seeds) j["seeds"].push_back({s.x, s.y});
    j["weights"] = weights;
    return j.dump(2);
}

DiscretePotential DiscretePotential::from_json(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    DiscretePotential p;
    for (const auto& s : j.at("seeds")) p.seeds.push_back({s.at(0), s.at(1)});
    p.weights = j.at("weights").get<std::vector<double>>();
    if (p.seeds.size() != p.weights.size() || p.seeds.empty())
        throw InvalidParameter("discrete potential: bad serialized sizes");
    return p;
}

// =====================================================================
//  ModelPotential
// =====================================================================

double model_eval(double r, double rho) {
    if (!(r > 0.0)) throw InvalidParameter("model potential: inner radius must be positive");
    if (rho < 0.0) throw InvalidParameter("model potential: radius must be non-negative");
    if (rho <= r) return 0.0;
    double q = std::sqrt(rho * rho - r * r);
    return 0.5 * rho * q - 0.5 * r * r * std::log((rho + q) / r);
}

std::pair<double, double> model_hessian(double r, double rho) {
    if (!(r > 0.0)) throw InvalidParameter("model potential: inner radius must be positive");
    if (rho <= r)
        throw InvalidParameter("model potential: Hessian degenerates for rho <= r");
    double q = std::sqrt(rho * rho - r * r);
    return {rho / q, q / rho};
}

ModelPotential::ModelPotential(double inner_radius)
    : ModelPotential(inner_radius, std::sqrt(inner_radius * inner_radius + 1.0 / kPi)) {}

ModelPotential::ModelPotential(double inner_radius, double outer_radius)
    : r(inner_radius), R(outer_radius) {
    if (!(r > 0.0) || !(R > r))
        throw InvalidParameter("model potential: need 0 < r < R");
    double mass = kPi * (R * R - r * r);
    if (std::abs(mass - 1.0) > 1e-3)
        throw InvalidParameter("model potential: annulus area must be 1 (within 1e-3)");
}

double ModelPotential::eval_radial(double rho) const { return model_eval(r, rho); }

double ModelPotential::gradient_magnitude(double rho) const {
    double d = rho * rho - r * r;
    return d > 0.0 ? std::sqrt(d) : 0.0;
}

std::pair<double, double> ModelPotential::hessian_eigs(double rho) const {
    return model_hessian(r, rho);
}

double ModelPotential::image_radius() const { return std::sqrt(R * R - r * r); }

double ModelPotential::eval(const Vec2& x) const { return model_eval(r, x.norm()); }

Vec2 ModelPotential::subgradient(const Vec2& x) const {
    double rho = x.norm();
    if (rho <= r || rho == 0.0) return {0.0, 0.0};
    return x * (gradient_magnitude(rho) / rho);
}

std::optional<double> ModelPotential::hessian_norm(const Vec2& x) const {
    double rho = x.norm();
    if (rho <= r) return std::nullopt;
    auto [rad, tan] = model_hessian(r, rho);
    return std::max(rad, tan);
}

// =====================================================================
//  QuadraticPotential
// =====================================================================

QuadraticPotential::QuadraticPotential(double scale) : a(scale) {
    if (!(a > 0.0)) throw InvalidParameter("quadratic potential: scale must be positive");
}

double QuadraticPotential::eval(const Vec2& x) const {
    return 0.5 * a * x.x * x.x + 0.5 * x.y * x.y / a;
}

Vec2 QuadraticPotential::subgradient(const Vec2& x) const { return {a * x.x, x.y / a}; }

std::optional<double> QuadraticPotential::hessian_norm(const Vec2&) const {
    return std::max(a, 1.0 / a);
}

}  // namespace otlab
