#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "otlab/error.hpp"
#include "otlab/vec2.hpp"

namespace otlab {

// Evaluable convex function with a subgradient selection.
struct ConvexPotential {
    virtual ~ConvexPotential() = default;
    virtual double eval(const Vec2& x) const = 0;
    virtual Vec2 subgradient(const Vec2& x) const = 0;
    virtual bool is_discrete() const { return false; }
    // Largest |eigenvalue| of the Hessian, when a closed form exists.
    virtual std::optional<double> hessian_norm(const Vec2&) const { return std::nullopt; }
};

// =====================================================================
//  Max-of-affine potential (solver output)
// =====================================================================

struct DiscretePotential : ConvexPotential {
    std::vector<Vec2> seeds;
    std::vector<double> weights;

    DiscretePotential() = default;
    DiscretePotential(std::vector<Vec2> s, std::vector<double> w);

    std::size_t argmax(const Vec2& x) const;  // lowest attaining index at ties
    double eval(const Vec2& x) const override;
    Vec2 subgradient(const Vec2& x) const override;
    bool is_discrete() const override { return true; }

    std::string to_json() const;
    static DiscretePotential from_json(const std::string& text);
};

// =====================================================================
//  Radially symmetric annulus potential
// =====================================================================

// u(x) = integral_0^|x| sqrt((s^2 - r^2)_+) ds. Vanishes on the disk of
// radius r; the Hessian determinant is 1 outside it. R is the outer radius
// of the annulus the potential is paired with (defaults to unit total area).
struct ModelPotential : ConvexPotential {
    double r = 0.0;
    double R = 0.0;

    explicit ModelPotential(double inner_radius);
    ModelPotential(double inner_radius, double outer_radius);

    double eval_radial(double rho) const;
    double gradient_magnitude(double rho) const;
    // (radial eigenvalue, tangential eigenvalue) for rho > r.
    std::pair<double, double> hessian_eigs(double rho) const;
    double image_radius() const;  // radius of the gradient image disk

    double eval(const Vec2& x) const override;
    Vec2 subgradient(const Vec2& x) const override;
    std::optional<double> hessian_norm(const Vec2& x) const override;
};

// Closed-form evaluation u(rho) for inner radius r; 0 for rho <= r.
double model_eval(double r, double rho);
// (radial, tangential) Hessian eigenvalues; throws for rho <= r where the
// Hessian degenerates.
std::pair<double, double> model_hessian(double r, double rho);

// =====================================================================
//  Quadratic fixture
// =====================================================================

// u = a x1^2/2 + x2^2/(2a); Hessian determinant 1 for every a.
struct QuadraticPotential : ConvexPotential {
    double a = 1.0;

    explicit QuadraticPotential(double scale);

    double eval(const Vec2& x) const override;
    Vec2 subgradient(const Vec2& x) const override;
    std::optional<double> hessian_norm(const Vec2&) const override;
};

}  // namespace otlab
