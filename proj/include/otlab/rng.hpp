#pragma once

#include <cstdint>
#include <random>

#include "otlab/vec2.hpp"

namespace otlab {

// Deterministic uniform generator. Doubles are derived from raw mt19937_64
// output (not std distributions) so streams are identical on every platform.
struct Rng {
    std::mt19937_64 gen;

    explicit Rng(std::uint64_t seed) : gen(seed) {}

    double uniform() { return static_cast<double>(gen() >> 11) * 0x1.0p-53; }
    double uniform(double a, double b) { return a + (b - a) * uniform(); }
    Vec2 in_box(const Vec2& lo, const Vec2& hi) {
        return {uniform(lo.x, hi.x), uniform(lo.y, hi.y)};
    }
    std::size_t index(std::size_t n) { return static_cast<std::size_t>(gen() % n); }
};

}  // namespace otlab
