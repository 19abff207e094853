#include "otlab/estimates.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "otlab/parallel.hpp"
#include "otlab/rng.hpp"
#include "otlab/sections.hpp"

namespace otlab {

namespace {

struct Cell {
    Vec2 center;
    double half = 0.0;    // half side length
    double boost = 1.0;   // weight multiplier from stratified thinning
};

// Collect graded leaves: split while the half-diagonal exceeds half the
// center's boundary distance (so kept leaves provably fit inside the
// domain), respecting the depth budget; drop cells below the coverage
// cutoff or fully outside.
void collect_leaves(const HoledDomain& dom, const Cell& c, int depth, int max_depth,
                    double d_cut, std::vector<Cell>* out) {
    double half_diag = c.half * std::sqrt(2.0);
    double sd = dom.signed_distance(c.center);
    if (sd < -half_diag) return;  // fully outside
    if (half_diag <= 0.5 * std::max(sd, 0.0)) {
        if (sd >= d_cut) out->push_back(c);
        return;
    }
    if (depth >= max_depth) {
        // unresolved boundary cell: keep only if certified inside and deep enough
        if (sd >= d_cut && half_diag <= 0.5 * sd) out->push_back(c);
        return;
    }
    double q = 0.5 * c.half;
    for (int sx = -1; sx <= 1; sx += 2)
        for (int sy = -1; sy <= 1; sy += 2)
            collect_leaves(dom, {c.center + Vec2{sx * q, sy * q}, q}, depth + 1,
                           max_depth, d_cut, out);
}

}  // namespace

std::vector<FieldSample> hessian_field(const ConvexPotential& u, const HoledDomain& dom,
                                       int grid_level, const FieldOptions& opts) {
    double d_cut = std::max(opts.d0 * std::pow(2.0, -grid_level), opts.d_min);
    Vec2 lo = dom.outer.bbox_min(), hi = dom.outer.bbox_max();
    Vec2 mid = 0.5 * (lo + hi);
    double half = 0.5 * std::max(hi.x - lo.x, hi.y - lo.y);

    // depth needed to resolve cells of size ~ d_cut/2 plus a margin
    int depth_for_cut =
        static_cast<int>(std::ceil(std::log2(std::max(2.0 * half / d_cut, 1.0)))) + 1;
    int max_depth = std::min(opts.base_depth + grid_level, depth_for_cut);

    std::vector<Cell> leaves;
    collect_leaves(dom, {mid, half}, 0, max_depth, d_cut, &leaves);

    if (opts.max_samples > 0 &&
        4 * leaves.size() > static_cast<std::size_t>(opts.max_samples)) {
        // Stratified thinning: keep every k-th leaf inside each log-distance
        // bin and scale the kept weights so each stratum's mass is preserved.
        const int n_strata = 32;
        double lo = std::log(d_cut), hi = std::log(d_cut);
        std::vector<double> ds(leaves.size());
        for (std::size_t i = 0; i < leaves.size(); ++i) {
            ds[i] = std::max(dom.distance_or_zero(leaves[i].center), d_cut);
            hi = std::max(hi, std::log(ds[i]));
        }
        hi += 1e-9;
        std::vector<std::vector<std::size_t>> strata(n_strata);
        for (std::size_t i = 0; i < leaves.size(); ++i) {
            int b = static_cast<int>((std::log(ds[i]) - lo) / (hi - lo) * n_strata);
            strata[std::clamp(b, 0, n_strata - 1)].push_back(i);
        }
        std::size_t budget = static_cast<std::size_t>(opts.max_samples) / 4;
        std::size_t per_stratum = std::max<std::size_t>(budget / n_strata, 8);
        std::vector<Cell> thinned;
        for (const auto& stratum : strata) {
            if (stratum.empty()) continue;
            std::size_t k = std::max<std::size_t>(1, stratum.size() / per_stratum);
            std::size_t kept = (stratum.size() + k - 1) / k;
            double boost = static_cast<double>(stratum.size()) / static_cast<double>(kept);
            for (std::size_t idx = 0; idx < stratum.size(); idx += k) {
                Cell c = leaves[stratum[idx]];
                c.boost = boost;
                thinned.push_back(c);
            }
        }
        leaves = std::move(thinned);
    }

    const bool analytic = !u.is_discrete();
    std::vector<std::vector<FieldSample>> per_leaf(leaves.size());
    parallel_for(leaves.size(), [&](std::size_t i) {
        const Cell& c = leaves[i];
        double q = 0.5 * c.half;
        double w = c.half * c.half * c.boost;  // quarter of the cell area
        for (int sx = -1; sx <= 1; sx += 2) {
            for (int sy = -1; sy <= 1; sy += 2) {
                Vec2 p = c.center + Vec2{sx * q, sy * q};
                double d = dom.distance_or_zero(p);
                if (d < d_cut) continue;
                FieldSample s;
                s.point = p;
                s.d = d;
                s.weight = w;
                if (analytic) {
                    auto hn = u.hessian_norm(p);
                    s.proxy = hn ? *hn : 1.0;
                } else {
                    s.proxy = hessian_proxy(u, dom, p, opts.cap);
                }
                per_leaf[i].push_back(s);
            }
        }
    }, opts.threads);

    std::vector<FieldSample> samples;
    for (auto& v : per_leaf)
        samples.insert(samples.end(), v.begin(), v.end());
    return samples;
}

double w2p_value(const std::vector<FieldSample>& samples, double p) {
    // Neumaier-compensated accumulation keeps the reduction order-exact.
    double sum = 0.0, comp = 0.0;
    for (const FieldSample& s : samples) {
        double term = std::pow(s.proxy, p) * s.weight;
        double t = sum + term;
        if (std::abs(sum) >= std::abs(term))
            comp += (sum - t) + term;
        else
            comp += (term - t) + sum;
        sum = t;
    }
    return sum + comp;
}

NormReport w2p_estimate(const std::vector<std::vector<FieldSample>>& levels, double p) {
    if (!(p >= 0.0)) throw InvalidParameter("w2p_estimate: p must be non-negative");
    NormReport rep;
    rep.p = p;
    for (const auto& level : levels) rep.refinement_series.push_back(w2p_value(level, p));
    rep.value = rep.refinement_series.empty() ? 0.0 : rep.refinement_series.back();
    return rep;
}

SlopeFit blowup_fit(const std::vector<FieldSample>& samples, double d_lo, double d_hi) {
    if (!(d_lo > 0.0) || !(d_hi > d_lo))
        throw InvalidParameter("blowup_fit: need 0 < d_lo < d_hi");
    const int n_bins = 20;
    std::vector<double> env(n_bins, 0.0);
    int in_band = 0;
    double log_lo = std::log(d_lo), log_hi = std::log(d_hi);
    for (const FieldSample& s : samples) {
        if (s.d < d_lo || s.d > d_hi) continue;
        ++in_band;
        int b = static_cast<int>((std::log(s.d) - log_lo) / (log_hi - log_lo) * n_bins);
        b = std::clamp(b, 0, n_bins - 1);
        env[b] = std::max(env[b], s.proxy);
    }
    if (in_band < 50)
        throw UnderSampled("blowup_fit: fewer than 50 samples in the distance band");

    std::vector<double> xs, ys;
    for (int b = 0; b < n_bins; ++b) {
        if (env[b] <= 0.0) continue;
        double mid = log_lo + (b + 0.5) / n_bins * (log_hi - log_lo);
        xs.push_back(mid);
        ys.push_back(std::log(env[b]));
    }
    const int m = static_cast<int>(xs.size());
    if (m < 3) throw UnderSampled("blowup_fit: too few populated envelope bins");

    double mx = 0.0, my = 0.0;
    for (int i = 0; i < m; ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= m;
    my /= m;
    double sxx = 0.0, sxy = 0.0;
    for (int i = 0; i < m; ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
    }
    double slope = sxy / sxx;
    double intercept = my - slope * mx;
    double sse = 0.0;
    for (int i = 0; i < m; ++i) {
        double r = ys[i] - (intercept + slope * xs[i]);
        sse += r * r;
    }
    double se = m > 2 ? std::sqrt(sse / (m - 2) / sxx) : 0.0;
    SlopeFit fit;
    fit.slope = slope;
    fit.ci_lo = slope - 1.96 * se;
    fit.ci_hi = slope + 1.96 * se;
    fit.n_band = in_band;
    fit.n_bins = m;
    return fit;
}

double holder_seminorm(const ConvexPotential& u, const std::vector<PointPair>& pairs,
                       double alpha) {
    double best = 0.0;
    for (const auto& [x, y] : pairs) {
        double sep = dist(x, y);
        if (sep <= 0.0) continue;
        double g = dist(u.subgradient(x), u.subgradient(y));
        best = std::max(best, g / std::pow(sep, alpha));
    }
    return best;
}

std::vector<PointPair> gradient_pair_set(const HoledDomain& dom, int count,
                                         std::uint64_t rng_seed) {
    Rng rng(rng_seed);
    std::vector<PointPair> pairs;
    pairs.reserve(count);
    Vec2 lo = dom.outer.bbox_min(), hi = dom.outer.bbox_max();

    auto random_inside = [&]() {
        for (int tries = 0; tries < 10000; ++tries) {
            Vec2 p = rng.in_box(lo, hi);
            if (dom.contains(p)) return p;
        }
        throw Error("gradient_pair_set: rejection sampling starved");
    };

    int n_chords = count / 2;
    while (static_cast<int>(pairs.size()) < n_chords) {
        Vec2 a = random_inside();
        Vec2 b = random_inside();
        if (dom.segment_inside(a, b, 32)) pairs.push_back({a, b});
    }

    // Boundary-straddling normal segments. Separations go down to
    // ~ count^-3 so that any exponent beyond 1/2 diverges under pair
    // refinement while 1/2 itself stays stable.
    if (!dom.holes.empty()) {
        double t_min = 1e-5 * std::pow(1e4 / std::max(count, 1), 3.0);
        double t_max = 0.05;
        while (static_cast<int>(pairs.size()) < count) {
            const ConvexHole& h = dom.holes[rng.index(dom.holes.size())];
            double th = rng.uniform(0.0, 2.0 * 3.14159265358979323846);
            Vec2 q = h.kind == ConvexHole::Kind::Disk
                         ? h.center + h.a * Vec2{std::cos(th), std::sin(th)}
                         : h.project(h.center + (std::max(h.a, h.b) * 2.0) *
                                                    Vec2{std::cos(th), std::sin(th)});
            Vec2 tangent, normal;
            h.tangent_frame(q, &tangent, &normal);
            double t = std::exp(rng.uniform(std::log(t_min), std::log(t_max)));
            Vec2 a = q + t * normal;
            Vec2 b = rng.uniform() < 0.5 ? q : q + 2.0 * t * normal;
            if (dom.contains(a, 1e-12) && dom.contains(b, 1e-9))
                pairs.push_back({a, b});
        }
    } else {
        while (static_cast<int>(pairs.size()) < count) {
            Vec2 a = random_inside();
            Vec2 b = random_inside();
            if (dom.segment_inside(a, b, 32)) pairs.push_back({a, b});
        }
    }
    return pairs;
}

}  // namespace otlab
