#include "otlab/runio.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "otlab/legendre.hpp"
#include "otlab/parallel.hpp"

namespace otlab {

namespace fs = std::filesystem;
using nlohmann::json;

// =====================================================================
//  Small helpers
// =====================================================================

std::string format_double(double v) {
    char buf[40];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

void write_file(const std::string& path, const std::string& content) {
    fs::create_directories(fs::path(path).parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path);
    out << content;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::uint64_t fnv1a64(const std::string& bytes) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::string hash_hex(std::uint64_t h) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::string run_dir_for(const std::string& config_bytes, const std::string& out_root) {
    return out_root + "/" + hash_hex(fnv1a64(config_bytes));
}

// =====================================================================
//  Config parsing
// =====================================================================

namespace {

double get_number(const json& j, const std::string& path) {
    if (!j.is_number()) throw SchemaError(path, "expected a number");
    return j.get<double>();
}

Vec2 get_point(const json& j, const std::string& path) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
        throw SchemaError(path, "expected [x, y]");
    return {j[0].get<double>(), j[1].get<double>()};
}

ConvexPolygon parse_shape(const json& j, const std::string& path, double default_area) {
    if (!j.is_object() || !j.contains("type"))
        throw SchemaError(path + ".type", "missing shape type");
    std::string type = j["type"].get<std::string>();
    int n = j.value("vertices_count", 256);
    if (type == "disk") {
        Vec2 c = j.contains("center") ? get_point(j["center"], path + ".center") : Vec2{};
        double radius;
        if (j.contains("radius")) {
            radius = get_number(j["radius"], path + ".radius");
        } else {
            double area = j.contains("area") ? get_number(j["area"], path + ".area")
                                             : default_area;
            // circumradius making the n-gon carry the requested area
            radius = std::sqrt(2.0 * area / (n * std::sin(2.0 * 3.14159265358979323846 / n)));
        }
        if (!(radius > 0.0)) throw SchemaError(path + ".radius", "must be positive");
        return regular_polygon(c, radius, n);
    }
    if (type == "polygon") {
        if (!j.contains("vertices") || !j["vertices"].is_array())
            throw SchemaError(path + ".vertices", "expected an array of points");
        ConvexPolygon p;
        for (std::size_t i = 0; i < j["vertices"].size(); ++i)
            p.v.push_back(get_point(j["vertices"][i],
                                    path + ".vertices[" + std::to_string(i) + "]"));
        p.ensure_ccw();
        try {
            p.validate();
        } catch (const DegeneratePolygon& e) {
            throw SchemaError(path + ".vertices", e.what());
        }
        return p;
    }
    throw SchemaError(path + ".type", "unknown shape type '" + type + "'");
}

HoledDomain parse_domain(const json& j) {
    if (!j.is_object()) throw SchemaError("domain", "expected an object");
    if (!j.contains("outer")) throw SchemaError("domain.outer", "missing");
    if (!j.contains("delta")) throw SchemaError("domain.delta", "missing");
    double delta = get_number(j["delta"], "domain.delta");
    if (!(delta > 0.0)) throw SchemaError("domain.delta", "must be positive");

    std::vector<ConvexHole> holes;
    if (j.contains("holes")) {
        if (!j["holes"].is_array()) throw SchemaError("domain.holes", "expected an array");
        for (std::size_t i = 0; i < j["holes"].size(); ++i) {
            const json& h = j["holes"][i];
            std::string path = "domain.holes[" + std::to_string(i) + "]";
            if (!h.is_object() || !h.contains("type"))
                throw SchemaError(path + ".type", "missing hole type");
            std::string type = h["type"].get<std::string>();
            int n = h.value("vertices_count", 256);
            if (type == "disk") {
                Vec2 c = get_point(h.at("center"), path + ".center");
                double r = get_number(h.at("radius"), path + ".radius");
                holes.push_back(ConvexHole::disk(c, r, n));
            } else if (type == "ellipse") {
                Vec2 c = get_point(h.at("center"), path + ".center");
                if (!h.contains("semi_axes"))
                    throw SchemaError(path + ".semi_axes", "missing");
                Vec2 ax = get_point(h["semi_axes"], path + ".semi_axes");
                double ang = h.value("angle", 0.0);
                holes.push_back(ConvexHole::ellipse(c, ax.x, ax.y, ang, n));
            } else {
                throw SchemaError(path + ".type", "unknown hole type '" + type + "'");
            }
        }
    }

    const json& outer = j["outer"];
    try {
        if (outer.is_object() && outer.value("type", "") == "disk" &&
            outer.contains("radius")) {
            Vec2 c = outer.contains("center") ? get_point(outer["center"], "domain.outer.center")
                                              : Vec2{};
            double r = get_number(outer["radius"], "domain.outer.radius");
            return HoledDomain::make_disk(c, r, std::move(holes), delta,
                                          outer.value("vertices_count", 256));
        }
        ConvexPolygon op = parse_shape(outer, "domain.outer", 1.0);
        return HoledDomain::make(std::move(op), std::move(holes), delta);
    } catch (const InvalidParameter& e) {
        throw SchemaError("domain", e.what());
    }
}

ClassifierThresholds parse_thresholds(const json& j) {
    ClassifierThresholds t;
    if (j.is_null()) return t;
    if (!j.is_object()) throw SchemaError("analysis.thresholds", "expected an object");
    t.eps1 = j.value("eps1", t.eps1);
    t.eps2 = j.value("eps2", t.eps2);
    t.M1 = j.value("M1", t.M1);
    t.M2 = j.value("M2", t.M2);
    t.eta_floor = j.value("eta_floor", t.eta_floor);
    if (!(t.eps1 > 0.0)) throw SchemaError("analysis.thresholds.eps1", "must be positive");
    if (!(t.eps2 > 0.0)) throw SchemaError("analysis.thresholds.eps2", "must be positive");
    if (!(t.M1 > 1.0)) throw SchemaError("analysis.thresholds.M1", "must exceed 1");
    if (!(t.M2 > 1.0)) throw SchemaError("analysis.thresholds.M2", "must exceed 1");
    if (!(t.eta_floor >= 0.0)) throw SchemaError("analysis.thresholds.eta_floor", "must be >= 0");
    return t;
}

}  // namespace

ExperimentConfig parse_config(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::exception& e) {
        throw SchemaError("(root)", std::string("invalid JSON: ") + e.what());
    }
    if (!j.is_object()) throw SchemaError("(root)", "expected an object");
    if (!j.contains("domain")) throw SchemaError("domain", "missing");
    if (!j.contains("target")) throw SchemaError("target", "missing");

    ExperimentConfig cfg;
    cfg.domain = parse_domain(j["domain"]);
    cfg.target = parse_shape(j["target"], "target", 1.0);

    if (j.contains("solver")) {
        const json& s = j["solver"];
        if (!s.is_object()) throw SchemaError("solver", "expected an object");
        cfg.solver.n_seeds = s.value("n_seeds", cfg.solver.n_seeds);
        cfg.solver.tol = s.value("tol", cfg.solver.tol);
        cfg.solver.max_iter = s.value("max_iter", cfg.solver.max_iter);
        cfg.solver.rng_seed = s.value("rng_seed", cfg.solver.rng_seed);
        if (cfg.solver.n_seeds < 1) throw SchemaError("solver.n_seeds", "must be >= 1");
        if (!(cfg.solver.tol > 0.0)) throw SchemaError("solver.tol", "must be positive");
        if (cfg.solver.max_iter < 1) throw SchemaError("solver.max_iter", "must be >= 1");
    }
    if (j.contains("analysis")) {
        const json& a = j["analysis"];
        if (!a.is_object()) throw SchemaError("analysis", "expected an object");
        AnalysisConfig& an = cfg.analysis;
        if (a.contains("heights")) {
            an.heights = a["heights"].get<std::vector<double>>();
            for (double h : an.heights)
                if (!(h > 0.0) || h >= kHeightCap)
                    throw SchemaError("analysis.heights",
                                      "heights must lie in (0, " +
                                          format_double(kHeightCap) + ")");
        }
        an.grid_level = a.value("grid_level", an.grid_level);
        an.levels = a.value("levels", an.levels);
        if (a.contains("p_values")) an.p_values = a["p_values"].get<std::vector<double>>();
        if (a.contains("d_band")) {
            const json& b = a["d_band"];
            if (!b.is_array() || b.size() != 2)
                throw SchemaError("analysis.d_band", "expected [lo, hi]");
            an.d_band_lo = b[0].get<double>();
            an.d_band_hi = b[1].get<double>();
            if (!(an.d_band_lo > 0.0) || !(an.d_band_hi > an.d_band_lo))
                throw SchemaError("analysis.d_band", "need 0 < lo < hi");
        }
        an.thresholds = parse_thresholds(a.contains("thresholds") ? a["thresholds"] : json());
        an.threads = a.value("threads", an.threads);
        an.max_field_samples = a.value("max_field_samples", an.max_field_samples);
        if (an.grid_level < 0 || an.grid_level > 40)
            throw SchemaError("analysis.grid_level", "out of range");
        if (an.levels < 1 || an.levels > an.grid_level + 1)
            throw SchemaError("analysis.levels", "out of range");
    }
    return cfg;
}

ExperimentConfig load_config(const std::string& path, std::string* raw_bytes) {
    std::string bytes;
    try {
        bytes = read_file(path);
    } catch (const Error& e) {
        throw SchemaError("(file)", e.what());
    }
    if (raw_bytes) *raw_bytes = bytes;
    return parse_config(bytes);
}

void apply_overrides(ExperimentConfig* cfg, const Overrides& ov) {
    if (ov.n_seeds) cfg->solver.n_seeds = *ov.n_seeds;
    if (ov.tol) cfg->solver.tol = *ov.tol;
    if (ov.max_iter) cfg->solver.max_iter = *ov.max_iter;
    if (ov.rng_seed) cfg->solver.rng_seed = *ov.rng_seed;
    if (ov.grid_level) cfg->analysis.grid_level = *ov.grid_level;
    if (ov.threads) cfg->analysis.threads = *ov.threads;
}

namespace {

std::string override_tag(const Overrides& ov) {
    std::string tag;
    auto add = [&](const char* k, const std::string& v) { tag += std::string("|") + k + "=" + v; };
    if (ov.n_seeds) add("n", std::to_string(*ov.n_seeds));
    if (ov.tol) add("tol", format_double(*ov.tol));
    if (ov.max_iter) add("it", std::to_string(*ov.max_iter));
    if (ov.rng_seed) add("seed", std::to_string(*ov.rng_seed));
    if (ov.grid_level) add("lvl", std::to_string(*ov.grid_level));
    return tag;  // threads deliberately excluded: results must not depend on them
}

}  // namespace

// =====================================================================
//  Manifest
// =====================================================================

void write_manifest(const std::string& run_dir, const std::string& config_bytes,
                    const std::vector<std::string>& files) {
    json m;
    m["tool"] = "otlab";
    m["version"] = kToolVersion;
    m["config_hash"] = hash_hex(fnv1a64(config_bytes));
    json f = json::object();
    std::vector<std::string> sorted = files;
    std::sort(sorted.begin(), sorted.end());
    for (const std::string& name : sorted)
        f[name] = hash_hex(fnv1a64(read_file(run_dir + "/" + name)));
    m["files"] = f;
    write_file(run_dir + "/manifest.json", m.dump(2) + "\n");
}

// =====================================================================
//  Section sweep and CSV
// =====================================================================

std::vector<SectionsRow> section_sweep(const ConvexPotential& u, const HoledDomain& dom,
                                       const AnalysisConfig& cfg, int n_angles,
                                       int n_dists) {
    std::vector<Vec2> points;
    for (const ConvexHole& hole : dom.holes) {
        for (int k = 0; k < n_angles; ++k) {
            double th = 2.0 * 3.14159265358979323846 * k / n_angles;
            Vec2 probe = hole.center +
                         (2.0 * std::max(hole.a, hole.b)) * Vec2{std::cos(th), std::sin(th)};
            Vec2 q = hole.project(probe);
            Vec2 tangent, normal;
            hole.tangent_frame(q, &tangent, &normal);
            for (int m = 0; m < n_dists; ++m) {
                double t = static_cast<double>(m) / std::max(n_dists - 1, 1);
                double d = cfg.d_band_lo * std::pow(cfg.d_band_hi / cfg.d_band_lo, t);
                Vec2 x = q + d * normal;
                if (dom.contains(x, 1e-12)) points.push_back(x);
            }
        }
    }
    std::vector<SectionsRow> rows(points.size());
    parallel_for(points.size(), [&](std::size_t i) {
        SectionsRow row;
        row.point = points[i];
        row.d = dom.distance_or_zero(points[i]);
        try {
            MaxHeightResult mh = max_height(u, dom, points[i]);
            row.h_bar = mh.height;
            row.lambda = mh.section.lambda();
            row.Lambda = mh.section.Lambda();
            row.eta = mh.section.eccentricity();
            if (mh.contact) {
                SectionOptions o;
                DiscreteWorkspace wsb;
                if (u.is_discrete()) {
                    wsb = DiscreteWorkspace::build(static_cast<const DiscretePotential&>(u),
                                                   *mh.contact);
                    o.workspace = &wsb;
                }
                Section bsec = centered_section(u, *mh.contact, mh.height, o);
                SectionDiagnostics diag = diagnostics(bsec, dom);
                row.case_label = classify(diag, cfg.thresholds);
                row.exterior_fraction = diag.exterior_fraction;
                row.l_ratio = diag.tangent_length_ratio;
                JohnBox box = bsec.box.recentered(*mh.contact);
                double K = 1.0;
                for (const Vec2& v : mh.section.poly.v) K = std::max(K, box.box_norm(v));
                row.K_engulf = K;
            } else {
                SectionDiagnostics diag = diagnostics(mh.section, dom);
                row.case_label = classify(diag, cfg.thresholds);
                row.exterior_fraction = diag.exterior_fraction;
                row.l_ratio = diag.tangent_length_ratio;
                row.K_engulf = 0.0;
            }
        } catch (const Error&) {
            row.h_bar = 0.0;  // row kept; failure marked by zero height
        }
        rows[i] = row;
    }, cfg.threads);
    return rows;
}

std::string sections_csv(const std::vector<SectionsRow>& rows) {
    std::string out =
        "x,y,d,h_bar,lambda,Lambda,eta,exterior_fraction,l_ratio,case,K_engulf\n";
    for (const SectionsRow& r : rows) {
        out += format_double(r.point.x) + "," + format_double(r.point.y) + "," +
               format_double(r.d) + "," + format_double(r.h_bar) + "," +
               format_double(r.lambda) + "," + format_double(r.Lambda) + "," +
               format_double(r.eta) + "," + format_double(r.exterior_fraction) + "," +
               format_double(r.l_ratio) + "," + to_string(r.case_label) + "," +
               format_double(r.K_engulf) + "\n";
    }
    return out;
}

// =====================================================================
//  SVG plot
// =====================================================================

std::string blowup_svg(const std::vector<FieldSample>& samples, const SlopeFit& fit,
                       double d_lo, double d_hi) {
    const int W = 640, H = 480, M = 50;
    double lx0 = std::log10(d_lo), lx1 = std::log10(d_hi);
    double ly0 = 1e300, ly1 = -1e300;
    for (const FieldSample& s : samples) {
        if (s.d < d_lo || s.d > d_hi || s.proxy <= 0.0) continue;
        double ly = std::log10(s.proxy);
        ly0 = std::min(ly0, ly);
        ly1 = std::max(ly1, ly);
    }
    if (ly0 > ly1) {
        ly0 = 0.0;
        ly1 = 1.0;
    }
    double pad = 0.05 * (ly1 - ly0 + 1e-9);
    ly0 -= pad;
    ly1 += pad;
    auto px = [&](double lx) { return M + (lx - lx0) / (lx1 - lx0) * (W - 2 * M); };
    auto py = [&](double ly) { return H - M - (ly - ly0) / (ly1 - ly0) * (H - 2 * M); };

    std::string svg = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" +
                      std::to_string(W) + "\" height=\"" + std::to_string(H) + "\">\n";
    svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    svg += "<text x=\"" + std::to_string(W / 2) + "\" y=\"" + std::to_string(H - 10) +
           "\" text-anchor=\"middle\" font-size=\"12\">log10 d</text>\n";
    svg += "<text x=\"14\" y=\"" + std::to_string(H / 2) +
           "\" text-anchor=\"middle\" font-size=\"12\" transform=\"rotate(-90 14 " +
           std::to_string(H / 2) + ")\">log10 proxy</text>\n";

    std::size_t step = std::max<std::size_t>(1, samples.size() / 20000);
    for (std::size_t i = 0; i < samples.size(); i += step) {
        const FieldSample& s = samples[i];
        if (s.d < d_lo || s.d > d_hi || s.proxy <= 0.0) continue;
        svg += "<circle cx=\"" + format_double(px(std::log10(s.d))) + "\" cy=\"" +
               format_double(py(std::log10(s.proxy))) +
               "\" r=\"1.2\" fill=\"steelblue\" fill-opacity=\"0.35\"/>\n";
    }

    // envelope: max proxy per log-d bin
    const int n_bins = 20;
    std::vector<double> env(n_bins, 0.0);
    for (const FieldSample& s : samples) {
        if (s.d < d_lo || s.d > d_hi) continue;
        int b = static_cast<int>((std::log(s.d) - std::log(d_lo)) /
                                 (std::log(d_hi) - std::log(d_lo)) * n_bins);
        b = std::clamp(b, 0, n_bins - 1);
        env[b] = std::max(env[b], s.proxy);
    }
    std::string pts;
    double lnw = (std::log(d_hi) - std::log(d_lo)) / n_bins;
    for (int b = 0; b < n_bins; ++b) {
        if (env[b] <= 0.0) continue;
        double lx = (std::log(d_lo) + (b + 0.5) * lnw) / std::log(10.0);
        pts += format_double(px(lx)) + "," + format_double(py(std::log10(env[b]))) + " ";
    }
    svg += "<polyline points=\"" + pts +
           "\" fill=\"none\" stroke=\"crimson\" stroke-width=\"1.5\"/>\n";

    // fitted line through the plot midpoint
    double mid_lx = 0.5 * (lx0 + lx1);
    double mid_ly = 0.5 * (ly0 + ly1);
    double slope10 = fit.slope;  // same slope in any log base
    svg += "<line x1=\"" + format_double(px(lx0)) + "\" y1=\"" +
           format_double(py(mid_ly + slope10 * (lx0 - mid_lx))) + "\" x2=\"" +
           format_double(px(lx1)) + "\" y2=\"" +
           format_double(py(mid_ly + slope10 * (lx1 - mid_lx))) +
           "\" stroke=\"black\" stroke-dasharray=\"5 3\"/>\n";
    svg += "<text x=\"" + std::to_string(W - M) + "\" y=\"" + std::to_string(M) +
           "\" text-anchor=\"end\" font-size=\"12\">slope " + format_double(fit.slope) +
           "</text>\n";
    svg += "</svg>\n";
    return svg;
}

// =====================================================================
//  Commands
// =====================================================================

namespace {

json report_json(const ConvexPotential& u, const HoledDomain& dom,
                 const AnalysisConfig& an, std::vector<FieldSample>* deepest_out) {
    FieldOptions fo;
    fo.threads = an.threads;
    if (u.is_discrete()) {
        fo.max_samples = an.max_field_samples;
        fo.d_min = std::max(fo.d_min,
                            10.0 / static_cast<double>(
                                       static_cast<const DiscretePotential&>(u).seeds.size()));
    }
    std::vector<std::vector<FieldSample>> levels;
    int l_first = an.grid_level - an.levels + 1;
    for (int l = l_first; l <= an.grid_level; ++l)
        levels.push_back(hessian_field(u, dom, l, fo));

    json rep;
    rep["p"] = json::array();
    rep["value"] = json::array();
    rep["series"] = json::array();
    for (double p : an.p_values) {
        NormReport nr = w2p_estimate(levels, p);
        rep["p"].push_back(p);
        rep["value"].push_back(nr.value);
        rep["series"].push_back(nr.refinement_series);
    }
    const std::vector<FieldSample>& deep = levels.back();
    SlopeFit fit = blowup_fit(deep, an.d_band_lo, an.d_band_hi);
    rep["slope"] = fit.slope;
    rep["ci"] = {fit.ci_lo, fit.ci_hi};
    rep["d_band"] = {an.d_band_lo, an.d_band_hi};
    rep["n_band"] = fit.n_band;

    // Section-law audit along the configured heights, at a hole-boundary point.
    if (!dom.holes.empty() && !an.heights.empty()) {
        const ConvexHole& hole = dom.holes.front();
        Vec2 y = hole.project(hole.center + Vec2{2.0 * std::max(hole.a, hole.b), 0.0});
        SectionOptions so;
        DiscreteWorkspace wsy;
        if (u.is_discrete()) {
            wsy = DiscreteWorkspace::build(static_cast<const DiscretePotential&>(u), y);
            so.workspace = &wsy;
        }
        std::vector<double> hs = an.heights;
        std::sort(hs.begin(), hs.end());
        json laws;
        laws["heights"] = hs;
        json ratios = json::array(), diams = json::array();
        for (double h : hs) {
            Section s = centered_section(u, y, h, so);
            so.warm_slope = s.slope;
            ratios.push_back(s.poly.area() / h);
            diams.push_back(s.poly.diameter());
        }
        laws["area_ratio"] = ratios;
        laws["diam"] = diams;
        rep["section_laws"] = laws;
    }

    if (deepest_out) *deepest_out = deep;
    return rep;
}

std::string samples_csv(const std::vector<FieldSample>& samples, double d_lo, double d_hi) {
    std::string out = "x,y,d,proxy,weight\n";
    std::size_t kept = 0;
    for (const FieldSample& s : samples) {
        if (s.d < 0.5 * d_lo || s.d > 2.0 * d_hi) continue;
        ++kept;
    }
    std::size_t step = std::max<std::size_t>(1, kept / 200000);
    std::size_t idx = 0;
    for (const FieldSample& s : samples) {
        if (s.d < 0.5 * d_lo || s.d > 2.0 * d_hi) continue;
        if (idx++ % step != 0) continue;
        out += format_double(s.point.x) + "," + format_double(s.point.y) + "," +
               format_double(s.d) + "," + format_double(s.proxy) + "," +
               format_double(s.weight) + "\n";
    }
    return out;
}

int analyze_into(const ConvexPotential& u, const HoledDomain& dom,
                 const AnalysisConfig& an, const std::string& run_dir,
                 std::vector<std::string>* files) {
    std::vector<SectionsRow> rows = section_sweep(u, dom, an);
    write_file(run_dir + "/sections.csv", sections_csv(rows));
    files->push_back("sections.csv");

    std::vector<FieldSample> deep;
    json rep = report_json(u, dom, an, &deep);
    write_file(run_dir + "/report.json", rep.dump(2) + "\n");
    files->push_back("report.json");

    write_file(run_dir + "/samples.csv", samples_csv(deep, an.d_band_lo, an.d_band_hi));
    files->push_back("samples.csv");

    SlopeFit fit;
    fit.slope = rep["slope"].get<double>();
    write_file(run_dir + "/plots/blowup.svg",
               blowup_svg(deep, fit, an.d_band_lo, an.d_band_hi));
    files->push_back("plots/blowup.svg");
    return kExitOk;
}

}  // namespace

int cmd_solve(const std::string& config_path, const std::string& out_root,
              const Overrides& ov) {
    std::string bytes;
    ExperimentConfig cfg = load_config(config_path, &bytes);
    apply_overrides(&cfg, ov);
    std::string key = bytes + override_tag(ov);
    std::string run_dir = run_dir_for(key, out_root);
    fs::create_directories(run_dir);
    write_file(run_dir + "/config.json", bytes);

    std::vector<Vec2> seeds = sample_target(cfg.target, cfg.solver.n_seeds, cfg.solver.rng_seed);
    SolveResult res;
    bool failed_hard = false;
    try {
        res = solve_weights(cfg.domain, seeds, cfg.solver.tol, cfg.solver.max_iter,
                            cfg.analysis.threads);
    } catch (const SolverFailure& e) {
        std::fprintf(stderr, "solve: %s\n", e.what());
        failed_hard = true;
    }

    std::vector<std::string> files{"config.json"};
    if (!failed_hard) {
        write_file(run_dir + "/potential.json", res.potential().to_json() + "\n");
        files.push_back("potential.json");

        json diag;
        diag["seeds"] = json::array();
        for (const Vec2& s : res.diagram.seeds) diag["seeds"].push_back({s.x, s.y});
        diag["weights"] = res.diagram.weights;
        diag["clipped_areas"] = res.diagram.clipped_areas;
        write_file(run_dir + "/diagram.json", diag.dump(2) + "\n");
        files.push_back("diagram.json");

        json rep;
        rep["iterations"] = res.report.iterations;
        rep["converged"] = res.report.converged;
        rep["max_area_residual"] = res.report.max_area_residual;
        rep["tol"] = cfg.solver.tol;
        rep["residual_history"] = res.report.residual_history;
        rep["damping_history"] = res.report.damping_history;
        write_file(run_dir + "/solve_report.json", rep.dump(2) + "\n");
        files.push_back("solve_report.json");
    }
    write_manifest(run_dir, bytes, files);
    std::printf("%s\n", run_dir.c_str());
    if (failed_hard || !res.report.converged) return kExitSolver;
    return kExitOk;
}

int cmd_analyze(const std::string& config_path, const std::string& out_root,
                const Overrides& ov, const std::string& potential_path) {
    std::string bytes;
    ExperimentConfig cfg = load_config(config_path, &bytes);
    apply_overrides(&cfg, ov);
    std::string key = bytes + override_tag(ov);
    std::string run_dir = run_dir_for(key, out_root);
    std::string ppath = potential_path.empty() ? run_dir + "/potential.json" : potential_path;
    DiscretePotential u = DiscretePotential::from_json(read_file(ppath));

    fs::create_directories(run_dir);
    write_file(run_dir + "/config.json", bytes);
    std::vector<std::string> files{"config.json"};
    for (const char* f : {"potential.json", "diagram.json", "solve_report.json"})
        if (fs::exists(run_dir + "/" + f)) files.push_back(f);

    AnalysisConfig an = cfg.analysis;
    // resolution floor for the section proxy on a discrete potential
    double d_floor = 10.0 / static_cast<double>(u.seeds.size());
    an.d_band_lo = std::max(an.d_band_lo, d_floor);
    if (!(an.d_band_hi > an.d_band_lo)) an.d_band_hi = 10.0 * an.d_band_lo;
    analyze_into(u, cfg.domain, an, run_dir, &files);
    write_manifest(run_dir, bytes, files);
    std::printf("%s\n", run_dir.c_str());
    return kExitOk;
}

int cmd_oracle(double r, const std::string& out_dir, const AnalysisConfig& analysis) {
    if (!(r > 0.0)) throw SchemaError("oracle.r", "inner radius must be positive");
    double R = std::sqrt(r * r + 1.0 / 3.14159265358979323846);
    double delta = std::min({0.8 * r, 0.8 * (R - r), 0.25});
    HoledDomain dom = HoledDomain::make_disk({0.0, 0.0}, R, {ConvexHole::disk({0.0, 0.0}, r)},
                                             delta);
    ModelPotential u(dom.holes[0].a, dom.outer_disk->second);

    std::string key = "oracle|r=" + format_double(r) + "|lvl=" +
                      std::to_string(analysis.grid_level) + "|levels=" +
                      std::to_string(analysis.levels);
    std::string run_dir = run_dir_for(key, out_dir);
    fs::create_directories(run_dir);
    json cfgj;
    cfgj["oracle"] = {{"r", r}, {"normalized_r", u.r}, {"normalized_R", u.R}};
    cfgj["analysis"] = {{"grid_level", analysis.grid_level},
                        {"levels", analysis.levels},
                        {"p_values", analysis.p_values},
                        {"d_band", {analysis.d_band_lo, analysis.d_band_hi}}};
    std::string bytes = cfgj.dump(2) + "\n";
    write_file(run_dir + "/config.json", bytes);
    std::vector<std::string> files{"config.json"};
    analyze_into(u, dom, analysis, run_dir, &files);
    write_manifest(run_dir, bytes, files);
    std::printf("%s\n", run_dir.c_str());
    return kExitOk;
}

int cmd_verify(const std::string& run_dir) {
    json m;
    try {
        m = json::parse(read_file(run_dir + "/manifest.json"));
    } catch (const std::exception& e) {
        std::fprintf(stderr, "verify: cannot load manifest: %s\n", e.what());
        return kExitVerify;
    }
    int failures = 0;
    for (auto it = m["files"].begin(); it != m["files"].end(); ++it) {
        std::string name = it.key();
        std::string want = it.value().get<std::string>();
        std::string got;
        try {
            got = hash_hex(fnv1a64(read_file(run_dir + "/" + name)));
        } catch (const Error&) {
            got = "(missing)";
        }
        bool ok = got == want;
        std::printf("[%s] %s\n", ok ? "PASS" : "FAIL", name.c_str());
        if (!ok) ++failures;
    }
    if (m.contains("config_hash")) {
        std::string want = m["config_hash"].get<std::string>();
        std::string got;
        try {
            got = hash_hex(fnv1a64(read_file(run_dir + "/config.json")));
        } catch (const Error&) {
            got = "(missing)";
        }
        bool ok = got == want;
        std::printf("[%s] config_hash\n", ok ? "PASS" : "FAIL");
        if (!ok) ++failures;
    }
    if (fs::exists(run_dir + "/solve_report.json")) {
        json rep = json::parse(read_file(run_dir + "/solve_report.json"));
        bool ok = rep.value("converged", false) &&
                  rep.value("max_area_residual", 1.0) <= rep.value("tol", 0.0);
        std::printf("[%s] solver residual\n", ok ? "PASS" : "FAIL");
        if (!ok) ++failures;
    }
    return failures == 0 ? kExitOk : kExitVerify;
}

int cmd_plt(const std::string& fixture, int grid_n, double shear,
            const std::string& out_path) {
    if (grid_n < 9) throw SchemaError("plt.grid", "grid too small");
    if (grid_n % 2 == 0) ++grid_n;  // keep x2 = 0 on the grid
    json out;
    out["fixture"] = fixture;
    out["grid"] = grid_n;
    if (fixture == "quadratic" || fixture == "glued") {
        auto f = fixture == "quadratic"
                     ? std::function<double(double, double)>(
                           [](double x, double y) { return 0.5 * (x * x + y * y); })
                     : std::function<double(double, double)>([](double x, double y) {
                           double yp = std::max(y, 0.0);
                           return 0.5 * x * x + 0.5 * yp * yp;
                       });
        GridFunction w = GridFunction::sample(f, -1, 1, -1, 1, grid_n, grid_n);
        PLTFunction ws = plt(w);
        PLTResiduals res = plt_residuals(ws);
        out["residuals"] = {{"upper_laplacian", res.upper_laplacian},
                            {"lower_linearity", res.lower_linearity},
                            {"flux_jump", res.flux_jump}};
    } else if (fixture == "sheared") {
        auto f = [shear](double x, double y) {
            double u = x + shear * y;
            return 0.5 * (u * u + y * y);
        };
        GridFunction w = GridFunction::sample(f, -1, 1, -1, 1, grid_n, grid_n);
        out["shear"] = shear;
        out["mixed_ratio"] = mixed_ratio(w, {-0.5, 0.5, -0.5, 0.5});
    } else {
        throw SchemaError("plt.fixture", "unknown fixture '" + fixture + "'");
    }
    std::string text = out.dump(2) + "\n";
    if (out_path.empty())
        std::printf("%s", text.c_str());
    else
        write_file(out_path, text);
    return kExitOk;
}

int cmd_report(const std::string& run_dir) {
    json rep;
    try {
        rep = json::parse(read_file(run_dir + "/report.json"));
    } catch (const std::exception& e) {
        std::fprintf(stderr, "report: cannot load report.json: %s\n", e.what());
        return kExitSchema;
    }
    std::printf("p values:");
    for (const auto& p : rep["p"]) std::printf(" %s", format_double(p.get<double>()).c_str());
    std::printf("\nvalues:  ");
    for (const auto& v : rep["value"]) std::printf(" %s", format_double(v.get<double>()).c_str());
    std::printf("\nslope: %s  ci: [%s, %s]\n",
                format_double(rep["slope"].get<double>()).c_str(),
                format_double(rep["ci"][0].get<double>()).c_str(),
                format_double(rep["ci"][1].get<double>()).c_str());

    // regenerate the scatter from the stored samples
    if (fs::exists(run_dir + "/samples.csv")) {
        std::vector<FieldSample> samples;
        std::istringstream in(read_file(run_dir + "/samples.csv"));
        std::string line;
        std::getline(in, line);  // header
        while (std::getline(in, line)) {
            FieldSample s;
            if (std::sscanf(line.c_str(), "%lf,%lf,%lf,%lf,%lf", &s.point.x, &s.point.y,
                            &s.d, &s.proxy, &s.weight) == 5)
                samples.push_back(s);
        }
        SlopeFit fit;
        fit.slope = rep["slope"].get<double>();
        double lo = rep["d_band"][0].get<double>(), hi = rep["d_band"][1].get<double>();
        write_file(run_dir + "/plots/blowup.svg", blowup_svg(samples, fit, lo, hi));
    }
    return kExitOk;
}

}  // namespace otlab
