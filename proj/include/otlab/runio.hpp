#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "otlab/estimates.hpp"
#include "otlab/geometry.hpp"
#include "otlab/sdot.hpp"
#include "otlab/sections.hpp"

namespace otlab {

// Exit codes shared by the CLI and the command functions.
inline constexpr int kExitOk = 0;
inline constexpr int kExitSchema = 2;
inline constexpr int kExitSolver = 3;
inline constexpr int kExitVerify = 4;

inline constexpr const char* kToolVersion = "0.1.0";

struct SolverConfig {
    int n_seeds = 1024;
    double tol = 1e-7;
    int max_iter = 50;
    std::uint64_t rng_seed = 1;
};

struct AnalysisConfig {
    std::vector<double> heights{1e-4, 1e-3};
    int grid_level = 8;
    int levels = 3;
    std::vector<double> p_values{1.5, 2.0};
    double d_band_lo = 1e-3;
    double d_band_hi = 1e-2;
    ClassifierThresholds thresholds;
    int threads = 0;
    int max_field_samples = 4000;  // cap for section-based proxy fields
};

struct ExperimentConfig {
    HoledDomain domain;
    ConvexPolygon target;
    SolverConfig solver;
    AnalysisConfig analysis;
};

// Flag overrides; flags win over the config file.
struct Overrides {
    std::optional<int> n_seeds;
    std::optional<double> tol;
    std::optional<int> max_iter;
    std::optional<std::uint64_t> rng_seed;
    std::optional<int> grid_level;
    std::optional<int> threads;
};

// Parses and validates; throws SchemaError with the offending field path.
ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig load_config(const std::string& path, std::string* raw_bytes = nullptr);
void apply_overrides(ExperimentConfig* cfg, const Overrides& ov);

std::uint64_t fnv1a64(const std::string& bytes);
std::string hash_hex(std::uint64_t h);

// Run directory for a config file: out_root/<hex of the config byte hash>.
std::string run_dir_for(const std::string& config_bytes, const std::string& out_root);

// Commands (the CLI is a thin wrapper around these).
int cmd_solve(const std::string& config_path, const std::string& out_root,
              const Overrides& ov = {});
int cmd_analyze(const std::string& config_path, const std::string& out_root,
                const Overrides& ov = {}, const std::string& potential_path = "");
int cmd_oracle(double r, const std::string& out_dir, const AnalysisConfig& analysis);
int cmd_verify(const std::string& run_dir);
int cmd_plt(const std::string& fixture, int grid_n, double shear,
            const std::string& out_path);
int cmd_report(const std::string& run_dir);

// Shared helpers (used by tests and the acceptance suite).
std::string format_double(double v);                 // shortest faithful decimal
void write_file(const std::string& path, const std::string& content);
std::string read_file(const std::string& path);
void write_manifest(const std::string& run_dir, const std::string& config_bytes,
                    const std::vector<std::string>& files);

struct SectionsRow {
    Vec2 point;
    double d = 0.0, h_bar = 0.0, lambda = 0.0, Lambda = 0.0, eta = 0.0;
    double exterior_fraction = 0.0, l_ratio = 0.0;
    SectionCase case_label = SectionCase::Bounded;
    double K_engulf = 0.0;
};

// Per-point section sweep around the holes (log-spaced distances within the
// analysis band, fixed angle fan). Deterministic, parallel by index.
std::vector<SectionsRow> section_sweep(const ConvexPotential& u, const HoledDomain& dom,
                                       const AnalysisConfig& cfg, int n_angles = 16,
                                       int n_dists = 8);
std::string sections_csv(const std::vector<SectionsRow>& rows);

// SVG log-log scatter of (d, proxy) with the envelope and the fitted line.
std::string blowup_svg(const std::vector<FieldSample>& samples, const SlopeFit& fit,
                       double d_lo, double d_hi);

}  // namespace otlab
