#include <cstdio>
#include <exception>
#include <string>

#include <CLI11.hpp>

#include "otlab/runio.hpp"

using namespace otlab;

int main(int argc, char** argv) {
    CLI::App app{"otlab: optimal transport potentials on planar domains with convex holes"};
    app.require_subcommand(1);

    int threads = 0;
    app.add_option("--threads", threads, "worker threads (0 = hardware)");

    Overrides ov;
    auto add_overrides = [&](CLI::App* sub) {
        sub->add_option("--n-seeds", [&ov](const CLI::results_t& r) {
            ov.n_seeds = std::stoi(r[0]); return true; }, "override solver.n_seeds");
        sub->add_option("--tol", [&ov](const CLI::results_t& r) {
            ov.tol = std::stod(r[0]); return true; }, "override solver.tol");
        sub->add_option("--max-iter", [&ov](const CLI::results_t& r) {
            ov.max_iter = std::stoi(r[0]); return true; }, "override solver.max_iter");
        sub->add_option("--rng-seed", [&ov](const CLI::results_t& r) {
            ov.rng_seed = std::stoull(r[0]); return true; }, "override solver.rng_seed");
        sub->add_option("--grid-level", [&ov](const CLI::results_t& r) {
            ov.grid_level = std::stoi(r[0]); return true; }, "override analysis.grid_level");
    };

    std::string config_path, out_root = "out", potential_path, run_dir;

    CLI::App* solve = app.add_subcommand("solve", "solve the dual weights for a config");
    solve->add_option("config", config_path, "config JSON")->required();
    solve->add_option("-o,--out", out_root, "output root directory");
    add_overrides(solve);

    CLI::App* analyze = app.add_subcommand("analyze", "section sweep and estimate reports");
    analyze->add_option("config", config_path, "config JSON")->required();
    analyze->add_option("-o,--out", out_root, "output root directory");
    analyze->add_option("--potential", potential_path, "potential JSON (defaults to the run dir)");
    add_overrides(analyze);

    double oracle_r = 0.3;
    AnalysisConfig oracle_an;
    oracle_an.grid_level = 10;
    oracle_an.levels = 7;
    oracle_an.p_values = {1.5, 1.9, 2.0};
    oracle_an.d_band_lo = 1e-4;
    oracle_an.d_band_hi = 1e-2;
    CLI::App* oracle = app.add_subcommand("oracle", "run the analytic annulus pipeline");
    oracle->add_option("-r,--inner-radius", oracle_r, "annulus inner radius");
    oracle->add_option("-o,--out", out_root, "output root directory");
    oracle->add_option("--grid-level", oracle_an.grid_level, "deepest refinement level");
    oracle->add_option("--levels", oracle_an.levels, "refinement series length");

    CLI::App* verify = app.add_subcommand("verify", "check run artifacts against the manifest");
    verify->add_option("run_dir", run_dir, "run directory")->required();

    std::string fixture = "glued", plt_out;
    int plt_grid = 129;
    double plt_shear = 8.0;
    CLI::App* pltc = app.add_subcommand("plt", "partial Legendre residuals on a fixture");
    pltc->add_option("fixture", fixture, "quadratic | glued | sheared");
    pltc->add_option("--grid", plt_grid, "grid nodes per side");
    pltc->add_option("--shear", plt_shear, "shear for the sheared fixture");
    pltc->add_option("-o,--out", plt_out, "output JSON path (stdout when empty)");

    CLI::App* report = app.add_subcommand("report", "re-emit report summary and plots");
    report->add_option("run_dir", run_dir, "run directory")->required();

    CLI11_PARSE(app, argc, argv);
    if (threads > 0) ov.threads = threads;
    oracle_an.threads = threads;

    try {
        if (solve->parsed()) return cmd_solve(config_path, out_root, ov);
        if (analyze->parsed()) return cmd_analyze(config_path, out_root, ov, potential_path);
        if (oracle->parsed()) return cmd_oracle(oracle_r, out_root, oracle_an);
        if (verify->parsed()) return cmd_verify(run_dir);
        if (pltc->parsed()) return cmd_plt(fixture, plt_grid, plt_shear, plt_out);
        if (report->parsed()) return cmd_report(run_dir);
    } catch (const SchemaError& e) {
        std::fprintf(stderr, "config error at %s\n", e.what());
        return kExitSchema;
    } catch (const SolverFailure& e) {
        std::fprintf(stderr, "solver error: %s\n", e.what());
        return kExitSolver;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
