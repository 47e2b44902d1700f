#include <cstdio>
#include <exception>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "infobs/experiments.hpp"

namespace {

using infobs::AnalyzeConfig;
using infobs::ExperimentConfig;
using infobs::RunResult;

struct CommonFlags {
    std::string config;
    std::string out;
    double spacing = 0.0;
    std::uint64_t seed = 0;
    bool seed_set = false;
    bool jacobi = false;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
    cmd->add_option("-c,--config", f.config, "JSON config file (flags override its values)")
        ->check(CLI::ExistingFile);
    cmd->add_option("-o,--out", f.out, "output directory for artifacts and manifest");
    cmd->add_option("--spacing", f.spacing, "grid spacing")->check(CLI::PositiveNumber);
    cmd->add_option("--seed", f.seed, "seed for randomized artifacts")
        ->each([&f](const std::string&) { f.seed_set = true; });
    cmd->add_flag("--jacobi", f.jacobi, "plain simultaneous sweeps instead of alternating orders");
}

ExperimentConfig resolve(const std::string& experiment, const CommonFlags& f) {
    ExperimentConfig cfg = f.config.empty() ? infobs::default_config(experiment)
                                            : infobs::config_from_json_file(f.config);
    cfg.experiment = experiment;
    if (!f.out.empty()) cfg.out_dir = f.out;
    if (f.spacing > 0.0) {
        cfg.spacing = f.spacing;
        cfg.spacings.clear();
    }
    if (f.seed_set) cfg.seed = f.seed;
    if (f.jacobi) cfg.inf.gauss_seidel = false;
    return cfg;
}

int report_result(const RunResult& res) {
    if (res.pass) {
        std::printf("PASS  (manifest: %s)\n", res.manifest_path.c_str());
        return 0;
    }
    std::printf("FAIL  (manifest: %s)\n", res.manifest_path.c_str());
    for (const auto& g : res.failed_gates) std::printf("  failed gate: %s\n", g.c_str());
    return 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"numerical laboratory for the constrained infinity-Laplace problem"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(infobs::kVersion));

    CommonFlags radial_f, inf_f, p_f, sweep_f, cones_f, report_f;
    double p_value = 10.0;
    std::vector<double> sweep_ps;
    bool dumbbell = false;

    CLI::App* radial = app.add_subcommand(
        "radial", "closed-form radial profiles over a ladder of exponents");
    add_common(radial, radial_f);

    CLI::App* solve_inf = app.add_subcommand(
        "solve-inf", "relaxation solve of the constrained problem on a refinement ladder");
    add_common(solve_inf, inf_f);

    CLI::App* solve_p = app.add_subcommand(
        "solve-p", "energy-minimization solve at a single exponent");
    add_common(solve_p, p_f);
    solve_p->add_option("-p,--p", p_value, "energy exponent (2..120)")->check(CLI::PositiveNumber);

    CLI::App* p_sweep = app.add_subcommand(
        "p-sweep", "exponent sweep with contact-set comparison against the limit solve");
    add_common(p_sweep, sweep_f);
    p_sweep->add_option("-p,--p", sweep_ps, "exponents to sweep");

    CLI::App* cones = app.add_subcommand(
        "cones", "comparison-cone envelope against the relaxation solution");
    add_common(cones, cones_f);
    cones->add_flag("--dumbbell", dumbbell, "two balls joined by a thin tube, one-sided obstacle");

    CLI::App* analyze = app.add_subcommand(
        "analyze", "offline free-boundary analysis of persisted artifacts");
    AnalyzeConfig an;
    analyze->add_option("--grid", an.grid_path, "grid sidecar JSON")
        ->required()
        ->check(CLI::ExistingFile);
    analyze->add_option("--solution", an.solution_path, "solution CSV")
        ->required()
        ->check(CLI::ExistingFile);
    analyze->add_option("--obstacle", an.obstacle_path, "obstacle CSV")
        ->required()
        ->check(CLI::ExistingFile);
    analyze->add_option("-o,--out", an.out_dir, "output directory");
    analyze->add_option("--eps", an.eps_c, "contact tolerance (default: exact contact)");
    analyze->add_option("--rmin", an.r_min, "smallest growth-fit radius");
    analyze->add_option("--rmax", an.r_max, "largest growth-fit radius");
    analyze->add_option("--rho", an.rhos, "density ball radii");
    analyze->add_option("--stencil", an.stencil_radius, "diagnostic operator stencil radius");

    CLI::App* report = app.add_subcommand(
        "report", "run every experiment and aggregate the gate outcomes");
    add_common(report, report_f);

    CLI11_PARSE(app, argc, argv);

    try {
        if (*radial) return report_result(run_experiment(resolve("radial_profile", radial_f)));
        if (*solve_inf) return report_result(run_experiment(resolve("radial_solve", inf_f)));
        if (*solve_p) {
            ExperimentConfig cfg = resolve("p_sweep", p_f);
            if (solve_p->count("--p") || cfg.p_values.empty()) cfg.p_values = {p_value};
            if (cfg.p_values.size() > 1) cfg.p_values.resize(1);
            return report_result(run_experiment(cfg));
        }
        if (*p_sweep) {
            ExperimentConfig cfg = resolve("p_sweep", sweep_f);
            if (!sweep_ps.empty()) cfg.p_values = sweep_ps;
            return report_result(run_experiment(cfg));
        }
        if (*cones) {
            ExperimentConfig cfg =
                resolve(dumbbell ? "cones_dumbbell" : "cones_radial", cones_f);
            return report_result(run_experiment(cfg));
        }
        if (*analyze) return report_result(run_analyze(an));
        if (*report) return report_result(run_experiment(resolve("full_report", report_f)));
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 2;
}
