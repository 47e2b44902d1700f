#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "infobs/geometry.hpp"
#include "infobs/solver_inf.hpp"
#include "infobs/solver_p.hpp"

namespace infobs {

inline constexpr const char* kVersion = "0.1.0";

/// A named, fully specified experiment.  Loaded from JSON (missing keys keep
/// the experiment's defaults) and overridable by CLI flags; the resolved
/// configuration is echoed into the manifest together with its hash, so a run
/// is reproducible from its artifacts alone.
struct ExperimentConfig {
    std::string experiment = "radial_profile";
    // canonical setup: ball of radius 2, parabolic cap obstacle, zero data
    DomainSpec domain = Disk{{0.0, 0.0}, 2.0};
    AnalyticSpec obstacle = SphericalCap{{0.0, 0.0}, 1.0};
    AnalyticSpec boundary = ConstantFn{0.0};
    double spacing = 0.05;
    std::vector<double> spacings;  // refinement ladder (coarse to fine)
    std::vector<double> p_values{5.0, 10.0, 20.0, 40.0, 80.0};
    std::uint64_t seed = 20260814;
    std::string out_dir = "out";
    InfSolveOptions inf;
    PSolveOptions popt;
};

/// experiment names: radial_profile, radial_solve, p_sweep, cones_radial,
/// cones_dumbbell, growth_suite, density_suite, full_report
ExperimentConfig default_config(const std::string& experiment);
ExperimentConfig config_from_json_file(const std::string& path);

struct RunResult {
    bool pass = true;
    std::string manifest_path;
    std::vector<std::string> failed_gates;
};

/// Execute the configured experiment: writes CSV/JSON artifacts plus
/// manifest.json (file hashes, config hash, gate outcomes, timings) into
/// out_dir.  pass == false when any gated check fails; artifacts are kept.
RunResult run_experiment(const ExperimentConfig& cfg);

/// Offline analysis of persisted artifacts (grid sidecar + solution/obstacle
/// CSVs): growth-exponent fits and plot-ready log-log data at free-boundary
/// cells, density table, and measured regularity assumptions.
struct AnalyzeConfig {
    std::string grid_path;
    std::string solution_path;
    std::string obstacle_path;
    std::string out_dir = "out/analysis";
    double eps_c = 0.0;  // contact tolerance; <= 0 means exact contact (1e-9 scale)
    double r_min = 0.0;  // growth-fit radii; <= 0 picks 5*spacing
    double r_max = 0.0;  // <= 0 picks per-cell half distance to the boundary, capped at 0.5
    std::vector<double> rhos{0.1, 0.2, 0.3};
    double stencil_radius = 0.0;  // diagnostic operator; <= 0 picks 3*spacing
};

RunResult run_analyze(const AnalyzeConfig& cfg);

}  // namespace infobs
