#pragma once

#include <cstdint>
#include <vector>

#include "infobs/geometry.hpp"

namespace infobs {

struct InfSolveOptions {
    double stencil_radius = 0.0;  // <= 0: 3 * spacing
    double sweep_tol = 0.0;       // <= 0: spacing^3
    long max_sweeps = 2'000'000;
    enum class Init { upper_constant, cone_envelope, custom } init = Init::upper_constant;
    const ScalarField* init_field = nullptr;  // required for Init::custom
    bool gauss_seidel = false;                // alternating-order sweeps; same fixed point
};

/// Clamped relaxation operator u(x) <- max(Psi(x), (max_S u + min_S u)/2) over a
/// wide stencil of lattice direction pairs.  Per node the two samples of a pair
/// and the node value are combined with interpolation toward a common radius
/// (the shortest sample distance at that node), which keeps every coefficient
/// nonnegative: the sweep map is monotone and averaging, so iterates started
/// from an upper bound decrease monotonically to the unique fixed point.
/// Rays that would leave the domain are cut at the exact ray/boundary
/// intersection and carry the Dirichlet value there.
class InfRelaxer {
public:
    InfRelaxer(const Grid& g, const ScalarField& psi, const AnalyticSpec& boundary,
               double stencil_radius);

    /// simultaneous update of all interior nodes; returns max |change|
    double jacobi(std::vector<double>& u, std::vector<double>& scratch) const;
    /// in-place update in one of four alternating orders (phase mod 4)
    double gauss_seidel(std::vector<double>& u, int phase) const;

    double relaxed_value(const std::vector<double>& u, std::int32_t c) const;

    const Grid& grid() const { return *g_; }
    double stencil_radius() const { return radius_; }
    /// true when some ray had to fall back to a stored node value (tabulated
    /// boundary data), losing the exact-intersection cut
    bool reduced_accuracy() const { return reduced_; }

private:
    struct Entry {
        std::int32_t idx;  // sampled node, or -1 for a fixed boundary cut
        double coef;       // interpolation weight toward the common radius
        double bval;       // Dirichlet value at the cut (idx == -1)
    };

    const Grid* g_;
    double radius_ = 0.0;
    bool reduced_ = false;
    std::vector<double> psi_;             // compact-indexed obstacle values
    std::vector<std::int32_t> interior_;  // compact ids, row-major order
    std::vector<std::int32_t> interior_colmajor_;
    std::vector<Entry> entries_;
    std::vector<std::uint32_t> off_;  // entries of interior_[k]: [off_[k], off_[k+1])

    double update_at(const std::vector<double>& u, std::size_t k) const;
};

struct InfSolveResult {
    ScalarField solution;
    long sweeps = 0;
    bool converged = false;     // last sweep changed no node by more than sweep_tol
    double final_change = 0.0;  // max |change| of the last sweep
    double est_gap = 0.0;       // geometric-ratio estimate of distance to the fixed point
    double stencil_radius = 0.0;
    double sweep_tol = 0.0;
    bool reduced_accuracy = false;
};

/// Solve the discrete obstacle problem: the smallest relaxation-invariant field
/// above the obstacle with the given boundary data.  Sweeps continue until both
/// the nodal change and the estimated remaining gap drop below sweep_tol.
InfSolveResult solve_obstacle_inf(const Grid& g, const AnalyticSpec& obstacle,
                                  const AnalyticSpec& boundary, const InfSolveOptions& opt = {});

/// One Jacobi relaxation pass over u (convenience wrapper for property tests).
double relax_jacobi_step(ScalarField& u, const ScalarField& psi, const AnalyticSpec& boundary,
                         double stencil_radius);

/// Contact mask {u - psi <= eps} over interior nodes; eps <= 0 picks 2*spacing^2.
Mask coincidence_set(const ScalarField& u, const ScalarField& psi, double eps = 0.0);

struct ResidualReport {
    double eps_c = 0.0;                    // contact threshold used
    double stencil_radius = 0.0;           // of the diagnostic operator
    int detached = 0;                      // full-stencil interior nodes with gap > eps_c
    int contact = 0;                       // full-stencil interior nodes with gap <= eps_c
    int truncated = 0;                     // interior nodes skipped (stencil not full)
    double max_harmonic_residual = 0.0;    // max |op(u)| over detached nodes
    double min_superharmonic_defect = 0.0; // min of -op(u) over all measured nodes
    double max_contact_overshoot = 0.0;    // max over contact nodes of op(u)_+
};

/// Complementarity diagnostics of a solution: the operator should vanish off the
/// contact set and be nonpositive everywhere (up to discretization).
ResidualReport residual_report(const ScalarField& u, const ScalarField& psi,
                               double stencil_radius, double eps = 0.0);

/// One-dimensional obstacle problem on a segment: values of the least concave
/// majorant of the obstacle samples that matches the endpoint data.  xs must be
/// strictly increasing and the endpoint data must dominate the obstacle there.
std::vector<double> solve_1d_obstacle(const std::vector<double>& xs,
                                      const std::vector<double>& psi, double left, double right);

/// Solve g(t) + g'(t) * (x_end - t) = f_end for t in [lo, hi] by bisection:
/// the point where the tangent line of g through the graph reaches the value
/// f_end at x_end.  Requires a sign change over the bracket.
double tangent_contact(const std::function<double(double)>& g,
                       const std::function<double(double)>& dg, double x_end, double f_end,
                       double lo, double hi, double tol = 1e-12);

}  // namespace infobs
