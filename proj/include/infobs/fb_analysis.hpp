#pragma once

#include <cstdint>
#include <vector>

#include "infobs/geometry.hpp"

namespace infobs {

/// Nodes of the mask with at least one 4-neighbor outside it (the discrete
/// edge of the coincidence set).  Empty or full masks yield an empty list
/// (with a stderr warning): they have no edge worth analyzing.
std::vector<std::int32_t> free_boundary_cells(const Mask& a);

/// In-mask nodes whose full 8-neighborhood is in-mask (discrete interior).
Mask mask_core(const Mask& a);

struct ExponentFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r_min = 0.0, r_max = 0.0;
    double rms = 0.0;  // residual of the log-log fit
    int samples = 0;
};

/// Least-squares slope of log sup_{B_r(x0)} |u - psi| against log r over
/// log-spaced radii.  Each ball's abscissa is the realized radius (the largest
/// node distance inside the ball), which removes lattice quantization bias
/// from the fit.  Radii where the sup vanishes are dropped; fewer than five
/// surviving radii is an error.
ExponentFit growth_exponent(const ScalarField& u, const ScalarField& psi, Vec2 x0, double r_min,
                            double r_max, int n_radii);

/// (3/4) (3 nu)^(1/3) |x - x0|^(4/3); the radial profile whose operator value
/// is exactly nu, used as the sharp lower-growth comparison function.
double barrier_value(double nu, Vec2 x, Vec2 x0);

struct LowerBoundRow {
    double r = 0.0;
    double margin = 0.0;  // max over the shell of (u - psi) - barrier
    bool pass = false;
    int shell_nodes = 0;
};

struct LowerBoundReport {
    double nu = 0.0;
    bool hypothesis_met = false;  // nu > 0; rows are only meaningful then
    std::vector<LowerBoundRow> rows;
};

/// For each radius, checks whether some node of the discrete shell around y0
/// carries u - psi at least the barrier value there.  With nu <= 0 the
/// non-degeneracy hypothesis fails and the rows are omitted (not a failure).
LowerBoundReport lower_bound_check(const ScalarField& u, const ScalarField& psi, Vec2 y0,
                                   double nu, const std::vector<double>& radii);

/// Fraction of grid nodes of the closed ball B_rho(x0) that lie in the given
/// (detached-set) mask.  The ball must fit inside the domain.
double positive_density(const Mask& detached, Vec2 x0, double rho);

/// max over a-nodes of the distance to the nearest b-node (0 for empty a,
/// +inf for nonempty a against empty b)
double hausdorff_one_sided(const Mask& a, const Mask& b);

struct RegularityAssumptions {
    double M = 0.0;   // sup |op(u - psi)| over measured nodes
    double nu = 0.0;  // inf op(u - psi) over the detached set (signed)
    bool nu_defined = false;   // detached set nonempty
    bool nu_positive = false;  // the non-degeneracy hypothesis holds discretely
    double eps_c = 0.0;
    double stencil_radius = 0.0;
    int measured = 0;  // full-stencil interior nodes entering the sup/inf
};

/// Measure the discrete counterparts of the regularity hypotheses on a run:
/// the two-sided bound M and the detached-set lower bound nu.  Defaults:
/// eps_c = 2 spacing^2, stencil_radius = 3 spacing.
RegularityAssumptions regularity_assumptions(const ScalarField& u, const ScalarField& psi,
                                             double eps_c = 0.0, double stencil_radius = 0.0);

struct GradientMatchReport {
    Vec2 grad_u{0.0, 0.0};
    Vec2 grad_psi{0.0, 0.0};
    double mismatch = 0.0;       // |grad_u - grad_psi|
    double holder_defect = 0.0;  // max |u(x)-u(x0)-grad_psi.(x-x0)| / |x-x0|^{4/3}
    double r = 0.0;              // ball radius of the defect measurement
};

/// Compare centered-difference gradients of solution and obstacle at a node
/// (they agree at the free boundary up to discretization) and measure the
/// 4/3-order expansion defect over B_r(x0).
GradientMatchReport gradient_match(const ScalarField& u, const ScalarField& psi, std::int32_t x0,
                                   double r);

}  // namespace infobs
