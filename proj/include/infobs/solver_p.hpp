#pragma once

#include <utility>
#include <vector>

#include "infobs/geometry.hpp"

namespace infobs {

struct EnergyValue {
    double value = 0.0;    // sum over cells of |G|^p * cell area
    double lp_norm = 0.0;  // value^(1/p); the stable scale for large p
};

/// Discrete p-energy of a field: gradients on 2x2 cells whose four corners are
/// all non-exterior (bilinear corner differences), integrated over cell area.
EnergyValue energy_p(const ScalarField& u, double p);

struct PSolveOptions {
    double p = 10.0;           // in [2, 120]; large exponents overflow cell powers
    bool continuation = true;  // warm-start through doubling exponents from 2
    long max_iters = 30000;    // per exponent stage
    double step_tol = 1e-11;   // stop when the projected step stalls at this
                               // fraction of the solution scale
    double armijo_c = 1e-4;
    double contact_tol = 0.0;  // <= 0: 2 * spacing^2
    const ScalarField* init = nullptr;  // optional warm start (clamped feasible)
};

struct PSolveResult {
    ScalarField solution;
    double energy = 0.0;
    double lp_norm = 0.0;
    long iterations = 0;  // total across stages
    bool converged = false;
    int pinned = 0;  // interior nodes with no complete cell (held fixed)
    std::vector<std::pair<double, long>> stages;  // (exponent, iterations)
};

/// Minimize the p-energy over fields that match the boundary data and dominate
/// the obstacle, by spectral projected gradient descent with Barzilai-Borwein
/// steps and an Armijo backtracking guard; the feasible set is handled by
/// clamping to the obstacle.  The functional is strictly convex for p >= 2, so
/// the minimizer is unique.
PSolveResult solve_obstacle_p(const Grid& g, const AnalyticSpec& obstacle,
                              const AnalyticSpec& boundary, const PSolveOptions& opt = {});

}  // namespace infobs
