#pragma once

#include <cstdint>
#include <vector>

#include "infobs/geometry.hpp"

namespace infobs {

struct CloudPoint {
    double r = 0.0;  // radius from the cone vertex
    double g = 0.0;  // value the cone must dominate there
};

struct MinConeResult {
    double value = 0.0;  // minimal admissible value at the query radius
    double base = 0.0;   // witness profile base + slope * r
    double slope = 0.0;  // nondecreasing: slope >= 0
};

/// Minimize V(r_x) over profiles V(r) = base + slope * r with slope >= 0 and
/// V(r_z) >= g_z for every cloud point.  Equals the least nondecreasing concave
/// majorant of the cloud evaluated at r_x.  Unbounded below (throws) when every
/// cloud point lies strictly outside radius r_x.
MinConeResult admissible_min_cone(std::vector<CloudPoint> cloud, double r_x);

struct EnvelopeResult {
    ScalarField field;                 // pointwise min over vertex cones
    std::vector<Vec2> vertices;        // cone vertices (true-boundary projections)
    std::vector<std::int32_t> winner;  // per node: attaining vertex index
};

/// Comparison envelope: for every boundary projection y, the minimal
/// nondecreasing cone centered at y that dominates the boundary data on the
/// boundary samples and the obstacle at interior nodes; the envelope is their
/// pointwise minimum.  It dominates the obstacle by construction and bounds the
/// constrained solution from above.
EnvelopeResult cone_envelope(const Grid& g, const ScalarField& psi, const AnalyticSpec& boundary);

struct EnvelopeComparison {
    double max_violation = 0.0;  // max over interior nodes of u - K
    std::int32_t argmax = -1;
    int violating = 0;  // interior nodes with u - K > tol
    double tol = 0.0;
};

EnvelopeComparison compare_envelope(const ScalarField& u, const ScalarField& envelope, double tol);

}  // namespace infobs
