#pragma once

#include <limits>

namespace infobs {

/// Closed-form radial solution on the disk of radius 2 with the unit cap
/// obstacle 1 - r^2 and zero boundary data: equals the cap on [0, h] and
/// a + b r^{1-alpha} on [h, 2], glued C^1 at the contact radius h.
struct RadialSolution {
    double p = std::numeric_limits<double>::infinity();
    int d = 2;
    double alpha = 0.0;  // (d-1)/(p-1), 0 in the limit
    double h = 0.0;      // contact radius, in (0, 1)
    double a = 0.0;
    double b = 0.0;
};

inline constexpr double kHInf = 0.26794919243112270;  // 2 - sqrt(3)

double alpha_exponent(double p, int d);

/// contact radius: unique root in (0,1) of the glued-profile compatibility
/// equation; p = +infinity short-circuits to 2 - sqrt(3).
double solve_h(double p, int d);

RadialSolution radial_profile(double p, int d = 2);

/// profile value at radius r in [0, 2]
double eval_radial(const RadialSolution& s, double r);

/// detachment gap f(r) - (1 - r^2); identically (r - h)^2 in the p = inf limit
double radial_gap(const RadialSolution& s, double r);

}  // namespace infobs
