#include "infobs/radial_oracle.hpp"

#include <cmath>
#include <stdexcept>

namespace infobs {

static void check_pd(double p, int d) {
    if (d < 2) throw std::invalid_argument("dimension must be >= 2");
    if (std::isinf(p)) return;
    if (!(p > 1.0)) throw std::invalid_argument("exponent must satisfy p > 1");
    if (p == static_cast<double>(d))
        throw std::invalid_argument("p = d hits the logarithmic branch, not supported");
}

double alpha_exponent(double p, int d) {
    check_pd(p, d);
    if (std::isinf(p)) return 0.0;
    return (d - 1) / (p - 1.0);
}

double solve_h(double p, int d) {
    check_pd(p, d);
    if (std::isinf(p)) return 2.0 - std::sqrt(3.0);
    const double al = alpha_exponent(p, d);
    // (2/(1-al) - 1) h^2 - 4 (2^{-al}/(1-al)) h^{1+al} + 1 = 0, bracketed on (0,1):
    // value 1 at h=0 and 2(1 - 2^{1-al})/(1-al) < 0 at h=1 for every admissible al.
    const double c2 = 2.0 / (1.0 - al) - 1.0;
    const double c1 = 4.0 * std::pow(2.0, -al) / (1.0 - al);
    auto phi = [&](double h) { return c2 * h * h - c1 * std::pow(h, 1.0 + al) + 1.0; };
    double lo = 0.0, hi = 1.0;
    for (int it = 0; it < 200; ++it) {
        double mid = 0.5 * (lo + hi);
        if (mid == lo || mid == hi) break;
        (phi(mid) > 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

RadialSolution radial_profile(double p, int d) {
    RadialSolution s;
    s.p = p;
    s.d = d;
    s.alpha = alpha_exponent(p, d);
    s.h = solve_h(p, d);
    // C^1 matching at h fixes b; zero boundary data at r = 2 fixes a.
    s.b = -2.0 * std::pow(s.h, 1.0 + s.alpha) / (1.0 - s.alpha);
    s.a = -s.b * std::pow(2.0, 1.0 - s.alpha);
    return s;
}

double eval_radial(const RadialSolution& s, double r) {
    if (!(r >= 0.0 && r <= 2.0)) throw std::invalid_argument("radius outside [0, 2]");
    if (r <= s.h) return 1.0 - r * r;
    return s.a + s.b * std::pow(r, 1.0 - s.alpha);
}

double radial_gap(const RadialSolution& s, double r) {
    if (!(r >= 0.0 && r <= 2.0)) throw std::invalid_argument("radius outside [0, 2]");
    if (r <= s.h) return 0.0;
    return s.a + s.b * std::pow(r, 1.0 - s.alpha) - (1.0 - r * r);
}

}  // namespace infobs
