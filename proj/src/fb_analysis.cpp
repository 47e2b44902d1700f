#include "infobs/fb_analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

namespace infobs {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

std::vector<std::int32_t> free_boundary_cells(const Mask& a) {
    if (!a.grid) throw std::invalid_argument("mask has no grid");
    const Grid& g = *a.grid;
    int total = 0, interior = 0;
    for (std::int32_t c = 0; c < g.n_nodes; ++c)
        if (a.in[std::size_t(c)]) {
            ++total;
            if (g.is_interior(c)) ++interior;
        }
    std::vector<std::int32_t> out;
    if (total == 0 || interior == g.n_interior) {
        std::fprintf(stderr, "warning: mask is %s; no edge cells to extract\n",
                     total == 0 ? "empty" : "full");
        return out;
    }
    for (std::int32_t c = 0; c < g.n_nodes; ++c) {
        if (!a.in[std::size_t(c)]) continue;
        long gi, gj;
        g.global_ij(c, gi, gj);
        const long nb[4][2] = {{gi + 1, gj}, {gi - 1, gj}, {gi, gj + 1}, {gi, gj - 1}};
        for (const auto& n : nb) {
            const std::int32_t cn = g.at(n[0], n[1]);
            if (cn < 0 || !a.in[std::size_t(cn)]) {
                out.push_back(c);
                break;
            }
        }
    }
    return out;
}

Mask mask_core(const Mask& a) {
    if (!a.grid) throw std::invalid_argument("mask has no grid");
    const Grid& g = *a.grid;
    Mask out(g);
    for (std::int32_t c = 0; c < g.n_nodes; ++c) {
        if (!a.in[std::size_t(c)]) continue;
        long gi, gj;
        g.global_ij(c, gi, gj);
        bool full = true;
        for (int dj = -1; dj <= 1 && full; ++dj)
            for (int di = -1; di <= 1 && full; ++di) {
                if (di == 0 && dj == 0) continue;
                const std::int32_t cn = g.at(gi + di, gj + dj);
                full = cn >= 0 && a.in[std::size_t(cn)];
            }
        if (full) out.in[std::size_t(c)] = 1;
    }
    return out;
}

ExponentFit growth_exponent(const ScalarField& u, const ScalarField& psi, Vec2 x0, double r_min,
                            double r_max, int n_radii) {
    if (!u.grid || u.grid != psi.grid)
        throw std::invalid_argument("fields must share a grid");
    const Grid& g = *u.grid;
    if (!(r_min > 0.0 && r_min < r_max)) throw std::invalid_argument("need 0 < r_min < r_max");
    if (r_min < 3.0 * g.spacing)
        throw std::invalid_argument("r_min must be at least three spacings");
    const double margin = (x0 - project_boundary(g.domain, x0)).norm();
    if (r_max > 0.5 * margin + 1e-12)
        throw std::invalid_argument("r_max exceeds half the distance to the boundary");
    if (n_radii < 5) throw std::invalid_argument("need at least five radii");

    std::vector<double> dist(std::size_t(g.n_nodes));
    std::vector<double> gap(std::size_t(g.n_nodes));
    for (std::int32_t c = 0; c < g.n_nodes; ++c) {
        dist[std::size_t(c)] = (g.pos(c) - x0).norm();
        gap[std::size_t(c)] = std::fabs(u[c] - psi[c]);
    }

    std::vector<double> lx, ly;
    const double ratio = r_max / r_min;
    for (int k = 0; k < n_radii; ++k) {
        const double r = r_min * std::pow(ratio, double(k) / double(n_radii - 1));
        double sup = 0.0, reach = 0.0;
        for (std::int32_t c = 0; c < g.n_nodes; ++c) {
            if (dist[std::size_t(c)] > r) continue;
            reach = std::max(reach, dist[std::size_t(c)]);
            sup = std::max(sup, gap[std::size_t(c)]);
        }
        if (sup <= 0.0 || reach <= 0.0) continue;  // all-contact ball: skip
        lx.push_back(std::log(reach));
        ly.push_back(std::log(sup));
    }
    if (lx.size() < 5)
        throw std::runtime_error("fewer than five radii carry a nonzero sup; cannot fit");

    const double n = double(lx.size());
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        sx += lx[i];
        sy += ly[i];
        sxx += lx[i] * lx[i];
        sxy += lx[i] * ly[i];
    }
    ExponentFit fit;
    const double det = n * sxx - sx * sx;
    fit.slope = (n * sxy - sx * sy) / det;
    fit.intercept = (sy * sxx - sx * sxy) / det;
    double rss = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        const double e = ly[i] - (fit.intercept + fit.slope * lx[i]);
        rss += e * e;
    }
    fit.rms = std::sqrt(rss / n);
    fit.r_min = r_min;
    fit.r_max = r_max;
    fit.samples = int(lx.size());
    return fit;
}

double barrier_value(double nu, Vec2 x, Vec2 x0) {
    if (!(nu > 0.0)) throw std::domain_error("barrier scale requires nu > 0");
    return 0.75 * std::cbrt(3.0 * nu) * std::pow((x - x0).norm(), 4.0 / 3.0);
}

LowerBoundReport lower_bound_check(const ScalarField& u, const ScalarField& psi, Vec2 y0,
                                   double nu, const std::vector<double>& radii) {
    if (!u.grid || u.grid != psi.grid)
        throw std::invalid_argument("fields must share a grid");
    const Grid& g = *u.grid;
    LowerBoundReport rep;
    rep.nu = nu;
    rep.hypothesis_met = nu > 0.0;
    if (!rep.hypothesis_met) return rep;  // nothing to check; not a failure

    const double band = 0.75 * g.spacing;
    for (double r : radii) {
        LowerBoundRow row;
        row.r = r;
        row.margin = -kInf;
        for (std::int32_t c = 0; c < g.n_nodes; ++c) {
            if (!g.is_interior(c)) continue;
            const Vec2 x = g.pos(c);
            if (std::fabs((x - y0).norm() - r) > band) continue;
            ++row.shell_nodes;
            row.margin = std::max(row.margin, (u[c] - psi[c]) - barrier_value(nu, x, y0));
        }
        row.pass = row.shell_nodes > 0 && row.margin >= -1e-12 * (1.0 + std::fabs(row.margin));
        rep.rows.push_back(row);
    }
    return rep;
}

double positive_density(const Mask& detached, Vec2 x0, double rho) {
    if (!detached.grid) throw std::invalid_argument("mask has no grid");
    const Grid& g = *detached.grid;
    if (!(rho > 0.0)) throw std::invalid_argument("radius must be positive");
    if ((x0 - project_boundary(g.domain, x0)).norm() <= rho)
        throw std::invalid_argument("ball must fit inside the domain");
    long total = 0, hit = 0;
    for (std::int32_t c = 0; c < g.n_nodes; ++c) {
        if ((g.pos(c) - x0).norm() > rho) continue;
        ++total;
        if (detached.in[std::size_t(c)]) ++hit;
    }
    if (total == 0) throw std::invalid_argument("ball contains no grid nodes");
    return double(hit) / double(total);
}

double hausdorff_one_sided(const Mask& a, const Mask& b) {
    if (!a.grid || a.grid != b.grid) throw std::invalid_argument("masks must share a grid");
    const Grid& g = *a.grid;
    std::vector<Vec2> pb;
    for (std::int32_t c = 0; c < g.n_nodes; ++c)
        if (b.in[std::size_t(c)]) pb.push_back(g.pos(c));
    double worst = 0.0;
    for (std::int32_t c = 0; c < g.n_nodes; ++c) {
        if (!a.in[std::size_t(c)]) continue;
        if (pb.empty()) return kInf;
        const Vec2 x = g.pos(c);
        double best = kInf;
        for (const Vec2& y : pb) best = std::min(best, (x - y).norm());
        worst = std::max(worst, best);
    }
    return worst;
}

RegularityAssumptions regularity_assumptions(const ScalarField& u, const ScalarField& psi,
                                             double eps_c, double stencil_radius) {
    if (!u.grid || u.grid != psi.grid)
        throw std::invalid_argument("fields must share a grid");
    const Grid& g = *u.grid;
    if (eps_c <= 0.0) eps_c = 2.0 * g.spacing * g.spacing;
    if (stencil_radius <= 0.0) stencil_radius = 3.0 * g.spacing;

    ScalarField diff(g);
    for (std::int32_t c = 0; c < g.n_nodes; ++c) diff[c] = u[c] - psi[c];

    RegularityAssumptions out;
    out.eps_c = eps_c;
    out.stencil_radius = stencil_radius;
    double nu = kInf;
    for (std::int32_t c = 0; c < g.n_nodes; ++c) {
        if (!g.is_interior(c)) continue;
        const InfLapValue op = discrete_inf_laplacian(diff, c, stencil_radius);
        if (!op.full_stencil) continue;
        ++out.measured;
        out.M = std::max(out.M, std::fabs(op.value));
        if (diff[c] > eps_c) {
            out.nu_defined = true;
            nu = std::min(nu, op.value);
        }
    }
    out.nu = out.nu_defined ? nu : 0.0;
    out.nu_positive = out.nu_defined && out.nu > 0.0;
    return out;
}

GradientMatchReport gradient_match(const ScalarField& u, const ScalarField& psi, std::int32_t x0,
                                   double r) {
    if (!u.grid || u.grid != psi.grid)
        throw std::invalid_argument("fields must share a grid");
    const Grid& g = *u.grid;
    if (x0 < 0 || x0 >= g.n_nodes) throw std::invalid_argument("node out of range");
    auto gu = centered_gradient(u, x0);
    auto gp = centered_gradient(psi, x0);
    if (!gu || !gp)
        throw std::invalid_argument("centered-difference stencil truncated at this node");

    GradientMatchReport rep;
    rep.grad_u = *gu;
    rep.grad_psi = *gp;
    rep.mismatch = (*gu - *gp).norm();
    rep.r = r;
    const Vec2 p0 = g.pos(x0);
    const double u0 = u[x0];
    for (std::int32_t c = 0; c < g.n_nodes; ++c) {
        const Vec2 dx = g.pos(c) - p0;
        const double d = dx.norm();
        if (d <= 0.0 || d > r) continue;
        const double lin = u0 + rep.grad_psi.dot(dx);
        rep.holder_defect =
            std::max(rep.holder_defect, std::fabs(u[c] - lin) / std::pow(d, 4.0 / 3.0));
    }
    return rep;
}

}  // namespace infobs
