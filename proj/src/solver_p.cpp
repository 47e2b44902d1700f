#include "infobs/solver_p.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace infobs {

namespace {

struct Cell {
    std::int32_t c00, c10, c01, c11;
};

// all 2x2 lattice cells whose corners are non-exterior
std::vector<Cell> collect_cells(const Grid& g) {
    std::vector<Cell> cells;
    for (int j = 0; j + 1 < g.ny; ++j)
        for (int i = 0; i + 1 < g.nx; ++i) {
            const std::int32_t c00 = g.cidx[g.rawi(i, j)];
            const std::int32_t c10 = g.cidx[g.rawi(i + 1, j)];
            const std::int32_t c01 = g.cidx[g.rawi(i, j + 1)];
            const std::int32_t c11 = g.cidx[g.rawi(i + 1, j + 1)];
            if (c00 >= 0 && c10 >= 0 && c01 >= 0 && c11 >= 0)
                cells.push_back({c00, c10, c01, c11});
        }
    return cells;
}

double cell_energy(const std::vector<double>& u, const std::vector<Cell>& cells, double inv2h,
                   double area, double p) {
    double e = 0.0;
    for (const Cell& cl : cells) {
        const double u00 = u[std::size_t(cl.c00)], u10 = u[std::size_t(cl.c10)];
        const double u01 = u[std::size_t(cl.c01)], u11 = u[std::size_t(cl.c11)];
        const double gx = (u10 + u11 - u00 - u01) * inv2h;
        const double gy = (u01 + u11 - u00 - u10) * inv2h;
        const double g2 = gx * gx + gy * gy;
        if (g2 > 0.0) e += std::pow(g2, 0.5 * p) * area;
    }
    return e;
}

void cell_gradient(const std::vector<double>& u, const std::vector<Cell>& cells, double inv2h,
                   double area, double p, std::vector<double>& grad) {
    std::fill(grad.begin(), grad.end(), 0.0);
    for (const Cell& cl : cells) {
        const double u00 = u[std::size_t(cl.c00)], u10 = u[std::size_t(cl.c10)];
        const double u01 = u[std::size_t(cl.c01)], u11 = u[std::size_t(cl.c11)];
        const double gx = (u10 + u11 - u00 - u01) * inv2h;
        const double gy = (u01 + u11 - u00 - u10) * inv2h;
        const double g2 = gx * gx + gy * gy;
        if (g2 <= 0.0) continue;
        const double w = p * std::pow(g2, 0.5 * p - 1.0) * area * inv2h;
        const double wx = w * gx, wy = w * gy;
        grad[std::size_t(cl.c00)] -= wx + wy;
        grad[std::size_t(cl.c10)] += wx - wy;
        grad[std::size_t(cl.c01)] -= wx - wy;
        grad[std::size_t(cl.c11)] += wx + wy;
    }
}

}  // namespace

EnergyValue energy_p(const ScalarField& u, double p) {
    if (!u.grid) throw std::invalid_argument("field has no grid");
    if (!(p >= 1.0)) throw std::invalid_argument("exponent must be at least 1");
    const Grid& g = *u.grid;
    const auto cells = collect_cells(g);
    EnergyValue out;
    out.value = cell_energy(u.v, cells, 1.0 / (2.0 * g.spacing), g.spacing * g.spacing, p);
    out.lp_norm = out.value > 0.0 ? std::pow(out.value, 1.0 / p) : 0.0;
    return out;
}

PSolveResult solve_obstacle_p(const Grid& g, const AnalyticSpec& obstacle,
                              const AnalyticSpec& boundary, const PSolveOptions& opt) {
    if (!(opt.p >= 2.0 && opt.p <= 120.0))
        throw std::invalid_argument("exponent must lie in [2, 120]: cell powers overflow beyond");

    const double h = g.spacing;
    const double inv2h = 1.0 / (2.0 * h);
    const double area = h * h;
    const auto cells = collect_cells(g);

    ScalarField psi = sample_field(g, obstacle);
    ScalarField u(g, 0.0);
    apply_dirichlet(u, boundary);
    if (opt.init) {
        if (opt.init->grid != &g) throw std::invalid_argument("warm start is on a different grid");
        for (std::int32_t c = 0; c < g.n_nodes; ++c)
            if (g.is_interior(c)) u[c] = std::max((*opt.init)[c], psi[c]);
    } else {
        for (std::int32_t c = 0; c < g.n_nodes; ++c)
            if (g.is_interior(c)) u[c] = psi[c];
    }

    // free variables: interior nodes that touch at least one complete cell;
    // anything else is held at its (feasible) initial value
    std::vector<std::uint8_t> incident(std::size_t(g.n_nodes), 0);
    for (const Cell& cl : cells)
        incident[std::size_t(cl.c00)] = incident[std::size_t(cl.c10)] =
            incident[std::size_t(cl.c01)] = incident[std::size_t(cl.c11)] = 1;
    std::vector<std::int32_t> free_nodes;
    int pinned = 0;
    for (std::int32_t c = 0; c < g.n_nodes; ++c) {
        if (!g.is_interior(c)) continue;
        if (incident[std::size_t(c)])
            free_nodes.push_back(c);
        else
            ++pinned;
    }

    std::vector<double> stages;
    if (opt.continuation && opt.p > 2.0) {
        for (double q = 2.0; q < opt.p; q *= 2.0) stages.push_back(q);
        stages.push_back(opt.p);
    } else {
        stages.push_back(opt.p);
    }

    PSolveResult res;
    res.pinned = pinned;
    std::vector<double> grad(std::size_t(g.n_nodes), 0.0);
    std::vector<double> unew(u.v.size());
    std::vector<double> gnew(std::size_t(g.n_nodes), 0.0);

    double uscale = 1.0;
    for (std::int32_t c : free_nodes) uscale = std::max(uscale, std::fabs(u[c]));

    bool all_converged = true;
    for (double q : stages) {
        cell_gradient(u.v, cells, inv2h, area, q, grad);
        double energy = cell_energy(u.v, cells, inv2h, area, q);
        double gmax = 0.0;
        for (std::int32_t c : free_nodes) gmax = std::max(gmax, std::fabs(grad[std::size_t(c)]));
        double t = gmax > 0.0 ? std::min(1.0, uscale / gmax) : 1.0;

        long it = 0;
        int calm = 0;
        bool stage_converged = false;
        for (; it < opt.max_iters; ++it) {
            // projected trial step with Armijo backtracking
            double gd = 0.0, dmax = 0.0;
            auto take_step = [&](double step) {
                unew = u.v;
                gd = 0.0;
                dmax = 0.0;
                for (std::int32_t c : free_nodes) {
                    const std::size_t s = std::size_t(c);
                    const double trial = std::max(psi.v[s], u.v[s] - step * grad[s]);
                    gd += grad[s] * (trial - u.v[s]);
                    dmax = std::max(dmax, std::fabs(trial - u.v[s]));
                    unew[s] = trial;
                }
            };
            take_step(t);
            double enew = cell_energy(unew, cells, inv2h, area, q);
            int backtracks = 0;
            while (enew > energy + opt.armijo_c * gd && backtracks < 60 && dmax > 0.0) {
                t *= 0.5;
                take_step(t);
                enew = cell_energy(unew, cells, inv2h, area, q);
                ++backtracks;
            }
            if (dmax <= opt.step_tol * uscale) {
                if (++calm >= 3) {
                    stage_converged = true;
                    break;
                }
            } else {
                calm = 0;
            }

            cell_gradient(unew, cells, inv2h, area, q, gnew);
            // Barzilai-Borwein step from the secant pair
            double ss = 0.0, sy = 0.0;
            for (std::int32_t c : free_nodes) {
                const std::size_t s = std::size_t(c);
                const double sv = unew[s] - u.v[s];
                ss += sv * sv;
                sy += sv * (gnew[s] - grad[s]);
            }
            u.v.swap(unew);
            grad.swap(gnew);
            energy = enew;
            t = sy > 0.0 ? std::min(std::max(ss / sy, 1e-14), 1e14) : t * 2.0;
        }
        res.stages.emplace_back(q, it);
        res.iterations += it;
        all_converged = all_converged && stage_converged;
    }

    const EnergyValue ev = energy_p(u, opt.p);
    res.energy = ev.value;
    res.lp_norm = ev.lp_norm;
    res.converged = all_converged;
    res.solution = std::move(u);
    return res;
}

}  // namespace infobs
