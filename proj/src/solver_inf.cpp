#include "infobs/solver_inf.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <stdexcept>

#include "infobs/cone_envelope.hpp"

namespace infobs {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

InfRelaxer::InfRelaxer(const Grid& g, const ScalarField& psi, const AnalyticSpec& boundary,
                       double stencil_radius)
    : g_(&g), radius_(stencil_radius), psi_(psi.v) {
    if (psi.grid != &g) throw std::invalid_argument("obstacle field lives on a different grid");
    if (!(radius_ > 0.0)) throw std::invalid_argument("stencil radius must be positive");
    const double h = g.spacing;
    const int m = int(radius_ / h + 1e-9);
    if (m < 1) throw std::invalid_argument("stencil radius must cover at least one cell");
    const bool analytic = !std::holds_alternative<CustomTable>(boundary);
    if (!analytic) reduced_ = true;  // cuts fall back to stored node values

    interior_.reserve(g.n_interior);
    for (std::int32_t c = 0; c < g.n_nodes; ++c)
        if (g.is_interior(c)) interior_.push_back(c);

    // column-major companion ordering for alternating sweeps
    interior_colmajor_.resize(interior_.size());
    for (std::size_t k = 0; k < interior_.size(); ++k)
        interior_colmajor_[k] = std::int32_t(k);
    std::sort(interior_colmajor_.begin(), interior_colmajor_.end(),
              [&](std::int32_t a, std::int32_t b) {
                  long ia, ja, ib, jb;
                  g.global_ij(interior_[std::size_t(a)], ia, ja);
                  g.global_ij(interior_[std::size_t(b)], ib, jb);
                  return ia != ib ? ia < ib : ja < jb;
              });

    const auto dirs = stencil_directions(m);
    struct RawSample {
        std::int32_t idx = -1;
        double d = 0.0;
        double bval = 0.0;
        bool ok = false;
    };
    std::vector<RawSample> samp(dirs.size() * 2);

    off_.assign(interior_.size() + 1, 0);
    entries_.reserve(interior_.size() * dirs.size() * 2);

    for (std::size_t k = 0; k < interior_.size(); ++k) {
        const std::int32_t c = interior_[k];
        const Vec2 x0 = g.pos(c);
        long gi, gj;
        g.global_ij(c, gi, gj);

        for (std::size_t p = 0; p < dirs.size(); ++p) {
            const auto [a, b] = dirs[p];
            const double hyp = std::hypot(double(a), double(b));
            const double step = hyp * h;
            const int ksteps = std::max(1, int(radius_ / step + 1e-9));
            for (int s = 0; s < 2; ++s) {
                const int sgn = s == 0 ? 1 : -1;
                RawSample& out = samp[2 * p + s];
                out = RawSample{};
                if (analytic) {
                    const Vec2 dir{sgn * a / hyp, sgn * b / hyp};
                    const double texit = ray_exit(g.domain, x0, dir);
                    std::int32_t nidx = -1;
                    if (texit > radius_ * (1.0 + 1e-12))
                        nidx = g.at(gi + long(ksteps) * sgn * a, gj + long(ksteps) * sgn * b);
                    if (nidx >= 0 && g.is_interior(nidx)) {
                        out = {nidx, ksteps * step, 0.0, true};
                    } else {
                        const Vec2 q = x0 + dir * texit;
                        out = {-1, std::max(texit, 1e-12 * h), eval_analytic(boundary, q), true};
                    }
                } else {
                    RaySample w = walk_ray(g, c, sgn * a, sgn * b, ksteps);
                    if (w.idx >= 0) out = {w.idx, std::max(w.dist, 1e-12 * h), 0.0, true};
                }
            }
        }

        double rx = kInf;
        for (std::size_t p = 0; p < dirs.size(); ++p)
            if (samp[2 * p].ok && samp[2 * p + 1].ok)
                rx = std::min(rx, std::min(samp[2 * p].d, samp[2 * p + 1].d));
        for (std::size_t p = 0; p < dirs.size(); ++p) {
            if (!(samp[2 * p].ok && samp[2 * p + 1].ok)) continue;  // keep the set symmetric
            for (int s = 0; s < 2; ++s) {
                const RawSample& r = samp[2 * p + s];
                entries_.push_back(Entry{r.idx, rx / r.d, r.bval});
            }
        }
        off_[k + 1] = std::uint32_t(entries_.size());
    }
}

double InfRelaxer::update_at(const std::vector<double>& u, std::size_t k) const {
    const std::int32_t c = interior_[k];
    const double u0 = u[std::size_t(c)];
    double vmax = -kInf, vmin = kInf;
    const std::uint32_t lo = off_[k], hi = off_[k + 1];
    if (lo == hi) return std::max(psi_[std::size_t(c)], u0);  // fully cut node: hold
    for (std::uint32_t e = lo; e < hi; ++e) {
        const Entry& en = entries_[e];
        const double x = en.idx >= 0 ? u[std::size_t(en.idx)] : en.bval;
        const double v = u0 + en.coef * (x - u0);
        vmax = std::max(vmax, v);
        vmin = std::min(vmin, v);
    }
    return std::max(psi_[std::size_t(c)], 0.5 * (vmax + vmin));
}

double InfRelaxer::relaxed_value(const std::vector<double>& u, std::int32_t c) const {
    auto it = std::lower_bound(interior_.begin(), interior_.end(), c);
    if (it == interior_.end() || *it != c)
        throw std::invalid_argument("relaxed_value is defined at interior nodes only");
    return update_at(u, std::size_t(it - interior_.begin()));
}

double InfRelaxer::jacobi(std::vector<double>& u, std::vector<double>& scratch) const {
    scratch.resize(interior_.size());
    for (std::size_t k = 0; k < interior_.size(); ++k) scratch[k] = update_at(u, k);
    double ch = 0.0;
    for (std::size_t k = 0; k < interior_.size(); ++k) {
        double& slot = u[std::size_t(interior_[k])];
        ch = std::max(ch, std::fabs(scratch[k] - slot));
        slot = scratch[k];
    }
    return ch;
}

double InfRelaxer::gauss_seidel(std::vector<double>& u, int phase) const {
    double ch = 0.0;
    auto upd = [&](std::size_t k) {
        double nv = update_at(u, k);
        double& slot = u[std::size_t(interior_[k])];
        ch = std::max(ch, std::fabs(nv - slot));
        slot = nv;
    };
    const std::size_t n = interior_.size();
    switch (phase & 3) {
        case 0:
            for (std::size_t k = 0; k < n; ++k) upd(k);
            break;
        case 1:
            for (std::size_t k = n; k-- > 0;) upd(k);
            break;
        case 2:
            for (std::size_t k = 0; k < n; ++k) upd(std::size_t(interior_colmajor_[k]));
            break;
        default:
            for (std::size_t k = n; k-- > 0;) upd(std::size_t(interior_colmajor_[k]));
            break;
    }
    return ch;
}

InfSolveResult solve_obstacle_inf(const Grid& g, const AnalyticSpec& obstacle,
                                  const AnalyticSpec& boundary, const InfSolveOptions& opt) {
    const double h = g.spacing;
    const double radius = opt.stencil_radius > 0.0 ? opt.stencil_radius : 3.0 * h;
    const double tol = opt.sweep_tol > 0.0 ? opt.sweep_tol : h * h * h;

    ScalarField psi = sample_field(g, obstacle);
    ScalarField u(g, 0.0);
    apply_dirichlet(u, boundary);

    // the boundary data must strictly dominate the obstacle on the boundary,
    // otherwise the constrained problem can pin boundary values from below
    const bool tabulated_psi = std::holds_alternative<CustomTable>(obstacle);
    double psi_top = -kInf, f_bot = kInf;
    for (std::int32_t c = 0; c < g.n_nodes; ++c) {
        if (g.is_interior(c)) continue;
        psi_top = std::max(psi_top, tabulated_psi ? psi[c] : eval_analytic(obstacle, g.proj[c]));
        f_bot = std::min(f_bot, u[c]);
    }
    if (g.n_boundary > 0 && !(psi_top < f_bot))
        throw std::invalid_argument("boundary data must strictly dominate the obstacle there");

    InfRelaxer relax(g, psi, boundary, radius);

    switch (opt.init) {
        case InfSolveOptions::Init::upper_constant: {
            double top = f_bot;
            for (std::int32_t c = 0; c < g.n_nodes; ++c) {
                if (g.is_interior(c))
                    top = std::max(top, psi[c]);
                else
                    top = std::max(top, u[c]);
            }
            for (std::int32_t c = 0; c < g.n_nodes; ++c)
                if (g.is_interior(c)) u[c] = top;
            break;
        }
        case InfSolveOptions::Init::cone_envelope: {
            ScalarField k0 = cone_envelope(g, psi, boundary).field;
            for (std::int32_t c = 0; c < g.n_nodes; ++c)
                if (g.is_interior(c)) u[c] = std::max(k0[c], psi[c]);
            break;
        }
        case InfSolveOptions::Init::custom: {
            if (!opt.init_field || opt.init_field->grid != &g)
                throw std::invalid_argument("custom init requires a field on the same grid");
            for (std::int32_t c = 0; c < g.n_nodes; ++c)
                if (g.is_interior(c)) u[c] = std::max((*opt.init_field)[c], psi[c]);
            break;
        }
    }

    InfSolveResult res;
    res.stencil_radius = radius;
    res.sweep_tol = tol;
    res.reduced_accuracy = relax.reduced_accuracy();

    std::vector<double> scratch;
    const int block = opt.gauss_seidel ? 4 : 1;
    double cur_block = 0.0, prev_block = -1.0, gap = kInf, last_change = 0.0;
    std::deque<double> ratios;
    long sweeps = 0;
    int phase = 0;
    bool converged = false;

    while (sweeps < opt.max_sweeps) {
        const double ch =
            opt.gauss_seidel ? relax.gauss_seidel(u.v, phase++) : relax.jacobi(u.v, scratch);
        ++sweeps;
        last_change = ch;
        cur_block = std::max(cur_block, ch);
        if (sweeps % block != 0) continue;

        if (prev_block > 0.0) {
            ratios.push_back(cur_block / prev_block);
            if (ratios.size() > 6) ratios.pop_front();
        }
        if (!ratios.empty()) {
            const double rho = *std::max_element(ratios.begin(), ratios.end());
            gap = rho < 1.0 ? cur_block * rho / (1.0 - rho) : kInf;
        }
        if (cur_block == 0.0) {
            converged = true;
            gap = 0.0;
            break;
        }
        if (cur_block <= tol && gap <= tol) {
            converged = true;
            break;
        }
        prev_block = cur_block;
        cur_block = 0.0;
    }

    res.solution = std::move(u);
    res.sweeps = sweeps;
    res.converged = converged;
    res.final_change = last_change;
    res.est_gap = gap;
    return res;
}

double relax_jacobi_step(ScalarField& u, const ScalarField& psi, const AnalyticSpec& boundary,
                         double stencil_radius) {
    if (!u.grid || u.grid != psi.grid)
        throw std::invalid_argument("field and obstacle must share a grid");
    InfRelaxer relax(*u.grid, psi, boundary, stencil_radius);
    std::vector<double> scratch;
    return relax.jacobi(u.v, scratch);
}

Mask coincidence_set(const ScalarField& u, const ScalarField& psi, double eps) {
    if (!u.grid || u.grid != psi.grid)
        throw std::invalid_argument("field and obstacle must share a grid");
    const Grid& g = *u.grid;
    if (eps <= 0.0) eps = 2.0 * g.spacing * g.spacing;
    Mask m(g);
    for (std::int32_t c = 0; c < g.n_nodes; ++c)
        if (g.is_interior(c) && u[c] - psi[c] <= eps) m.in[std::size_t(c)] = 1;
    return m;
}

ResidualReport residual_report(const ScalarField& u, const ScalarField& psi,
                               double stencil_radius, double eps) {
    if (!u.grid || u.grid != psi.grid)
        throw std::invalid_argument("field and obstacle must share a grid");
    const Grid& g = *u.grid;
    if (eps <= 0.0) eps = 2.0 * g.spacing * g.spacing;

    ResidualReport rep;
    rep.eps_c = eps;
    rep.stencil_radius = stencil_radius;
    rep.min_superharmonic_defect = kInf;
    for (std::int32_t c = 0; c < g.n_nodes; ++c) {
        if (!g.is_interior(c)) continue;
        InfLapValue op = discrete_inf_laplacian(u, c, stencil_radius);
        if (!op.full_stencil) {
            ++rep.truncated;
            continue;
        }
        rep.min_superharmonic_defect = std::min(rep.min_superharmonic_defect, -op.value);
        if (u[c] - psi[c] > eps) {
            ++rep.detached;
            rep.max_harmonic_residual = std::max(rep.max_harmonic_residual, std::fabs(op.value));
        } else {
            ++rep.contact;
            rep.max_contact_overshoot = std::max(rep.max_contact_overshoot, op.value);
        }
    }
    if (rep.detached + rep.contact == 0) rep.min_superharmonic_defect = 0.0;
    return rep;
}

std::vector<double> solve_1d_obstacle(const std::vector<double>& xs,
                                      const std::vector<double>& psi, double left, double right) {
    const std::size_t n = xs.size();
    if (n < 2 || psi.size() != n)
        throw std::invalid_argument("need matching coordinate/obstacle samples, at least two");
    for (std::size_t i = 1; i < n; ++i)
        if (!(xs[i] > xs[i - 1]))
            throw std::invalid_argument("coordinates must be strictly increasing");
    if (!(left >= psi.front()) || !(right >= psi.back()))
        throw std::invalid_argument("endpoint data must dominate the obstacle at the endpoints");

    // least concave majorant through the endpoints: upper convex hull of the
    // sample points, endpoints forced to the boundary data
    struct Pt {
        double x, y;
    };
    std::vector<Pt> pts(n);
    pts[0] = {xs[0], left};
    pts[n - 1] = {xs[n - 1], right};
    for (std::size_t i = 1; i + 1 < n; ++i) pts[i] = {xs[i], psi[i]};

    std::vector<Pt> hull;
    auto cross = [](const Pt& o, const Pt& a, const Pt& b) {
        return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
    };
    for (const Pt& p : pts) {
        while (hull.size() >= 2 && cross(hull[hull.size() - 2], hull.back(), p) >= 0.0)
            hull.pop_back();
        hull.push_back(p);
    }

    std::vector<double> out(n);
    std::size_t seg = 0;
    for (std::size_t i = 0; i < n; ++i) {
        while (seg + 1 < hull.size() && hull[seg + 1].x < xs[i]) ++seg;
        if (seg + 1 >= hull.size()) {
            out[i] = hull.back().y;
            continue;
        }
        const Pt& a = hull[seg];
        const Pt& b = hull[seg + 1];
        const double t = (xs[i] - a.x) / (b.x - a.x);
        out[i] = a.y + t * (b.y - a.y);
        out[i] = std::max(out[i], psi[i]);  // guard rounding at hull vertices
    }
    return out;
}

double tangent_contact(const std::function<double(double)>& g,
                       const std::function<double(double)>& dg, double x_end, double f_end,
                       double lo, double hi, double tol) {
    if (!(lo < hi)) throw std::invalid_argument("empty bracket");
    auto resid = [&](double t) { return g(t) + dg(t) * (x_end - t) - f_end; };
    double flo = resid(lo), fhi = resid(hi);
    if (flo == 0.0) return lo;
    if (fhi == 0.0) return hi;
    if ((flo > 0.0) == (fhi > 0.0))
        throw std::invalid_argument("tangency residual does not change sign over the bracket");
    for (int it = 0; it < 200 && hi - lo > tol; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fm = resid(mid);
        if (fm == 0.0) return mid;
        if ((fm > 0.0) == (flo > 0.0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

}  // namespace infobs
