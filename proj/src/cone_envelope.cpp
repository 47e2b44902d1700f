#include "infobs/cone_envelope.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace infobs {

namespace {

// least nondecreasing concave majorant of a point cloud over radius:
// the upper concave hull up to its apex, constant afterwards
struct Hull {
    std::vector<double> x, y;
    std::size_t apex = 0;  // first vertex attaining the maximum
};

Hull build_hull(std::vector<CloudPoint>& cloud) {
    std::sort(cloud.begin(), cloud.end(), [](const CloudPoint& a, const CloudPoint& b) {
        return a.r != b.r ? a.r < b.r : a.g > b.g;
    });

    Hull h;
    h.x.reserve(cloud.size());
    h.y.reserve(cloud.size());
    auto pops = [&](double px, double py) {
        const std::size_t n = h.x.size();
        // drop the last vertex when it is not strictly above the new chord
        return (h.x[n - 1] - h.x[n - 2]) * (py - h.y[n - 2]) -
                   (h.y[n - 1] - h.y[n - 2]) * (px - h.x[n - 2]) >=
               0.0;
    };
    double last_r = -1.0;
    for (const CloudPoint& p : cloud) {
        if (p.r == last_r) continue;  // duplicates sorted with the largest g first
        last_r = p.r;
        while (h.x.size() >= 2 && pops(p.r, p.g)) {
            h.x.pop_back();
            h.y.pop_back();
        }
        h.x.push_back(p.r);
        h.y.push_back(p.g);
    }
    h.apex = std::size_t(std::max_element(h.y.begin(), h.y.end()) - h.y.begin());
    return h;
}

double eval_hull(const Hull& h, double r) {
    if (r >= h.x[h.apex]) return h.y[h.apex];
    // r < apex radius: locate the hull segment (slopes here are nonnegative)
    const std::size_t j =
        std::size_t(std::upper_bound(h.x.begin(), h.x.begin() + long(h.apex), r) - h.x.begin());
    if (j == 0) return h.y[0];  // query at/under the innermost sample radius
    const double t = (r - h.x[j - 1]) / (h.x[j] - h.x[j - 1]);
    return h.y[j - 1] + t * (h.y[j] - h.y[j - 1]);
}

}  // namespace

MinConeResult admissible_min_cone(std::vector<CloudPoint> cloud, double r_x) {
    if (cloud.empty()) throw std::invalid_argument("empty cloud");
    if (!(r_x >= 0.0)) throw std::invalid_argument("query radius must be nonnegative");
    for (const CloudPoint& p : cloud)
        if (!(p.r >= 0.0)) throw std::invalid_argument("cloud radii must be nonnegative");

    Hull h = build_hull(cloud);
    if (r_x < h.x.front() - 1e-12 * (1.0 + h.x.front()))
        throw std::invalid_argument(
            "unbounded: every cloud point lies strictly outside the query radius");

    MinConeResult out;
    if (r_x >= h.x[h.apex]) {
        out.value = out.base = h.y[h.apex];
        out.slope = 0.0;
        return out;
    }
    const std::size_t j =
        std::size_t(std::upper_bound(h.x.begin(), h.x.begin() + long(h.apex), r_x) - h.x.begin());
    if (j == 0) {  // query pinned at the innermost sample
        out.value = h.y[0];
        if (h.apex > 0) {
            out.slope = std::max(0.0, (h.y[1] - h.y[0]) / (h.x[1] - h.x[0]));
            out.base = h.y[0] - out.slope * h.x[0];
        } else {
            out.base = h.y[0];
            out.slope = 0.0;
        }
        return out;
    }
    out.slope = std::max(0.0, (h.y[j] - h.y[j - 1]) / (h.x[j] - h.x[j - 1]));
    out.base = h.y[j - 1] - out.slope * h.x[j - 1];
    out.value = out.base + out.slope * r_x;
    return out;
}

EnvelopeResult cone_envelope(const Grid& g, const ScalarField& psi, const AnalyticSpec& boundary) {
    if (psi.grid != &g) throw std::invalid_argument("obstacle field lives on a different grid");
    const bool tabulated = std::holds_alternative<CustomTable>(boundary);

    EnvelopeResult res;
    res.field = ScalarField(g, std::numeric_limits<double>::infinity());
    res.winner.assign(std::size_t(g.n_nodes), -1);

    // cone vertices: the true-boundary projections of the boundary nodes,
    // carrying the Dirichlet data evaluated there (tabulated data is read at
    // the node itself; it cannot be evaluated off-grid)
    std::vector<double> fval;
    for (std::int32_t c = 0; c < g.n_nodes; ++c) {
        if (g.node_class(c) != NodeClass::boundary) continue;
        res.vertices.push_back(g.proj[c]);
        if (tabulated) {
            const auto& tab = std::get<CustomTable>(boundary).values;
            if (tab.size() != std::size_t(g.n_nodes))
                throw std::invalid_argument("tabulated boundary data does not match the grid");
            fval.push_back(tab[std::size_t(c)]);
        } else {
            fval.push_back(eval_analytic(boundary, g.proj[c]));
        }
    }

    std::vector<CloudPoint> cloud;
    cloud.reserve(std::size_t(g.n_nodes));
    for (std::size_t vi = 0; vi < res.vertices.size(); ++vi) {
        const Vec2 py = res.vertices[vi];
        cloud.clear();
        for (std::int32_t c = 0, bi = 0; c < g.n_nodes; ++c) {
            if (g.is_interior(c)) {
                cloud.push_back({(g.pos(c) - py).norm(), psi[c]});
            } else {
                cloud.push_back({(g.proj[c] - py).norm(), fval[std::size_t(bi)]});
                ++bi;
            }
        }
        Hull h = build_hull(cloud);
        for (std::int32_t c = 0; c < g.n_nodes; ++c) {
            const Vec2 q = g.is_interior(c) ? g.pos(c) : g.proj[c];
            const double v = eval_hull(h, (q - py).norm());
            if (v < res.field[c]) {
                res.field[c] = v;
                res.winner[std::size_t(c)] = std::int32_t(vi);
            }
        }
    }
    return res;
}

EnvelopeComparison compare_envelope(const ScalarField& u, const ScalarField& envelope, double tol) {
    if (!u.grid || u.grid != envelope.grid)
        throw std::invalid_argument("fields must share a grid");
    const Grid& g = *u.grid;
    EnvelopeComparison out;
    out.tol = tol;
    out.max_violation = -std::numeric_limits<double>::infinity();
    for (std::int32_t c = 0; c < g.n_nodes; ++c) {
        if (!g.is_interior(c)) continue;
        const double v = u[c] - envelope[c];
        if (v > out.max_violation) {
            out.max_violation = v;
            out.argmax = c;
        }
        if (v > tol) ++out.violating;
    }
    if (out.argmax < 0) out.max_violation = 0.0;
    return out;
}

}  // namespace infobs
