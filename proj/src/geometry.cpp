#include "infobs/geometry.hpp"

#include <algorithm>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "spec_json.hpp"

namespace infobs {

using nlohmann::json;

// ---- domain predicates -------------------------------------------------------

bool inside(const DomainSpec& dom, Vec2 q) {
    return std::visit(
        [&](const auto& d) -> bool {
            using T = std::decay_t<decltype(d)>;
            if constexpr (std::is_same_v<T, Disk>) {
                return (q - d.center).norm() < d.radius;
            } else if constexpr (std::is_same_v<T, Box>) {
                return q.x > d.lo.x && q.x < d.hi.x && q.y > d.lo.y && q.y < d.hi.y;
            } else {
                const double s2 = d.separation / 2.0;
                if ((q - Vec2{-s2, 0.0}).norm() < d.ball_radius) return true;
                if ((q - Vec2{s2, 0.0}).norm() < d.ball_radius) return true;
                return std::abs(q.x) < s2 && std::abs(q.y) < d.tube_halfwidth;
            }
        },
        dom);
}

static Vec2 project_circle(Vec2 c, double r, Vec2 q) {
    Vec2 dir = q - c;
    double n = dir.norm();
    if (n < 1e-300) return c + Vec2{r, 0.0};
    return c + dir * (r / n);
}

Vec2 project_boundary(const DomainSpec& dom, Vec2 q) {
    return std::visit(
        [&](const auto& d) -> Vec2 {
            using T = std::decay_t<decltype(d)>;
            if constexpr (std::is_same_v<T, Disk>) {
                return project_circle(d.center, d.radius, q);
            } else if constexpr (std::is_same_v<T, Box>) {
                Vec2 p{std::clamp(q.x, d.lo.x, d.hi.x), std::clamp(q.y, d.lo.y, d.hi.y)};
                if (p.x != q.x || p.y != q.y) return p;  // q outside: clamp is nearest
                // q on the closure: snap the coordinate closest to a face
                double dxl = q.x - d.lo.x, dxh = d.hi.x - q.x;
                double dyl = q.y - d.lo.y, dyh = d.hi.y - q.y;
                double m = std::min({dxl, dxh, dyl, dyh});
                if (m == dxl) return {d.lo.x, q.y};
                if (m == dxh) return {d.hi.x, q.y};
                if (m == dyl) return {q.x, d.lo.y};
                return {q.x, d.hi.y};
            } else {
                const double s2 = d.separation / 2.0;
                const double r = d.ball_radius, w = d.tube_halfwidth;
                const Vec2 cl{-s2, 0.0}, cr{s2, 0.0};
                Vec2 best{};
                double bd = std::numeric_limits<double>::infinity();
                auto consider = [&](Vec2 p, bool valid) {
                    if (!valid) return;
                    double dd = (p - q).norm();
                    if (dd < bd) { bd = dd; best = p; }
                };
                // circle arcs, excluding the parts swallowed by the tube or the other ball
                for (Vec2 c : {cl, cr}) {
                    Vec2 p = project_circle(c, r, q);
                    bool in_tube = std::abs(p.x) < s2 && std::abs(p.y) < w;
                    bool in_other =
                        (p - (c.x < 0 ? cr : cl)).norm() < r;
                    consider(p, !in_tube && !in_other);
                }
                // tube walls y = ±w where they are not inside a ball
                const double cx = std::sqrt(std::max(0.0, r * r - w * w));
                const double xa = -s2 + cx, xb = s2 - cx;
                if (xa <= xb) {
                    for (double sy : {-1.0, 1.0}) {
                        Vec2 p{std::clamp(q.x, xa, xb), sy * w};
                        consider(p, true);
                    }
                }
                return best;
            }
        },
        dom);
}

void bounding_box(const DomainSpec& dom, Vec2& lo, Vec2& hi) {
    std::visit(
        [&](const auto& d) {
            using T = std::decay_t<decltype(d)>;
            if constexpr (std::is_same_v<T, Disk>) {
                lo = {d.center.x - d.radius, d.center.y - d.radius};
                hi = {d.center.x + d.radius, d.center.y + d.radius};
            } else if constexpr (std::is_same_v<T, Box>) {
                lo = d.lo;
                hi = d.hi;
            } else {
                double s2 = d.separation / 2.0;
                lo = {-s2 - d.ball_radius, -d.ball_radius};
                hi = {s2 + d.ball_radius, d.ball_radius};
            }
        },
        dom);
}

// ---- grid construction -------------------------------------------------------

static void validate(const DomainSpec& dom, double spacing) {
    if (!(spacing > 0.0) || !std::isfinite(spacing))
        throw std::invalid_argument("spacing must be positive and finite");
    if (const auto* d = std::get_if<Disk>(&dom)) {
        if (!(d->radius > 0.0)) throw std::invalid_argument("disk radius must be positive");
    } else if (const auto* b = std::get_if<Box>(&dom)) {
        if (!(b->lo.x < b->hi.x && b->lo.y < b->hi.y))
            throw std::invalid_argument("box must satisfy lo < hi componentwise");
    } else if (const auto* db = std::get_if<Dumbbell>(&dom)) {
        if (!(db->ball_radius > 0.0 && db->tube_halfwidth > 0.0 && db->separation > 0.0))
            throw std::invalid_argument("dumbbell parameters must be positive");
        if (!(db->tube_halfwidth < db->ball_radius))
            throw std::invalid_argument("tube half-width must be smaller than the ball radius");
        if (spacing > db->tube_halfwidth) {
            char buf[160];
            std::snprintf(buf, sizeof buf,
                          "spacing %g too coarse to resolve tube half-width %g "
                          "(need spacing <= half-width)",
                          spacing, db->tube_halfwidth);
            throw std::runtime_error(buf);
        }
    }
}

Grid build_grid(const DomainSpec& dom, double spacing) {
    validate(dom, spacing);
    Grid g;
    g.spacing = spacing;
    g.domain = dom;

    Vec2 lo, hi;
    bounding_box(dom, lo, hi);
    g.i0 = static_cast<long>(std::floor(lo.x / spacing)) - 2;
    g.j0 = static_cast<long>(std::floor(lo.y / spacing)) - 2;
    long i1 = static_cast<long>(std::ceil(hi.x / spacing)) + 2;
    long j1 = static_cast<long>(std::ceil(hi.y / spacing)) + 2;
    g.nx = static_cast<int>(i1 - g.i0 + 1);
    g.ny = static_cast<int>(j1 - g.j0 + 1);

    const std::size_t n = static_cast<std::size_t>(g.nx) * g.ny;
    std::vector<std::uint8_t> ins(n, 0);
    for (int jj = 0; jj < g.ny; ++jj)
        for (int ii = 0; ii < g.nx; ++ii) {
            Vec2 q{(g.i0 + ii) * spacing, (g.j0 + jj) * spacing};
            ins[g.rawi(ii, jj)] = inside(dom, q) ? 1 : 0;
        }

    g.cls.assign(n, NodeClass::exterior);
    g.cidx.assign(n, -1);
    for (int jj = 0; jj < g.ny; ++jj)
        for (int ii = 0; ii < g.nx; ++ii) {
            int r = g.rawi(ii, jj);
            if (ins[r]) {
                g.cls[r] = NodeClass::interior;
                continue;
            }
            auto nb = [&](int di, int dj) {
                int a = ii + di, b = jj + dj;
                return a >= 0 && b >= 0 && a < g.nx && b < g.ny && ins[g.rawi(a, b)];
            };
            if (nb(1, 0) || nb(-1, 0) || nb(0, 1) || nb(0, -1))
                g.cls[r] = NodeClass::boundary;
        }

    for (std::size_t r = 0; r < n; ++r) {
        if (g.cls[r] == NodeClass::exterior) continue;
        g.cidx[r] = g.n_nodes++;
        g.raw.push_back(static_cast<std::int32_t>(r));
        Vec2 q = g.pos_raw(static_cast<int>(r));
        if (g.cls[r] == NodeClass::interior) {
            ++g.n_interior;
            g.proj.push_back(q);
        } else {
            ++g.n_boundary;
            g.proj.push_back(project_boundary(dom, q));
        }
    }
    return g;
}

std::int32_t Grid::nearest_node(Vec2 q) const {
    std::int32_t best = -1;
    double bd = std::numeric_limits<double>::infinity();
    for (std::int32_t c = 0; c < n_nodes; ++c) {
        double dd = (pos(c) - q).norm();
        if (dd < bd) { bd = dd; best = c; }
    }
    return best;
}

int Mask::count() const {
    return static_cast<int>(std::count(in.begin(), in.end(), std::uint8_t{1}));
}

// ---- analytic fields ---------------------------------------------------------

double eval_analytic(const AnalyticSpec& f, Vec2 q) {
    return std::visit(
        [&](const auto& a) -> double {
            using T = std::decay_t<decltype(a)>;
            if constexpr (std::is_same_v<T, SphericalCap>) {
                Vec2 d = q - a.center;
                return a.height - d.dot(d);
            } else if constexpr (std::is_same_v<T, AronssonFn>) {
                return std::pow(std::abs(q.x), 4.0 / 3.0) - std::pow(std::abs(q.y), 4.0 / 3.0);
            } else if constexpr (std::is_same_v<T, ConstantFn>) {
                return a.value;
            } else if constexpr (std::is_same_v<T, AffineFn>) {
                return a.slope.dot(q) + a.offset;
            } else if constexpr (std::is_same_v<T, BarrierFn>) {
                double r = (q - a.center).norm();
                return 0.75 * std::cbrt(3.0 * a.nu) * std::pow(r, 4.0 / 3.0);
            } else {
                throw std::invalid_argument("tabulated field has no off-grid evaluation");
            }
        },
        f);
}

ScalarField sample_field(const Grid& g, const AnalyticSpec& f) {
    ScalarField u(g);
    if (const auto* t = std::get_if<CustomTable>(&f)) {
        if (t->values.size() != static_cast<std::size_t>(g.n_nodes))
            throw std::invalid_argument("table size does not match grid node count");
        u.v = t->values;
        return u;
    }
    for (std::int32_t c = 0; c < g.n_nodes; ++c) u[c] = eval_analytic(f, g.pos(c));
    return u;
}

void apply_dirichlet(ScalarField& u, const AnalyticSpec& f) {
    const Grid& g = *u.grid;
    for (std::int32_t c = 0; c < g.n_nodes; ++c)
        if (!g.is_interior(c)) u[c] = eval_analytic(f, g.proj[c]);
}

// ---- stencil -----------------------------------------------------------------

std::vector<std::pair<int, int>> stencil_directions(int radius_cells) {
    if (radius_cells < 1) throw std::invalid_argument("stencil radius must be >= 1 cell");
    std::vector<std::pair<int, int>> dirs;
    for (int a = 0; a <= radius_cells; ++a)
        for (int b = -radius_cells; b <= radius_cells; ++b) {
            if (a == 0 && b <= 0) continue;  // canonical half-plane
            if (a * a + b * b > radius_cells * radius_cells) continue;
            if (std::gcd(a, std::abs(b)) != 1) continue;
            dirs.emplace_back(a, b);
        }
    return dirs;
}

RaySample walk_ray(const Grid& g, std::int32_t c, int ex, int ey, int kmax) {
    long gi, gj;
    g.global_ij(c, gi, gj);
    const Vec2 x0 = g.pos(c);
    RaySample out;
    for (int k = 1; k <= kmax; ++k) {
        std::int32_t n = g.at(gi + long(k) * ex, gj + long(k) * ey);
        if (n < 0) break;  // exterior: ray dies unless it already found a node
        if (g.is_interior(n)) {
            out.idx = n;
            out.dist = (g.pos(n) - x0).norm();
            continue;
        }
        if (g.node_class(n) == NodeClass::boundary) {
            double d = (g.proj[n] - x0).norm();
            // the projection can sit closer than the last interior sample when the
            // ray grazes the boundary; keep whichever reaches farther
            if (d > out.dist) { out.idx = n; out.dist = d; }
            break;
        }
        break;
    }
    return out;
}

namespace {

// positive root of |x0 + t d - c|^2 = R^2 given |x0 - c| < R
double circle_exit(Vec2 x0, Vec2 d, Vec2 c, double R) {
    Vec2 w = x0 - c;
    double beta = d.dot(w);
    return -beta + std::sqrt(std::max(0.0, beta * beta + R * R - w.dot(w)));
}

void circle_hits(Vec2 x0, Vec2 d, Vec2 c, double R, std::vector<double>& ts) {
    Vec2 w = x0 - c;
    double beta = d.dot(w);
    double disc = beta * beta + R * R - w.dot(w);
    if (disc < 0.0) return;
    double s = std::sqrt(disc);
    ts.push_back(-beta - s);
    ts.push_back(-beta + s);
}

}  // namespace

double ray_exit(const DomainSpec& dom, Vec2 x0, Vec2 dir) {
    double n = dir.norm();
    if (!(n > 0.0)) throw std::invalid_argument("ray direction must be nonzero");
    if (!inside(dom, x0)) throw std::invalid_argument("ray must start strictly inside the domain");
    const Vec2 d = dir * (1.0 / n);
    return std::visit(
        [&](const auto& shape) -> double {
            using S = std::decay_t<decltype(shape)>;
            if constexpr (std::is_same_v<S, Disk>) {
                return circle_exit(x0, d, shape.center, shape.radius);
            } else if constexpr (std::is_same_v<S, Box>) {
                double tx = d.x > 0.0   ? (shape.hi.x - x0.x) / d.x
                            : d.x < 0.0 ? (shape.lo.x - x0.x) / d.x
                                        : std::numeric_limits<double>::infinity();
                double ty = d.y > 0.0   ? (shape.hi.y - x0.y) / d.y
                            : d.y < 0.0 ? (shape.lo.y - x0.y) / d.y
                                        : std::numeric_limits<double>::infinity();
                return std::min(tx, ty);
            } else {
                // union of two balls and a tube: first crossing after which the
                // ray point is no longer inside (rays never bridge across gaps)
                const double s2 = shape.separation / 2.0;
                std::vector<double> ts;
                circle_hits(x0, d, {-s2, 0.0}, shape.ball_radius, ts);
                circle_hits(x0, d, {s2, 0.0}, shape.ball_radius, ts);
                if (d.y != 0.0) {
                    ts.push_back((shape.tube_halfwidth - x0.y) / d.y);
                    ts.push_back((-shape.tube_halfwidth - x0.y) / d.y);
                }
                std::sort(ts.begin(), ts.end());
                double last = 0.0;
                for (double t : ts) {
                    if (t <= 1e-15) continue;
                    last = t;
                    double probe = t + 1e-9 * (1.0 + t);
                    if (!inside(dom, {x0.x + probe * d.x, x0.y + probe * d.y})) return t;
                }
                return last;  // unreachable for a bounded union, kept for safety
            }
        },
        dom);
}

std::optional<Vec2> centered_gradient(const ScalarField& u, std::int32_t c) {
    const Grid& g = *u.grid;
    long gi, gj;
    g.global_ij(c, gi, gj);
    std::int32_t xe = g.at(gi + 1, gj), xw = g.at(gi - 1, gj);
    std::int32_t yn = g.at(gi, gj + 1), ys = g.at(gi, gj - 1);
    if (xe < 0 || xw < 0 || yn < 0 || ys < 0) return std::nullopt;
    double h2 = 2.0 * g.spacing;
    return Vec2{(u[xe] - u[xw]) / h2, (u[yn] - u[ys]) / h2};
}

InfLapValue discrete_inf_laplacian(const ScalarField& u, std::int32_t c, double stencil_radius) {
    const Grid& g = *u.grid;
    if (!g.is_interior(c)) throw std::invalid_argument("operator defined at interior nodes only");
    if (!(stencil_radius > 0.0)) throw std::invalid_argument("stencil radius must be positive");
    const double h = g.spacing;
    const int m = std::max(1, static_cast<int>(std::floor(stencil_radius / h + 1e-9)));

    long gi, gj;
    g.global_ij(c, gi, gj);
    const Vec2 x0 = g.pos(c);
    const double uc = u[c];

    double umax = -std::numeric_limits<double>::infinity(), rmax = 0.0;
    double umin = std::numeric_limits<double>::infinity(), rmin = 0.0;
    bool full = true;

    // Sample every ray at the same physical radius (quadratic interpolation
    // along the lattice nodes of the ray).  Equal radii keep the max and min
    // samples antipodal on smooth fields; mixing the per-direction quantized
    // reaches would break the second-difference structure by O(1).
    for (auto [ex, ey] : stencil_directions(m)) {
        const double en = std::hypot(double(ex), double(ey));
        const double t = stencil_radius / (en * h);  // >= 1: |e| <= m for all directions
        const int khi = std::max(1, static_cast<int>(std::ceil(t - 1e-9)));
        for (int sgn : {1, -1}) {
            double ray[3] = {uc, 0.0, 0.0};  // values at steps khi-2, khi-1, khi
            double val = 0.0, dist = 0.0;
            bool have = false;
            for (int k = 1; k <= khi; ++k) {
                std::int32_t n = g.at(gi + long(k) * sgn * ex, gj + long(k) * sgn * ey);
                if (n < 0) { full = false; break; }
                if (g.node_class(n) == NodeClass::boundary) {
                    val = u[n];  // cap at the carrier's projected trace
                    dist = std::max((g.proj[std::size_t(n)] - x0).norm(), 0.05 * h);
                    have = true;
                    full = false;
                    break;
                }
                if (!g.is_interior(n)) { full = false; break; }
                if (k >= khi - 2) ray[k - (khi - 2)] = u[n];
                if (k == khi) {
                    if (khi == 1) {
                        val = u[n];
                    } else {
                        const double s = t - double(khi - 2);  // in (1, 2]
                        ray[0] = khi == 2 ? uc : ray[0];
                        val = 0.5 * (s - 1.0) * (s - 2.0) * ray[0] - s * (s - 2.0) * ray[1] +
                              0.5 * s * (s - 1.0) * ray[2];
                    }
                    dist = stencil_radius;
                    have = true;
                }
            }
            if (!have) continue;
            if (val > umax || (val == umax && dist > rmax)) { umax = val; rmax = dist; }
            if (val < umin || (val == umin && dist > rmin)) { umin = val; rmin = dist; }
        }
    }

    InfLapValue out;
    out.full_stencil = full;
    if (!(rmax > 0.0) || !(rmin > 0.0)) {  // no usable samples: report zero, flagged
        out.full_stencil = false;
        return out;
    }
    out.normalized = 2.0 * ((umax - uc) / rmax + (umin - uc) / rmin) / (rmax + rmin);
    auto grad = centered_gradient(u, c);
    double g2 = grad ? grad->dot(*grad) : 0.0;
    if (!grad) out.full_stencil = false;
    out.value = g2 * out.normalized;
    return out;
}

// ---- IO ------------------------------------------------------------------------

static std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_field_csv(const std::string& path, const ScalarField& u) {
    const Grid& g = *u.grid;
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot open for writing: " + path);
    f << "i,j,x,y,value\n";
    for (std::int32_t c = 0; c < g.n_nodes; ++c) {
        long gi, gj;
        g.global_ij(c, gi, gj);
        Vec2 p = g.pos(c);
        f << gi << ',' << gj << ',' << fmt_double(p.x) << ',' << fmt_double(p.y) << ','
          << fmt_double(u[c]) << '\n';
    }
}

void write_mask_csv(const std::string& path, const Mask& m) {
    const Grid& g = *m.grid;
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot open for writing: " + path);
    f << "i,j,x,y,value\n";
    for (std::int32_t c = 0; c < g.n_nodes; ++c) {
        long gi, gj;
        g.global_ij(c, gi, gj);
        Vec2 p = g.pos(c);
        f << gi << ',' << gj << ',' << fmt_double(p.x) << ',' << fmt_double(p.y) << ','
          << int(m.in[c]) << '\n';
    }
}

void write_grid_json(const std::string& path, const Grid& g) {
    json j;
    j["spacing"] = g.spacing;
    j["domain"] = detail::domain_to_json(g.domain);
    j["i0"] = g.i0;
    j["j0"] = g.j0;
    j["nx"] = g.nx;
    j["ny"] = g.ny;
    j["n_nodes"] = g.n_nodes;
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot open for writing: " + path);
    f << j.dump(2) << '\n';
}

Grid read_grid_json(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open: " + path);
    json j;
    f >> j;
    Grid g = build_grid(detail::domain_from_json(j.at("domain")), j.at("spacing"));
    if (g.nx != j.at("nx").get<int>() || g.ny != j.at("ny").get<int>() ||
        g.n_nodes != j.at("n_nodes").get<int>())
        throw std::runtime_error("grid sidecar does not match rebuilt grid: " + path);
    return g;
}

ScalarField read_field_csv(const std::string& path, const Grid& g) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open: " + path);
    std::string line;
    std::getline(f, line);  // header
    ScalarField u(g);
    std::vector<std::uint8_t> seen(static_cast<std::size_t>(g.n_nodes), 0);
    while (std::getline(f, line)) {
        if (line.empty()) continue;
        long gi, gj;
        double x, y, val;
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream ss(line);
        if (!(ss >> gi >> gj >> x >> y >> val))
            throw std::runtime_error("bad CSV row in " + path + ": " + line);
        std::int32_t c = g.at(gi, gj);
        if (c < 0) throw std::runtime_error("CSV node outside grid in " + path);
        u[c] = val;
        seen[c] = 1;
    }
    if (std::count(seen.begin(), seen.end(), std::uint8_t{1}) != g.n_nodes)
        throw std::runtime_error("CSV does not cover every grid node: " + path);
    return u;
}

std::uint64_t fnv1a_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open: " + path);
    std::uint64_t h = 1469598103934665603ull;
    char buf[1 << 16];
    while (f.read(buf, sizeof buf) || f.gcount() > 0) {
        for (std::streamsize i = 0; i < f.gcount(); ++i) {
            h ^= static_cast<unsigned char>(buf[i]);
            h *= 1099511628211ull;
        }
        if (!f) break;
    }
    return h;
}

}  // namespace infobs
