#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace infobs {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(double s) const { return {x * s, y * s}; }
    double dot(Vec2 o) const { return x * o.x + y * o.y; }
    double norm() const { return std::hypot(x, y); }
};

/// Open disk of given radius.
struct Disk {
    Vec2 center{0.0, 0.0};
    double radius = 1.0;
};

/// Open axis-aligned box (lo, hi) componentwise.
struct Box {
    Vec2 lo{0.0, 0.0};
    Vec2 hi{1.0, 1.0};
};

/// Two balls of radius `ball_radius` centered at (±separation/2, 0), joined by
/// the open tube {|x| < separation/2, |y| < tube_halfwidth}.
struct Dumbbell {
    double ball_radius = 1.0;
    double tube_halfwidth = 0.1;
    double separation = 3.0;
};

using DomainSpec = std::variant<Disk, Box, Dumbbell>;

bool inside(const DomainSpec& dom, Vec2 q);           // strict interior test
Vec2 project_boundary(const DomainSpec& dom, Vec2 q); // nearest point of the true boundary
void bounding_box(const DomainSpec& dom, Vec2& lo, Vec2& hi);

enum class NodeClass : std::uint8_t { interior, boundary, exterior };

/// Uniform lattice over the domain bounding box.  Node (i, j) sits at
/// (i*spacing, j*spacing) in world coordinates, i in [i0, i0+nx), j likewise;
/// the lattice always passes through the origin.  Non-exterior nodes get a
/// compact index; boundary nodes carry the nearest point of the true boundary,
/// which is where Dirichlet data is sampled.
class Grid {
public:
    double spacing = 0.0;
    DomainSpec domain;
    long i0 = 0, j0 = 0;
    int nx = 0, ny = 0;

    std::vector<NodeClass> cls;      // nx*ny, row-major (i fastest)
    std::vector<std::int32_t> cidx;  // nx*ny -> compact index, -1 for exterior
    std::vector<std::int32_t> raw;   // compact -> nx*ny raw index
    std::vector<Vec2> proj;          // compact -> boundary projection (node pos if interior)

    int n_nodes = 0;     // non-exterior
    int n_interior = 0;
    int n_boundary = 0;

    int rawi(int ii, int jj) const { return jj * nx + ii; }
    Vec2 pos_raw(int r) const {
        return {(i0 + r % nx) * spacing, (j0 + r / nx) * spacing};
    }
    Vec2 pos(std::int32_t c) const { return pos_raw(raw[c]); }
    NodeClass node_class(std::int32_t c) const { return cls[raw[c]]; }
    bool is_interior(std::int32_t c) const { return node_class(c) == NodeClass::interior; }

    /// compact index of lattice node (i, j) in global lattice coordinates, or -1.
    std::int32_t at(long gi, long gj) const {
        long ii = gi - i0, jj = gj - j0;
        if (ii < 0 || jj < 0 || ii >= nx || jj >= ny) return -1;
        return cidx[rawi(int(ii), int(jj))];
    }
    void global_ij(std::int32_t c, long& gi, long& gj) const {
        int r = raw[c];
        gi = i0 + r % nx;
        gj = j0 + r / nx;
    }
    /// nearest non-exterior node to a world point (ties broken by index order)
    std::int32_t nearest_node(Vec2 q) const;
};

/// throws std::invalid_argument on bad parameters and std::runtime_error when
/// the lattice cannot resolve the smallest domain feature (dumbbell tube).
Grid build_grid(const DomainSpec& dom, double spacing);

/// Values over the non-exterior nodes of a grid.  The grid must outlive the field.
struct ScalarField {
    const Grid* grid = nullptr;
    std::vector<double> v;

    ScalarField() = default;
    explicit ScalarField(const Grid& g, double fill = 0.0)
        : grid(&g), v(static_cast<std::size_t>(g.n_nodes), fill) {}

    double& operator[](std::int32_t c) { return v[static_cast<std::size_t>(c)]; }
    double operator[](std::int32_t c) const { return v[static_cast<std::size_t>(c)]; }
};

struct Mask {
    const Grid* grid = nullptr;
    std::vector<std::uint8_t> in;

    explicit Mask(const Grid& g) : grid(&g), in(static_cast<std::size_t>(g.n_nodes), 0) {}
    Mask() = default;
    int count() const;
};

// ---- analytic fields -------------------------------------------------------

struct SphericalCap {       // height - |x-center|^2
    Vec2 center{0.0, 0.0};
    double height = 1.0;
};
struct AronssonFn {};       // |x|^{4/3} - |y|^{4/3}
struct ConstantFn { double value = 0.0; };
struct AffineFn {
    Vec2 slope{0.0, 0.0};
    double offset = 0.0;
};
struct BarrierFn {          // (3/4)(3 nu)^{1/3} |x-center|^{4/3}
    double nu = 1.0;
    Vec2 center{0.0, 0.0};
};
struct CustomTable { std::vector<double> values; };  // compact-indexed

using AnalyticSpec =
    std::variant<SphericalCap, AronssonFn, ConstantFn, AffineFn, BarrierFn, CustomTable>;

/// pointwise evaluation; CustomTable cannot be evaluated off-grid and throws.
double eval_analytic(const AnalyticSpec& f, Vec2 q);

/// field(c) = f(node position) for every non-exterior node.
ScalarField sample_field(const Grid& g, const AnalyticSpec& f);

/// overwrite boundary nodes with f sampled at their true-boundary projections.
void apply_dirichlet(ScalarField& u, const AnalyticSpec& f);

// ---- wide-stencil machinery ------------------------------------------------

/// Primitive lattice directions e with |e| <= radius_cells, one per ± pair.
std::vector<std::pair<int, int>> stencil_directions(int radius_cells);

struct RaySample {
    std::int32_t idx = -1;  // sampled node (interior or boundary); -1 = no sample
    double dist = 0.0;      // distance from the center node to the sample point
};

/// Distance along the unit ray x0 + t*dir (x0 strictly inside) to the first
/// point where the ray leaves the domain.  Always finite for bounded domains.
double ray_exit(const DomainSpec& dom, Vec2 x0, Vec2 dir);

/// Walk from interior node c along ±e, stopping at the first non-inside node.
/// A boundary stop contributes its projection point; an exterior stop kills the ray.
RaySample walk_ray(const Grid& g, std::int32_t c, int ex, int ey, int kmax);

struct InfLapValue {
    double value = 0.0;        // |grad|^2 * nonuniform second difference along extremal nodes
    double normalized = 0.0;   // the second difference alone
    bool full_stencil = true;  // false when any direction pair was truncated/dropped
};

/// Discrete infinity Laplacian at interior node c: raw max/min over all ray
/// nodes within stencil_radius, combined with the nonuniform three-point second
/// difference and a centered-difference gradient magnitude.  Exact zero on
/// affine fields over a symmetric stencil.
InfLapValue discrete_inf_laplacian(const ScalarField& u, std::int32_t c, double stencil_radius);

/// centered-difference gradient; requires all four axis neighbors (else nullopt)
std::optional<Vec2> centered_gradient(const ScalarField& u, std::int32_t c);

// ---- IO ---------------------------------------------------------------------

/// CSV with header i,j,x,y,value over non-exterior nodes (global lattice i,j).
void write_field_csv(const std::string& path, const ScalarField& u);
void write_mask_csv(const std::string& path, const Mask& m);
/// grid sidecar (domain, spacing, lattice window) as JSON
void write_grid_json(const std::string& path, const Grid& g);
Grid read_grid_json(const std::string& path);
/// read a field written by write_field_csv onto a matching grid
ScalarField read_field_csv(const std::string& path, const Grid& g);

std::uint64_t fnv1a_file(const std::string& path);  // content hash for manifests

}  // namespace infobs
