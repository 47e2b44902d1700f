#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "infobs/radial_oracle.hpp"
#include "infobs/solver_inf.hpp"

using namespace infobs;

TEST_SUITE_BEGIN("solver_inf");

TEST_CASE("one-dimensional hull solve: inactive obstacle gives the chord") {
    std::vector<double> xs{0, 1, 2, 3, 4};
    std::vector<double> psi{-10, 2, -10, 1, -10};
    auto u = solve_1d_obstacle(xs, psi, 3.0, 2.0);
    REQUIRE(u.size() == 5);
    CHECK(u[0] == doctest::Approx(3.0));
    CHECK(u[1] == doctest::Approx(2.75));
    CHECK(u[2] == doctest::Approx(2.5));
    CHECK(u[3] == doctest::Approx(2.25));
    CHECK(u[4] == doctest::Approx(2.0));
}

TEST_CASE("one-dimensional hull solve: active obstacle bends the profile") {
    std::vector<double> xs{0, 1, 2, 3, 4};
    std::vector<double> psi{-10, 2, 3, 1, -10};
    auto u = solve_1d_obstacle(xs, psi, 3.0, 2.0);
    CHECK(u[0] == doctest::Approx(3.0));
    CHECK(u[1] == doctest::Approx(3.0));
    CHECK(u[2] == doctest::Approx(3.0));  // touches the obstacle
    CHECK(u[3] == doctest::Approx(2.5));
    CHECK(u[4] == doctest::Approx(2.0));
    for (std::size_t i = 0; i < u.size(); ++i) CHECK(u[i] >= psi[i] - 1e-15);
}

TEST_CASE("one-dimensional hull solve: input validation") {
    CHECK_THROWS_AS(solve_1d_obstacle({0, 1}, {0}, 1, 1), std::invalid_argument);
    CHECK_THROWS_AS(solve_1d_obstacle({0, 1, 1}, {0, 0, 0}, 1, 1), std::invalid_argument);
    // endpoint data below the obstacle at the endpoint
    CHECK_THROWS_AS(solve_1d_obstacle({0, 1, 2}, {5, 0, 0}, 1, 1), std::invalid_argument);
}

TEST_CASE("tangent construction recovers the parabola detachment point") {
    auto gfun = [](double t) { return 1.0 - t * t; };
    auto dgfun = [](double t) { return -2.0 * t; };
    const double t = tangent_contact(gfun, dgfun, 2.0, 0.0, 0.05, 0.95);
    CHECK(std::fabs(t - (2.0 - std::sqrt(3.0))) <= 1e-10);
    // the detachment point satisfies t^2 - 4t + 1 = 0
    CHECK(std::fabs(t * t - 4.0 * t + 1.0) <= 1e-9);
    CHECK_THROWS_AS(tangent_contact(gfun, dgfun, 2.0, 0.0, 0.6, 0.9), std::invalid_argument);
}

TEST_CASE("sweeps from an upper bound decrease monotonically and stay feasible") {
    Grid g = build_grid(Disk{{0.0, 0.0}, 2.0}, 0.2);
    const AnalyticSpec obstacle = SphericalCap{{0.0, 0.0}, 1.0};
    const AnalyticSpec boundary = ConstantFn{0.0};
    ScalarField psi = sample_field(g, obstacle);
    ScalarField u(g, 1.0);
    apply_dirichlet(u, boundary);
    ScalarField prev = u;
    for (int k = 0; k < 30; ++k) {
        relax_jacobi_step(u, psi, boundary, 0.6);
        for (std::int32_t c = 0; c < g.n_nodes; ++c) {
            CHECK(u[c] <= prev[c] + 1e-14);
            if (g.is_interior(c)) CHECK(u[c] >= psi[c] - 1e-14);
        }
        prev = u;
    }
}

TEST_CASE("boundary data must strictly dominate the obstacle on the boundary") {
    Grid g = build_grid(Disk{{0.0, 0.0}, 2.0}, 0.2);
    CHECK_THROWS_AS(solve_obstacle_inf(g, ConstantFn{0.0}, ConstantFn{0.0}),
                    std::invalid_argument);
    CHECK_THROWS_AS(solve_obstacle_inf(g, SphericalCap{{2.0, 0.0}, 1.0}, ConstantFn{0.0}),
                    std::invalid_argument);
}

TEST_CASE("affine data with an inactive obstacle returns the affine field") {
    Grid g = build_grid(Disk{{0.0, 0.0}, 1.0}, 0.1);
    const AnalyticSpec aff = AffineFn{{0.4, -0.3}, 0.2};
    InfSolveOptions opt;
    opt.sweep_tol = 1e-10;
    opt.gauss_seidel = true;
    InfSolveResult r = solve_obstacle_inf(g, ConstantFn{-10.0}, aff, opt);
    CHECK(r.converged);
    // boundary carriers hold the trace at their projection, not at the raw node
    double err = 0.0;
    for (std::int32_t c = 0; c < g.n_nodes; ++c) {
        const Vec2 q = g.is_interior(c) ? g.pos(c) : g.proj[std::size_t(c)];
        err = std::max(err, std::fabs(r.solution[c] - eval_analytic(aff, q)));
    }
    CHECK(err <= 1e-7);
}

TEST_CASE("two starting guesses agree at the fixed point") {
    Grid g = build_grid(Disk{{0.0, 0.0}, 2.0}, 0.1);
    const AnalyticSpec obstacle = SphericalCap{{0.0, 0.0}, 1.0};
    const AnalyticSpec boundary = ConstantFn{0.0};
    InfSolveOptions opt;
    opt.sweep_tol = 1e-8;
    opt.gauss_seidel = true;
    InfSolveResult r1 = solve_obstacle_inf(g, obstacle, boundary, opt);
    opt.init = InfSolveOptions::Init::cone_envelope;
    InfSolveResult r2 = solve_obstacle_inf(g, obstacle, boundary, opt);
    REQUIRE(r1.converged);
    REQUIRE(r2.converged);
    double diff = 0.0;
    for (std::int32_t c = 0; c < g.n_nodes; ++c)
        diff = std::max(diff, std::fabs(r1.solution[c] - r2.solution[c]));
    CHECK(diff <= 10.0 * opt.sweep_tol);
}

TEST_CASE("jacobi and alternating-order sweeps share the fixed point") {
    Grid g = build_grid(Disk{{0.0, 0.0}, 2.0}, 0.2);
    const AnalyticSpec obstacle = SphericalCap{{0.0, 0.0}, 1.0};
    const AnalyticSpec boundary = ConstantFn{0.0};
    InfSolveOptions opt;
    opt.sweep_tol = 1e-9;
    InfSolveResult rj = solve_obstacle_inf(g, obstacle, boundary, opt);
    opt.gauss_seidel = true;
    InfSolveResult rg = solve_obstacle_inf(g, obstacle, boundary, opt);
    REQUIRE(rj.converged);
    REQUIRE(rg.converged);
    CHECK(rg.sweeps < rj.sweeps);
    double diff = 0.0;
    for (std::int32_t c = 0; c < g.n_nodes; ++c)
        diff = std::max(diff, std::fabs(rj.solution[c] - rg.solution[c]));
    CHECK(diff <= 10.0 * opt.sweep_tol);
}

TEST_CASE("relaxation solve tracks the closed-form limit profile") {
    const double h = 0.1;
    Grid g = build_grid(Disk{{0.0, 0.0}, 2.0}, h);
    const AnalyticSpec obstacle = SphericalCap{{0.0, 0.0}, 1.0};
    InfSolveOptions opt;
    opt.gauss_seidel = true;
    InfSolveResult r = solve_obstacle_inf(g, obstacle, ConstantFn{0.0}, opt);
    REQUIRE(r.converged);

    const RadialSolution lim = radial_profile(std::numeric_limits<double>::infinity());
    double err = 0.0;
    for (std::int32_t c = 0; c < g.n_nodes; ++c) {
        if (!g.is_interior(c)) continue;
        err = std::max(err, std::fabs(r.solution[c] - eval_radial(lim, g.pos(c).norm())));
    }
    CHECK(err <= 0.05);

    // the contact set is a centered disk of roughly the closed-form radius
    ScalarField psi = sample_field(g, obstacle);
    Mask contact = coincidence_set(r.solution, psi);
    double rmax = 0.0;
    int n = 0;
    for (std::int32_t c = 0; c < g.n_nodes; ++c)
        if (contact.in[std::size_t(c)]) {
            rmax = std::max(rmax, g.pos(c).norm());
            ++n;
        }
    CHECK(n > 0);
    const double eps = 2.0 * h * h;
    CHECK(std::fabs(rmax - (lim.h + std::sqrt(eps))) <= 2.0 * h);
}

TEST_CASE("solution is invariant under its own relax step and flags contact exactly") {
    const double h = 0.15;
    Grid g = build_grid(Disk{{0.0, 0.0}, 2.0}, h);
    const AnalyticSpec obstacle = SphericalCap{{0.0, 0.0}, 1.0};
    InfSolveOptions opt;
    opt.gauss_seidel = true;
    opt.sweep_tol = 1e-9;
    InfSolveResult r = solve_obstacle_inf(g, obstacle, ConstantFn{0.0}, opt);
    REQUIRE(r.converged);
    ScalarField u = r.solution;
    ScalarField psi = sample_field(g, obstacle);
    const double change = relax_jacobi_step(u, psi, ConstantFn{0.0}, r.stencil_radius);
    CHECK(change <= 20.0 * opt.sweep_tol);
    // contact nodes carry the obstacle value exactly (clamped, not approximated)
    Mask tight = coincidence_set(r.solution, psi, 1e-12);
    CHECK(tight.count() > 0);
}

TEST_CASE("residual report splits the grid and bounds the contact overshoot") {
    const double h = 0.1;
    Grid g = build_grid(Disk{{0.0, 0.0}, 2.0}, h);
    const AnalyticSpec obstacle = SphericalCap{{0.0, 0.0}, 1.0};
    InfSolveOptions opt;
    opt.gauss_seidel = true;
    InfSolveResult r = solve_obstacle_inf(g, obstacle, ConstantFn{0.0}, opt);
    ScalarField psi = sample_field(g, obstacle);
    ResidualReport rep = residual_report(r.solution, psi, 3.0 * h);
    CHECK(rep.detached + rep.contact + rep.truncated == g.n_interior);
    CHECK(rep.detached > 0);
    CHECK(rep.contact > 0);
    CHECK(rep.eps_c == doctest::Approx(2.0 * h * h));
    // deep-contact nodes see the cap, whose operator value is negative
    CHECK(rep.max_contact_overshoot <= 1.0);
}

TEST_CASE("custom start must be supplied when requested") {
    Grid g = build_grid(Disk{{0.0, 0.0}, 2.0}, 0.2);
    InfSolveOptions opt;
    opt.init = InfSolveOptions::Init::custom;
    CHECK_THROWS_AS(solve_obstacle_inf(g, SphericalCap{{0.0, 0.0}, 1.0}, ConstantFn{0.0}, opt),
                    std::invalid_argument);
}

TEST_SUITE_END();
