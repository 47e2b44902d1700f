import math

import pytest

import _infobs as lab


H = 2.0 - math.sqrt(3.0)


def test_radial_oracle():
    assert abs(lab.H_INF - H) < 1e-15
    prof = lab.radial_profile(float("inf"))
    assert abs(prof.h - H) < 1e-12
    assert abs(prof.a - 4 * H) < 1e-12
    assert abs(prof.b + 2 * H) < 1e-12
    assert abs(lab.solve_h(1e6, 2) - H) < 1e-4
    p10 = lab.radial_profile(10.0)
    # value at the contact edge matches the obstacle, zero at the outer rim
    assert abs(lab.eval_radial(p10, p10.h) - (1 - p10.h**2)) < 1e-12
    assert abs(lab.eval_radial(p10, 2.0)) < 1e-12
    assert lab.radial_gap(prof, H) == 0.0
    assert lab.radial_gap(prof, 1.0) == pytest.approx((1.0 - H) ** 2, rel=1e-12)


def test_grid_and_fields():
    g = lab.build_grid(lab.Disk(lab.Vec2(0, 0), 2.0), 0.2)
    assert g.n_interior > 0 and g.n_boundary > 0
    assert g.n_nodes == g.n_interior + g.n_boundary
    psi = lab.sample_field(g, lab.SphericalCap(lab.Vec2(0, 0), 1.0))
    c0 = g.nearest_node(lab.Vec2(0, 0))
    assert psi[c0] == pytest.approx(1.0)
    assert len(psi) == g.n_nodes
    assert lab.eval_analytic(lab.Constant(3.5), lab.Vec2(1, 1)) == 3.5


def test_limit_solver_and_envelope():
    g = lab.build_grid(lab.Disk(lab.Vec2(0, 0), 2.0), 0.2)
    cap = lab.SphericalCap(lab.Vec2(0, 0), 1.0)
    zero = lab.Constant(0.0)
    res = lab.solve_obstacle_inf(g, cap, zero, gauss_seidel=True)
    assert res.converged
    prof = lab.radial_profile(float("inf"))
    worst = max(
        abs(res.solution[c] - lab.eval_radial(prof, min(g.pos(c).norm(), 2.0)))
        for c in range(g.n_nodes)
        if g.is_interior(c)
    )
    assert worst < 0.1
    psi = lab.sample_field(g, cap)
    env = lab.cone_envelope(g, psi, zero)
    # the sampled envelope dominates the discrete solution up to O(h^2)
    assert all(
        env[c] >= res.solution[c] - 0.2**2 for c in range(g.n_nodes) if g.is_interior(c)
    )
    mask = lab.coincidence_set(res.solution, psi)
    assert mask.count() > 0
    cells = lab.free_boundary_cells(mask)
    assert cells and all(c in mask for c in cells)


def test_energy_minimizer():
    g = lab.build_grid(lab.Disk(lab.Vec2(0, 0), 2.0), 0.2)
    res = lab.solve_obstacle_p(g, lab.SphericalCap(lab.Vec2(0, 0), 1.0), lab.Constant(0.0), p=6.0)
    assert res.converged and res.energy > 0
    value, lp = lab.energy_p(res.solution, 6.0)
    assert value == pytest.approx(res.energy, rel=1e-9)
    assert lp == pytest.approx(value ** (1.0 / 6.0), rel=1e-9)


def test_min_cone_matches_bruteforce():
    cloud = [(0.0, 0.2), (1.0, 0.5), (2.0, -0.3), (3.0, 0.9)]
    value, base, slope = lab.admissible_min_cone(cloud, 1.5)
    assert value == pytest.approx(base + slope * 1.5, abs=1e-12)
    assert slope >= 0
    assert all(base + slope * r >= gval - 1e-12 for r, gval in cloud)


def test_experiment_runner(tmp_path):
    out = tmp_path / "radial"
    res = lab.run_experiment("radial_profile", out_dir=str(out))
    assert res.pass_ and bool(res)
    assert (out / "manifest.json").exists()
    assert (out / "radial_profile.csv").read_text().splitlines()[0] == "p,alpha,h,a,b"
