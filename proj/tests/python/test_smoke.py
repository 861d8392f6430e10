import math

import pytest

import talenti_lab as tl


@pytest.fixture
def grids():
    return tl.RadialGrid(1.0, 2, 32), tl.TimeGrid(1.0, 48)


def test_grid_volumes(grids):
    grid, tgrid = grids
    assert grid.domain_volume == pytest.approx(math.pi, rel=1e-13)
    assert grid.ball_volume(0.5) == pytest.approx(math.pi / 4, rel=1e-13)
    assert tgrid.time(tgrid.n_steps) == 1.0


def test_rearrange_and_dominate(grids):
    grid, _ = grids
    f = tl.RadialField(grid)
    f.sample(lambda r: math.exp(-9.0 * (r - 0.5) ** 2))
    r = tl.rearrange(f)
    vals = r.values
    assert all(a >= b for a, b in zip(vals, vals[1:]))
    res = tl.dominates(f, r)
    assert res.dominated and res.margin <= 1e-12
    assert tl.integrate(f) == pytest.approx(tl.integrate(r), rel=1e-12)


def test_heat_positivity_and_duality(grids):
    grid, tgrid = grids
    f = tl.random_admissible(grid, tgrid, 0.3, seed=11, flavor=1)
    sol = tl.solve_heat(f)
    assert tl.maximum_principle_check(sol) >= 0.0
    phi = tl.RadialField(grid)
    phi.sample(lambda r: 1.0 - r * r)
    assert tl.duality_defect(f, phi) <= 1e-13


def test_bathtub_certificate(grids):
    grid, tgrid = grids
    phi = tl.sample_cutoff(tl.make_cutoff(0.25, 0.5), grid)
    bath = tl.bathtub_optimize(phi, tgrid, 0.2)
    assert bath.certificate_gap <= 1e-10
    assert 0.0 < bath.multiplier
    assert bath.control.residual <= 1e-9 * grid.domain_volume * tgrid.horizon


def test_invalid_inputs_raise(grids):
    grid, tgrid = grids
    with pytest.raises(ValueError):
        tl.RadialGrid(-1.0, 2, 8)
    f = tl.SpaceTimeField(grid, tgrid)
    with pytest.raises(ValueError):
        tl.make_admissible(f, 0.5)


def test_counterexample_quick():
    cfg = tl.RunConfig()
    cfg.n_r = 32
    cfg.n_t = 96
    rep = tl.run_counterexample(cfg)
    assert rep.margin_psi > 0.0
    assert rep.control_distance > 0.0
    assert rep.phi.radius_terminal < rep.psi.radius_terminal
    assert rep.min_radius_separation > 0.0
