import math

import numpy as np
import pytest

from betaensemble import BetaParams, DensityModel, Potential, ThetaGrid, combined_density, solve_endpoints
from betaensemble.density import bin_masses, compare_half_shape, cumulative, local_maxima
from betaensemble.errors import DomainError


def model_for(t0=1.0, beta=0.5, pot=None):
    pot = pot or Potential.even_quartic(t0)
    c = solve_endpoints(pot)
    return DensityModel(c, BetaParams.make(beta, 50, pot.t0))


@pytest.mark.parametrize("t0", [1e-3, 1.0, 100.0, 1e4])
def test_rho_inf_unit_mass(t0):
    m = model_for(t0)
    grid = ThetaGrid.uniform(2000)
    assert grid.integrate(m.rho_inf(grid.points)) == pytest.approx(1.0, abs=1e-8)


@pytest.mark.parametrize("t0", [0.05, 1.0, 100.0])
def test_rho_inf_quartic_closed_form(t0):
    # b^2 (2 b^2 cos^2 + b^2 + 1/2) sin^2 / (pi t0) for V = x^4 + x^2/2
    m = model_for(t0)
    b = m.curve.b
    th = np.linspace(0.05, 3.0, 17)
    ref = b * b * (2 * b * b * np.cos(th) ** 2 + b * b + 0.5) * np.sin(th) ** 2 / (math.pi * t0)
    assert np.allclose(m.rho_inf(th), ref, rtol=1e-12)


def test_rho_inf_symmetry_and_soft_edge():
    m = model_for()
    s = 0.3
    assert abs(m.rho_inf(math.pi / 2 + s) - m.rho_inf(math.pi / 2 - s)) < 1e-12
    r1, r2 = m.rho_inf(1e-3), m.rho_inf(2e-3)
    assert r2 / r1 == pytest.approx(4.0, rel=1e-5)


def test_gaussian_is_semicircle_in_theta():
    m = model_for(pot=Potential.gaussian(1.0))
    th = np.array([0.3, 1.0, 2.2])
    assert np.allclose(m.rho_inf(th), 2 * np.sin(th) ** 2 / math.pi, rtol=1e-12)


@pytest.mark.parametrize("theta", [0.0, math.pi, -0.1])
def test_branch_point_angles(theta):
    with pytest.raises(DomainError, match="branch-point angle"):
        model_for().rho_inf(theta)


def test_half_order_vanishes_for_hermitian():
    m = model_for(beta=1.0)
    assert np.all(m.rho_correction(1, np.array([0.2, 1.0, 2.5])) == 0)


@pytest.mark.parametrize("pot", [Potential.even_quartic(1.0), Potential.gaussian(2.0), Potential(t1=0.3, t2=1, t3=0.5, t4=4, t0=1)])
@pytest.mark.parametrize("beta", [0.5, 2.0])
def test_half_order_closed_form(pot, beta):
    m = model_for(pot=pot, beta=beta)
    th = ThetaGrid.uniform(64).points
    assert np.allclose(m.rho_correction(1, th), m.half_shape(th), rtol=1e-10, atol=1e-12)


@pytest.mark.parametrize("beta", [0.5, 2.0])
def test_gaussian_half_order_matches_known_edge_structure(beta):
    # Gaussian: continuous part gamma/(2 pi t0) in theta, atoms -gamma/(4 t0) at each edge
    m = model_for(pot=Potential.gaussian(1.0), beta=beta)
    g = m.params.gamma
    assert np.allclose(m.rho_correction(1, np.array([0.4, 1.9])), g / (2 * math.pi), rtol=1e-12)
    assert np.allclose(m.edge_atoms(1), [-g / 4, -g / 4], rtol=1e-10)


@pytest.mark.parametrize("t0", [0.01, 1.0, 100.0])
def test_half_order_measure_has_zero_mass(t0):
    m = model_for(t0)
    grid = ThetaGrid.uniform(2000)
    cont = grid.integrate(m.rho_correction(1, grid.points))
    assert abs(cont + sum(m.edge_atoms(1))) < 1e-8
    # the continuous part alone carries gamma/(2 t0)
    assert cont == pytest.approx(m.params.gamma / (2 * t0), rel=1e-8)


def test_printed_half_shape_is_affine_not_proportional():
    m = model_for()
    r = compare_half_shape(m)
    assert r["affine_residual"] < 1e-10
    assert r["affine_scale"] == pytest.approx(-1.0, abs=1e-10)
    assert r["affine_offset"] == pytest.approx(m.params.gamma / (2 * math.pi), rel=1e-10)
    assert r["ratio_max_deviation"] > 1


def test_corrections_mirror_symmetric():
    m = model_for()
    th = np.array([0.2, 0.9, 1.4])
    for tg in (1, 2):
        assert np.allclose(m.rho_correction(tg, th), m.rho_correction(tg, math.pi - th), atol=1e-10)


def test_integrability_detection():
    m = model_for()
    assert m.is_integrable(1)
    assert not m.is_integrable(2)
    assert m.edge_exponent(2) == pytest.approx(-4, abs=1e-3)


def test_combined_density_series():
    c = solve_endpoints(Potential.even_quartic(1.0))
    p = BetaParams.make(0.5, 50, 1.0)
    s = combined_density(c, p, max_twice_g=2)
    assert np.all(s.rho0 >= 0)
    assert s.integrals()["rho0"] == pytest.approx(1, abs=1e-8)
    assert s.integrable == {1: True, 2: False}
    assert any("non-integrable" in n for n in s.notes)
    first = combined_density(c, p, max_twice_g=1, grid=s.grid)
    assert first.total_mass() == pytest.approx(1.0, abs=1e-6)
    # gamma < 0: mass pushed onto the edges, taken from the continuous part
    assert first.combined_atoms()[0] > 0
    assert first.integrals()[1] < 0


def test_combined_hermitian_has_no_odd_term():
    c = solve_endpoints(Potential.even_quartic(1.0))
    p = BetaParams.make(1.0, 50, 1.0)
    s = combined_density(c, p, max_twice_g=2)
    assert np.all(s.corrections[1] == 0)
    assert np.allclose(s.combined, s.rho0 + p.hbar**2 * s.corrections[2])


def test_large_n_limit():
    c = solve_endpoints(Potential.even_quartic(1.0))
    s = combined_density(c, BetaParams.make(0.5, 10**12, 1.0), max_twice_g=1)
    assert np.allclose(s.combined, s.rho0, atol=1e-10)


@pytest.mark.parametrize("t0,count", [(1e-3, 1), (0.1, 1), (1.0, 2), (1e4, 2)])
def test_local_maxima_family(t0, count):
    m = model_for(t0)
    grid = ThetaGrid.uniform()
    assert local_maxima(m.rho_inf(grid.points)) == count


def test_theta_grid_validation():
    with pytest.raises(ValueError):
        ThetaGrid(np.array([0.0, 1.0]))
    with pytest.raises(ValueError):
        ThetaGrid(np.array([1.0, 0.5]))
    g = ThetaGrid(np.linspace(0.01, 3.1, 300))
    assert not g.is_uniform()
    assert g.integrate(np.sin(g.points)) == pytest.approx(2.0, abs=1e-3)


def test_bin_masses_and_cumulative():
    m = model_for()
    grid = ThetaGrid.uniform(1024)
    rho = m.rho_inf(grid.points)
    edges, mass = cumulative(grid, rho)
    assert mass[-1] == pytest.approx(1.0)
    masses = bin_masses(grid, rho, np.linspace(0, math.pi, 11), atoms=(0.1, 0.2))
    assert masses.sum() == pytest.approx(1.3)
    assert masses[0] > 0.1
