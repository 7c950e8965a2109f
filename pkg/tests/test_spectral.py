import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from mp_oracle import scaled_tail

from betaensemble.errors import CurveError, DomainError, PoleError, SolverError
from betaensemble.spectral import BetaParams, Potential, moment_zeros, printed_endpoint_residuals, solve_endpoints


@pytest.mark.parametrize("t0", [1e-3, 0.1, 1.0, 100.0, 1e4])
def test_even_quartic_endpoints(t0):
    c = solve_endpoints(Potential.even_quartic(t0))
    assert abs(c.a + c.b) < 1e-12
    # matching at infinity for V = x^4 + x^2/2: (3/4) b^4 + (1/4) b^2 = t0
    assert 0.75 * c.b**4 + 0.25 * c.b**2 == pytest.approx(t0, rel=1e-12)


def test_quartic_t0_one_is_unit_interval(quartic):
    assert quartic.b == pytest.approx(1.0, abs=1e-13)
    assert quartic.m2 == pytest.approx(-2.0)
    assert quartic.m0 == pytest.approx(-1.5)


@pytest.mark.parametrize("t0", [0.25, 1.0, 4.0])
def test_gaussian_endpoints(t0):
    c = solve_endpoints(Potential.gaussian(t0))
    assert abs(c.b - 2 * math.sqrt(t0)) < 1e-10
    assert abs(c.a + 2 * math.sqrt(t0)) < 1e-10
    assert c.zeros_x == () or len(c.zeros_x) == 0


@pytest.mark.parametrize("which", ["quartic", "skew"])
def test_resolvent_decays_like_t0_over_x(which, request):
    c = request.getfixturevalue(which)
    scaled = [scaled_tail(c, x) for x in (1e3, 1e6)]
    # x^2 (W0 - t0/x) tends to t0 * <lambda>; bounded and converging
    assert all(abs(s) < 10 for s in scaled)
    assert abs(scaled[0] - scaled[1]) < 1e-2


def test_skew_matching_conditions(skew):
    res = skew.residuals()["asymptotic"]
    assert max(abs(v) for v in res["polynomial_part"]) < 1e-12
    assert abs(res["inverse_x_minus_t0"]) < 1e-12
    assert res["newton"] < 1e-12


def test_printed_endpoint_equations_reported(quartic):
    r1, r2 = printed_endpoint_residuals(quartic.potential, quartic.a, quartic.b)
    assert abs(r1) < 1e-12
    # the second printed relation does not hold at the true endpoints
    assert abs(r2) > 1


def test_moment_zeros_even_quartic(quartic):
    xs = sorted(quartic.zeros_x, key=lambda v: v.imag)
    assert np.allclose(xs, [-1j * math.sqrt(3) / 2, 1j * math.sqrt(3) / 2], atol=1e-12)
    for zx, zz in zip(quartic.zeros_x, quartic.zeros_z):
        assert abs(zz) > 1
        assert abs(quartic.x_of_z(zz) - zx) < 1e-12
        assert abs(quartic.M(zx)) < 1e-12
    xs2, zs2 = moment_zeros(quartic)
    assert np.allclose(xs2, quartic.zeros_x)
    assert np.allclose(zs2, quartic.zeros_z)


@settings(max_examples=50)
@given(st.floats(-5, 5), st.floats(-5, 5))
def test_z_of_x_inverts_x_of_z(re, im):
    c = solve_endpoints(Potential.even_quartic(1.0))
    x = complex(re, im)
    if abs(im) < 1e-6 and abs(re) <= 1:
        return
    z = c.z_of_x(x)
    assert abs(z) > 1
    assert abs(c.x_of_z(z) - x) < 1e-10 * max(1, abs(x))


def test_y_tilde_flips_on_mirror(quartic):
    z = 1.4 + 0.9j
    assert abs(quartic.y_tilde(1 / z) + quartic.y_tilde(z)) < 1e-13
    x = quartic.x_of_z(z)
    assert abs(quartic.y_tilde(z) ** 2 - quartic.M(x) ** 2 * (x - quartic.a) * (x - quartic.b)) < 1e-12


def test_on_cut_and_map_pole_errors(quartic):
    with pytest.raises(DomainError, match="branch point"):
        quartic.z_of_x(0.3)
    with pytest.raises(PoleError):
        quartic.x_of_z(0.0)


@pytest.mark.parametrize(
    "kw",
    [
        dict(t0=-1.0),
        dict(t2=1.0, t3=1.0, t4=0.0),
        dict(t2=-1.0, t4=0.0),
        dict(t2=1.0, t4=-1.0),
    ],
)
def test_invalid_potentials(kw):
    with pytest.raises(CurveError):
        Potential(**kw).degree


def test_two_cut_regime_rejected():
    with pytest.raises(CurveError, match="critical/non-regular"):
        solve_endpoints(Potential(t2=-5.0, t4=4.0, t0=0.05))


def test_bad_guess():
    with pytest.raises(SolverError):
        solve_endpoints(Potential.even_quartic(1.0), guess=(1.0, -1.0))


def test_beta_params():
    p = BetaParams.make(2.0, 50, 1.0)
    assert p.gamma == pytest.approx(math.sqrt(2) - 1 / math.sqrt(2))
    assert p.hbar == pytest.approx(1 / (50 * math.sqrt(2)))
    assert BetaParams.make(1.0, 10, 1.0).gamma == 0


@pytest.mark.parametrize("which", ["quartic", "skew"])
def test_moments_match_expansion_at_infinity(which, request):
    c = request.getfixturevalue(which)
    pot = c.potential
    s, p = c.a + c.b, c.a * c.b
    assert c.m2 == pytest.approx(-pot.t4 / 2)
    assert c.m1 == pytest.approx(-(pot.t3 + pot.t4 * s / 2) / 2, abs=1e-13)
    assert c.m0 == pytest.approx(-(pot.t2 + pot.t3 * s / 2 + pot.t4 * (3 * s * s / 8 - p / 2)) / 2, abs=1e-13)
