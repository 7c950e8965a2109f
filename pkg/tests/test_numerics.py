import cmath

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from betaensemble.errors import ContourError, PoleError
from betaensemble.numerics import (
    ContourSpec,
    Jet,
    contour_integral,
    contour_integral_with_error,
    derivative_at,
    jet_arith,
    jet_eval,
)

finite = st.floats(-3, 3, allow_nan=False)
cplx = st.builds(complex, finite, finite)


def test_variable_and_constant():
    z = Jet.variable(2.0, 3)
    assert np.allclose(z.coeffs, [2, 1, 0, 0])
    assert Jet.constant(5, 2.0, 3).value == 5
    assert z.is_variable()
    assert not (z * 2).is_variable()


@pytest.mark.parametrize("z0", [0.3, 1.5 + 0.2j, -2.0j])
def test_rational_function_derivatives(z0):
    # f = z^3 / (1 + z), derivatives by hand
    f = lambda z: z**3 / (1 + z)
    d = jet_eval(f, z0, 3).derivatives()
    w = 1 + z0
    assert d[0] == pytest.approx(z0**3 / w)
    assert d[1] == pytest.approx((2 * z0**3 + 3 * z0**2) / w**2)
    assert d[2] == pytest.approx(2 * z0 * (z0**2 + 3 * z0 + 3) / w**3)
    assert d[3] == pytest.approx(6 / w**4)


@given(cplx, st.integers(1, 5))
def test_integer_power_matches_repeated_product(z0, n):
    z = Jet.variable(z0, 4)
    prod = Jet.constant(1, z0, 4)
    for _ in range(n):
        prod = prod * z
    assert np.allclose((z**n).coeffs, prod.coeffs)


@given(cplx, cplx.filter(lambda c: abs(c) > 0.1))
def test_division_inverts_multiplication(z0, c):
    a = Jet.variable(z0, 5) * 3 + 1
    b = Jet.variable(z0, 5) + c
    if abs(b.value) < 0.1:
        return
    assert np.allclose(((a * b) / b).coeffs, a.coeffs, atol=1e-9)


def test_division_by_vanishing_constant_term_is_a_pole():
    z = Jet.variable(0.0, 2)
    with pytest.raises(PoleError):
        1 / z
    with pytest.raises(PoleError):
        z / 0


def test_mixed_orders_and_centers_rejected():
    with pytest.raises(ValueError):
        Jet.variable(0, 2) + Jet.variable(0, 3)
    with pytest.raises(ValueError):
        Jet.variable(0, 2) + Jet.variable(1, 2)


def test_numpy_scalars_defer_to_jet():
    z = Jet.variable(1.0, 2)
    out = np.float64(2.0) * z
    assert isinstance(out, Jet)
    assert np.allclose(out.coeffs, [2, 2, 0])


def test_compose_chain_rule():
    # f(w) = 1/w at w = g(t) = t^2 + 1 about t = 1
    g = jet_eval(lambda t: t * t + 1, 1.0, 3)
    f = jet_eval(lambda w: 1 / w, 2.0, 3)
    h = f.compose(g)
    direct = jet_eval(lambda t: 1 / (t * t + 1), 1.0, 3)
    assert np.allclose(h.coeffs, direct.coeffs)


def test_derivative_at_plain_and_jet():
    f = lambda z: z**4
    assert derivative_at(f, 2.0) == pytest.approx(32)
    d = derivative_at(f, Jet.variable(2.0, 2))
    assert np.allclose(d.coeffs, [32, 48, 24])


def test_jet_arith_dispatch():
    a, b = Jet.variable(1.0, 1), 2.0
    assert jet_arith(a, b, "mul").value == 2
    with pytest.raises(ValueError):
        jet_arith(a, b, "pow")


@pytest.mark.parametrize("k", [-3, -2, 0, 1, 4])
def test_contour_integral_of_powers(k):
    c = ContourSpec(0.5, 1.0, 64)
    val = contour_integral(lambda z: (z - 0.5) ** k, c)
    assert abs(val - (1 if k == -1 else 0)) < 1e-13


def test_contour_integral_residue():
    c = ContourSpec(0, 2.0, 128)
    val = contour_integral(lambda z: cmath.exp(z) / (z - 1), c)
    assert val == pytest.approx(cmath.e, rel=1e-12)


def test_pole_on_contour():
    c = ContourSpec(0, 1.0, 16)
    with pytest.raises(ContourError, match="singularity on contour"):
        contour_integral(lambda z: 1 / (z - 1), c)


def test_with_error_estimate_shrinks():
    c = ContourSpec(0, 1.5, 32)
    val, err = contour_integral_with_error(lambda z: 1 / (z - 0.5) / (z + 3), c)
    assert abs(val - 1 / 3.5) < 1e-12
    assert err < 1e-6


@pytest.mark.parametrize("kw", [{"radius": 0}, {"nodes": 15}, {"nodes": 8}])
def test_contour_spec_validation(kw):
    with pytest.raises(ValueError):
        ContourSpec(**kw)


@settings(max_examples=25)
@given(cplx, st.floats(0.2, 2))
def test_cauchy_derivative_matches_jet(z0, r):
    f = lambda z: 1 / (z - 5) + z**3
    c = ContourSpec(z0, r, 64)
    d1 = contour_integral(lambda z: f(z) / (z - z0) ** 2, c)
    assert abs(d1 - jet_eval(f, z0, 1).coeffs[1]) < 1e-9
