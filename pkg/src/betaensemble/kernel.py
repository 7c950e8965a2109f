"""Recursion kernel of the residue formula in the Zhukovsky variable."""

from .errors import PoleError
from .numerics import value_of

_POLE_TOL = 1e-13


def _check(z1, z):
    z1v, zv = value_of(z1), value_of(z)
    if abs(z1v) < _POLE_TOL or abs(z1v - 1) < _POLE_TOL or abs(z1v + 1) < _POLE_TOL:
        raise PoleError(f"kernel pole: z1={z1v!r} is 0 or a branch point")
    if abs(zv) < _POLE_TOL or abs(zv - z1v) < _POLE_TOL or abs(zv - 1 / z1v) < _POLE_TOL:
        raise PoleError(f"kernel pole at z={zv!r}")


def kernel_S(z1, z):
    """``S(z1, z) = (z - 1/z)^2 / ((z1 - 1/z1)(z - z1)(z - 1/z1))``.

    Either argument may be a jet.  As a function of ``z`` it has residue +1 at
    ``z1``, -1 at ``1/z1``, double zeros at ``z = +-1`` and satisfies
    ``S(z1, 1/z) / z^2 = S(z1, z)``.
    """
    _check(z1, z)
    w = z - 1 / z
    return w * w / ((z1 - 1 / z1) * (z - z1) * (z - 1 / z1))


def kernel_S_dz(z1, z):
    """Partial derivative of :func:`kernel_S` in its second argument."""
    _check(z1, z)
    s = kernel_S(z1, z)
    return s * (2 * (1 + 1 / (z * z)) / (z - 1 / z) - 1 / (z - z1) - 1 / (z - 1 / z1))
