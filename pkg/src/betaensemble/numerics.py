"""Truncated Taylor jets and a trapezoid contour-integral oracle.

A :class:`Jet` carries the Taylor coefficients ``c_k = f^(k)(center) / k!``
of a complex function up to a fixed order.  Arithmetic between jets (and
between jets and plain numbers) propagates those coefficients exactly, so
any function written with ``+ - * /`` and integer powers can be
differentiated by evaluating it on :meth:`Jet.variable`.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from numbers import Number

import numpy as np

from .errors import ContourError, PoleError

DEFAULT_ORDER_CAP = 6
DEFAULT_NODES = 512

# a jet constant term at or below this modulus is treated as a pole
_POLE_ATOL = 1e-300


class Jet:
    __slots__ = ("center", "coeffs")
    # make numpy scalars defer to the jet operators
    __array_ufunc__ = None

    def __init__(self, center, coeffs):
        coeffs = np.array(coeffs, dtype=complex).ravel()
        if coeffs.size == 0:
            raise ValueError("a jet needs at least one coefficient")
        self.center = complex(center)
        self.coeffs = coeffs

    @classmethod
    def variable(cls, center, order):
        """The identity function ``z`` expanded about ``center``."""
        c = np.zeros(order + 1, dtype=complex)
        c[0] = center
        if order >= 1:
            c[1] = 1.0
        return cls(center, c)

    @classmethod
    def constant(cls, value, center, order):
        c = np.zeros(order + 1, dtype=complex)
        c[0] = value
        return cls(center, c)

    @property
    def order(self):
        return self.coeffs.size - 1

    @property
    def value(self):
        return complex(self.coeffs[0])

    def derivatives(self):
        """Return ``[f(center), f'(center), ..., f^(K)(center)]``."""
        k = np.arange(self.coeffs.size)
        fact = np.array([math.factorial(int(i)) for i in k], dtype=float)
        return self.coeffs * fact

    def derivative(self):
        """Jet of ``f'`` about the same center, one order lower."""
        if self.order == 0:
            raise ValueError("cannot differentiate an order-0 jet")
        k = np.arange(1, self.coeffs.size)
        return Jet(self.center, self.coeffs[1:] * k)

    def truncate(self, order):
        return Jet(self.center, self.coeffs[: order + 1])

    def is_variable(self):
        c = self.coeffs
        if c[0] != self.center:
            return False
        if self.order == 0:
            return True
        return c[1] == 1 and not np.any(c[2:])

    def compose(self, inner):
        """Return ``self(inner(t))`` where ``inner`` is a jet whose value is our center."""
        if abs(inner.value - self.center) > 1e-12 * max(1.0, abs(self.center)):
            raise ValueError("inner jet is not centered at this jet's expansion point")
        K = min(self.order, inner.order)
        shift = inner.coeffs[: K + 1].copy()
        shift[0] = 0.0
        out = np.zeros(K + 1, dtype=complex)
        power = np.zeros(K + 1, dtype=complex)
        power[0] = 1.0
        for ck in self.coeffs[: K + 1]:
            out += ck * power
            power = np.convolve(power, shift)[: K + 1]
        return Jet(inner.center, out)

    def _coerce(self, other):
        if isinstance(other, Jet):
            if other.center != self.center and abs(other.center - self.center) > 1e-14 * (
                1 + abs(self.center)
            ):
                raise ValueError("jets expanded about different centers")
            if other.order != self.order:
                raise ValueError("jets truncated at different orders")
            return other.coeffs
        if isinstance(other, Number):
            c = np.zeros_like(self.coeffs)
            c[0] = other
            return c
        return NotImplemented

    def __add__(self, other):
        c = self._coerce(other)
        if c is NotImplemented:
            return c
        return Jet(self.center, self.coeffs + c)

    __radd__ = __add__

    def __sub__(self, other):
        c = self._coerce(other)
        if c is NotImplemented:
            return c
        return Jet(self.center, self.coeffs - c)

    def __rsub__(self, other):
        c = self._coerce(other)
        if c is NotImplemented:
            return c
        return Jet(self.center, c - self.coeffs)

    def __neg__(self):
        return Jet(self.center, -self.coeffs)

    def __pos__(self):
        return self

    def __mul__(self, other):
        if isinstance(other, Number):
            return Jet(self.center, self.coeffs * other)
        c = self._coerce(other)
        if c is NotImplemented:
            return c
        return Jet(self.center, np.convolve(self.coeffs, c)[: self.coeffs.size])

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, Number):
            if other == 0:
                raise PoleError("pole at evaluation point")
            return Jet(self.center, self.coeffs / other)
        c = self._coerce(other)
        if c is NotImplemented:
            return c
        return Jet(self.center, _series_div(self.coeffs, c))

    def __rtruediv__(self, other):
        c = self._coerce(other)
        if c is NotImplemented:
            return c
        return Jet(self.center, _series_div(c, self.coeffs))

    def __pow__(self, n):
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            return 1.0 / (self ** (-n))
        out = Jet.constant(1.0, self.center, self.order)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def __repr__(self):
        return f"Jet(center={self.center!r}, coeffs={self.coeffs!r})"


def _series_div(num, den):
    d0 = den[0]
    if abs(d0) <= _POLE_ATOL or not np.isfinite(d0):
        raise PoleError("pole at evaluation point")
    q = np.zeros_like(num)
    for k in range(num.size):
        acc = num[k] - np.dot(q[:k], den[k:0:-1])
        q[k] = acc / d0
    return q


def value_of(z):
    """Numeric value of a complex number or of a jet's constant term."""
    return z.value if isinstance(z, Jet) else complex(z)


def jet_arith(a, b, kind):
    ops = {
        "add": lambda: a + b,
        "sub": lambda: a - b,
        "mul": lambda: a * b,
        "div": lambda: a / b,
    }
    try:
        return ops[kind]()
    except KeyError:
        raise ValueError(f"unknown jet operation {kind!r}") from None


def jet_eval(f, z, order):
    """Evaluate ``f`` on the identity jet at ``z``; derivative k is ``k! * coeffs[k]``."""
    return f(Jet.variable(z, order))


def derivative_at(f, z):
    """``f'(z)`` for a plain point, or the jet of ``f'`` for an identity jet ``z``.

    ``f`` must accept jets.  For a jet argument the function is re-evaluated one
    order higher, so ``z`` has to be an identity jet (see :meth:`Jet.is_variable`).
    """
    if isinstance(z, Jet):
        return f(Jet.variable(z.center, z.order + 1)).derivative()
    return f(Jet.variable(z, 1)).coeffs[1]


@dataclass(frozen=True)
class ContourSpec:
    center: complex = 0.0
    radius: float = 1.0
    nodes: int = DEFAULT_NODES

    def __post_init__(self):
        if not self.radius > 0:
            raise ValueError("contour radius must be positive")
        if self.nodes < 16 or self.nodes % 2:
            raise ValueError("contour needs an even number of nodes >= 16")

    def points(self):
        phi = 2 * np.pi * np.arange(self.nodes) / self.nodes
        return complex(self.center) + self.radius * np.exp(1j * phi)


def contour_integral(f, c):
    """``(1/2 pi i) * integral of f(z) dz`` over the positively oriented circle ``c``.

    Trapezoid rule in the angle, spectrally accurate for integrands analytic on
    a neighbourhood of the circle.
    """
    pts = c.points()
    total = 0j
    for z in pts:
        try:
            v = complex(f(complex(z)))
        except ZeroDivisionError as exc:
            raise ContourError(f"singularity on contour at z={complex(z)!r}") from exc
        if not cmath.isfinite(v):
            raise ContourError(f"singularity on contour at z={complex(z)!r}")
        total += v * (z - c.center)
    return total / c.nodes


def contour_integral_with_error(f, c):
    """Return the integral on ``2 * c.nodes`` nodes and its change from ``c.nodes``."""
    coarse = contour_integral(f, c)
    fine = contour_integral(f, ContourSpec(c.center, c.radius, 2 * c.nodes))
    return fine, abs(fine - coarse)
