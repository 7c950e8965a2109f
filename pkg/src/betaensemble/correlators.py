"""Correlation functions W_g(z1, ..., zn) of the one-cut beta-ensemble.

Orders are addressed by ``twice_g`` (so ``g = 1/2`` is ``twice_g = 1``).  The
leading one- and two-point functions and ``W_{1/2}(z)`` are closed forms; every
other order comes from the residue formula

    W_g(z1, K) = Rec_g(z1, K) / (2 y(z1))
               + sum_i S(z1, z_i) Rec_g(z_i, K) / (2 y'(z_i))
               - sum_j d/dz [S(z1, z) W_g(z, K - j) h_j(z) / y(z)] at z = z_j

where the ``z_i`` are the zeros of ``M`` outside the unit disk and
``h_j(z) / (z - z_j)^2`` is the double pole of the shifted two-point function.
All derivatives go through :class:`~betaensemble.numerics.Jet`.
"""

from __future__ import annotations

import threading
from itertools import combinations

import numpy as np

from .errors import DomainError, PoleError
from .kernel import kernel_S, kernel_S_dz
from .numerics import ContourSpec, Jet, contour_integral, derivative_at, value_of

_COINCIDENT_TOL = 1e-12
_SHEET_TOL = 1e-12
_MEMO_DIGITS = 12
_DIAG_NODES = 24
_CAUCHY_NODES = 64


def _zero_like(z):
    return 0 * z if isinstance(z, Jet) else 0j


def _rkey(z):
    z = complex(z)
    return (round(z.real, _MEMO_DIGITS), round(z.imag, _MEMO_DIGITS))


class CorrelatorEngine:
    """Evaluates ``W_g`` for one spectral curve and one value of beta.

    Points are Zhukovsky coordinates on the physical sheet ``|z| >= 1``.  The
    first argument may be a :class:`Jet`, in which case the result is the
    Taylor jet of the correlator in that argument.
    """

    def __init__(self, curve, params, max_twice_g=4, memo=True):
        self.curve = curve
        self.params = params
        self.gamma = params.gamma
        self.max_twice_g = max_twice_g
        self.zeros = tuple(curve.zeros_z)
        self._memo = {} if memo else None
        self._lock = threading.Lock()

    # -- geometry -----------------------------------------------------------

    def x(self, z):
        return self.curve.x_of_z(z)

    def dx(self, z):
        return self.curve.dx_dz(z)

    def y(self, z):
        return self.curve.y_tilde(z)

    def dy(self, z):
        return self.curve.dy_tilde(z)

    def _double_pole_coef(self, z, zj):
        # 1/(2 (x(z) - x(zj))^2) = coef(z) / (z - zj)^2
        a = self.curve.alpha
        u = 1 - 1 / (z * zj)
        return 1 / (2 * a * a * u * u)

    # -- closed forms -------------------------------------------------------

    def w0_one(self, z):
        return self.y(z) + self.curve.potential.dV(self.x(z)) / 2

    def w0_two(self, z1, z2):
        if abs(value_of(z1) * value_of(z2) - 1) < _COINCIDENT_TOL:
            raise PoleError("mirror-pole evaluation: z1 * z2 = 1")
        ba = self.curve.b - self.curve.a
        p = z1 * z2
        q = p - 1
        return 16 * p * p / (ba * ba * (z1 * z1 - 1) * (z2 * z2 - 1) * q * q)

    def w0_two_shifted(self, z1, z2):
        if abs(value_of(z1) - value_of(z2)) < _COINCIDENT_TOL:
            raise PoleError("double pole of shifted correlator at z1 = z2")
        d = z1 - z2
        return self.w0_two(z1, z2) + self._double_pole_coef(z1, z2) / (d * d)

    def w_half_one(self, z):
        """``W_{1/2}(z)`` with the residue at infinity folded in."""
        if self.gamma == 0:
            return _zero_like(z)
        c = self.curve
        t = 2 * (c.d - 1) * self.gamma / ((c.b - c.a) * (z - 1 / z))
        t = t - self.gamma * self.dy(z) / (2 * self.dx(z) * self.y(z))
        for zi in self.zeros:
            t = t - self.gamma * kernel_S(z, zi) / (2 * self.dx(zi))
        return t

    def w_one_one(self, z):
        """``W_1(z)`` written out term by term.

        The first line is the hermitian answer; the gamma line collects the
        ``gamma d W_{1/2}`` and ``W_{1/2}^2`` sources, both of order gamma^2.
        """
        y1, xp = self.y(z), self.dx(z)
        s = z * z - 1
        t = -1 / (2 * y1 * xp * xp * s * s)
        for zi in self.zeros:
            si = zi * zi - 1
            t = t - kernel_S(z, zi) / (2 * self.dx(zi) ** 2 * si * si * self.dy(zi))
        if self.gamma == 0:
            return t
        g = self.gamma
        wh = self._w_half(z)
        t = t - (g * derivative_at(self._w_half, z) / xp + wh * wh) / (2 * y1)
        for zi in self.zeros:
            dwi = derivative_at(self._w_half, zi)
            whi = self._w_half(zi)
            t = t - kernel_S(z, zi) * (g * dwi / self.dx(zi) + whi * whi) / (2 * self.dy(zi))
        return t

    def w_half_two(self, z1, z2):
        """``W_{1/2}(z1, z2)`` written out term by term."""
        if self.gamma == 0:
            return _zero_like(z1)
        g = self.gamma
        y1 = self.y(z1)
        t = -g * derivative_at(lambda u: self.w0_two(u, z2), z1) / (2 * self.dx(z1) * y1)
        t = t - self.w0_two_shifted(z1, z2) * self._w_half(z1) / y1
        for zi in self.zeros:
            s = kernel_S(z1, zi)
            dw0 = derivative_at(lambda u: self.w0_two(u, z2), zi)
            t = t - g * s * dw0 / (2 * self.dx(zi) * self.dy(zi))
            t = t - s * self.w0_two_shifted(zi, z2) * self._w_half(zi) / self.dy(zi)
        u = Jet.variable(z2, 1)
        p = self._w_half(u) / self.y(u) * self._double_pole_coef(u, z2)
        t = t - (kernel_S(z1, z2) * p.coeffs[1] + kernel_S_dz(z1, z2) * p.coeffs[0])
        return t

    def _w_half(self, z):
        return self._w(1, z, ())

    # -- recursion ----------------------------------------------------------

    def rec(self, twice_g, z, zK=()):
        """The right-hand side ``Rec_g(z, zK)`` of the loop equation."""
        zK = tuple(complex(p) for p in zK)
        n = len(zK)
        total = _zero_like(z)
        idx = range(n)
        for th in range(twice_g + 1):
            for r in range(n + 1):
                for I in combinations(idx, r):
                    if th == 0 and r == 0:
                        continue
                    if th == twice_g and r == n:
                        continue
                    zI = tuple(zK[i] for i in I)
                    zJ = tuple(zK[i] for i in idx if i not in I)
                    a = self._ws(th, z, zI)
                    b = self._ws(twice_g - th, z, zJ)
                    total = total - a * b
        if twice_g >= 2:
            total = total - self._diagonal(twice_g - 2, z, zK)
        if twice_g >= 1 and self.gamma != 0:
            dw = derivative_at(lambda u: self._w(twice_g - 1, u, zK), z)
            total = total - self.gamma * dw / self.dx(z)
        return total

    def _ws(self, twice_g, z, zK):
        if twice_g == 0 and len(zK) == 1:
            return self.w0_two_shifted(z, zK[0])
        return self._w(twice_g, z, zK)

    def _w(self, twice_g, z, zK, closed_form=True):
        n = 1 + len(zK)
        if twice_g % 2 == 1 and self.gamma == 0:
            return _zero_like(z)
        if twice_g == 0 and n == 1:
            return self.w0_one(z)
        if twice_g == 0 and n == 2:
            return self.w0_two(z, zK[0])
        if self._memo is None:
            return self._compute(twice_g, z, zK, closed_form)
        key = (
            twice_g,
            closed_form,
            _rkey(value_of(z)),
            z.order if isinstance(z, Jet) else -1,
            tuple(_rkey(p) for p in zK),
        )
        hit = self._memo.get(key)
        if hit is not None:
            return hit
        val = self._compute(twice_g, z, zK, closed_form)
        with self._lock:
            self._memo[key] = val
        return val

    def _compute(self, twice_g, z, zK, closed_form):
        reach = self._removable_reach(value_of(z), zK)
        if reach is not None:
            return self._cauchy(lambda u: self._compute_direct(twice_g, u, zK, closed_form), z, reach)
        return self._compute_direct(twice_g, z, zK, closed_form)

    def _removable_reach(self, z0, zK):
        """Radius of a safe Cauchy circle if ``z0`` sits near a zero of ``M``, else None.

        The closed forms and residue sums are termwise singular at the zeros of
        ``M`` although their sum is regular there.
        """
        for zi in self.zeros:
            reach = abs(zi) - 1
            for p in (*self.zeros, *zK):
                if p != zi:
                    reach = min(reach, abs(zi - p))
            if abs(z0 - zi) < 0.1 * reach:
                return 0.5 * reach
        return None

    def _cauchy(self, fn, z, radius):
        z0 = value_of(z)
        order = z.order if isinstance(z, Jet) else 0
        m = _CAUCHY_NODES
        omega = np.exp(2j * np.pi * np.arange(m) / m)
        vals = np.array([complex(fn(z0 + radius * w)) for w in omega])
        k = np.arange(order + 1)
        coeffs = (vals[:, None] * (radius * omega[:, None]) ** (-k[None, :])).mean(axis=0)
        if isinstance(z, Jet):
            return Jet(z0, coeffs)
        return complex(coeffs[0])

    def _compute_direct(self, twice_g, z, zK, closed_form):
        if closed_form and twice_g == 1 and not zK:
            return self.w_half_one(z)
        return self.residue_formula(twice_g, z, zK)

    def residue_formula(self, twice_g, z1, zK=()):
        """Sum of residues of ``S(z1, z) Rec_g(z, zK) / (2 y(z))`` outside the unit disk."""
        zK = tuple(complex(p) for p in zK)
        t = self.rec(twice_g, z1, zK) / (2 * self.y(z1))
        for zi in self.zeros:
            t = t + kernel_S(z1, zi) * self.rec(twice_g, zi, zK) / (2 * self.dy(zi))
        for j, zj in enumerate(zK):
            rest = zK[:j] + zK[j + 1 :]
            u = Jet.variable(zj, 1)
            p = self._ws(twice_g, u, rest) * self._double_pole_coef(u, zj) / self.y(u)
            t = t - (kernel_S(z1, zj) * p.coeffs[1] + kernel_S_dz(z1, zj) * p.coeffs[0])
        return t

    def _diagonal(self, twice_g, z, zK):
        """``W_g(z, z, zK)`` and its jet, from a Cauchy transform in the second slot."""
        if twice_g % 2 == 1 and self.gamma == 0:
            return _zero_like(z)
        if twice_g == 0 and not zK:
            return self.w0_two(z, z)
        z0 = value_of(z)
        order = z.order if isinstance(z, Jet) else 0
        reach = abs(z0) - 1
        for p in zK:
            reach = min(reach, abs(z0 - p))
        if reach <= 0:
            raise DomainError("diagonal evaluation needs a point strictly off the unit circle")
        rho = 0.3 * reach
        m = _DIAG_NODES
        omega = np.exp(2j * np.pi * np.arange(m) / m)
        first = Jet.variable(z0, order)
        table = np.empty((m, order + 1), dtype=complex)
        for k in range(m):
            w = z0 + rho * omega[k]
            table[k] = self._w(twice_g, first, (w,) + tuple(zK)).coeffs
        # F[p, q]: coefficient of s1^p s2^q in W(z0 + s1, z0 + s2, zK)
        q = np.arange(order + 1)
        basis = (rho * omega[:, None]) ** (-q[None, :])
        F = table.T @ basis / m
        coeffs = np.array([sum(F[p, k - p] for p in range(k + 1)) for k in range(order + 1)])
        if isinstance(z, Jet):
            return Jet(z0, coeffs)
        return complex(coeffs[0])

    # -- public surface -----------------------------------------------------

    def w(self, twice_g, z1, zK=(), closed_form=True):
        """``W_g(z1, zK)`` with ``g = twice_g / 2``."""
        if twice_g < 0 or twice_g > self.max_twice_g:
            raise DomainError(f"order twice_g={twice_g} outside 0..{self.max_twice_g}")
        zK = tuple(complex(p) for p in zK)
        pts = [value_of(z1), *zK]
        for p in pts:
            if abs(p) < 1 - _SHEET_TOL:
                raise DomainError(f"not on physical sheet: |z|={abs(p):.6g} < 1")
        for i in range(len(pts)):
            for j in range(i):
                if abs(pts[i] - pts[j]) < _COINCIDENT_TOL:
                    raise DomainError("coincident-point evaluation unsupported")
        if isinstance(z1, Jet) and not z1.is_variable():
            base = self._w(twice_g, Jet.variable(z1.value, z1.order), zK, closed_form)
            return base.compose(z1)
        if twice_g == 0 and len(zK) == 1:
            return self.w0_two(z1, zK[0])
        return self._w(twice_g, z1, zK, closed_form)

    def w_continued(self, twice_g, z):
        """One-point ``W_g(z)`` continued as a rational function to ``|z| < 1``.

        Used to read off Laurent coefficients at the branch points ``z = +-1``.
        Only closed-form orders (``twice_g <= 2``) are allowed, since generic
        orders need diagonal values off the unit circle.
        """
        if not 0 <= twice_g <= min(2, self.max_twice_g):
            raise DomainError(f"continuation not available for twice_g={twice_g}")
        return self._w(twice_g, z, ())

    def w_quadrature(self, twice_g, z1, zK=(), radius=None, nodes=512):
        """Contour-integral evaluation of the residue formula on ``|z| = radius``.

        Independent of the residue bookkeeping; used as an oracle.  The circle
        has to separate the unit disk from ``z1``, ``zK`` and the zeros of ``M``.
        The default radius is the geometric mean of 1 and the nearest of those
        points, which balances the two geometric quadrature error terms.
        """
        zK = tuple(complex(p) for p in zK)
        z1 = complex(z1)
        outside = (z1, *zK, *self.zeros)
        if radius is None:
            radius = float(np.sqrt(min(abs(p) for p in outside)))
        for p in outside:
            if abs(p) <= radius:
                raise DomainError(f"point {p!r} not outside the integration circle")

        def f(z):
            return kernel_S(z1, z) / (2 * self.y(z)) * self.rec(twice_g, z, zK)

        return -contour_integral(f, ContourSpec(0.0, radius, nodes))
