"""One-cut spectral curve of a quartic potential.

The curve is ``y(x) = M(x) sqrt((x-a)(x-b))`` with ``M`` quadratic.  ``a`` and
``b`` are fixed by requiring ``W0(x) = y(x) + V'(x)/2`` to behave like
``t0/x + O(1/x^2)`` at infinity.  We parametrize with the Zhukovsky map

    x(z) = (a+b)/2 + (b-a)/4 * (z + 1/z)

which sends the physical sheet to ``|z| > 1`` and the cut ``[a, b]`` to the
unit circle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import CurveError, DomainError, PoleError, SolverError
from .numerics import Jet, value_of

_MAP_POLE_TOL = 1e-13
_ON_CUT_TOL = 1e-12


@dataclass(frozen=True)
class Potential:
    """``V(x) = t4 x^4/4 + t3 x^3/3 + t2 x^2/2 + t1 x`` with 't Hooft parameter ``t0``."""

    t1: float = 0.0
    t2: float = 0.0
    t3: float = 0.0
    t4: float = 0.0
    t0: float = 1.0

    def __post_init__(self):
        if not self.t0 > 0:
            raise CurveError("t0 must be positive")
        if self.degree == 2 and not self.t2 > 0:
            raise CurveError("a quadratic potential needs t2 > 0")
        if self.degree == 4 and not self.t4 > 0:
            raise CurveError("a quartic potential needs t4 > 0")

    @classmethod
    def even_quartic(cls, t0=1.0):
        """``V = x^4 + x^2/2``, the example used throughout the tests."""
        return cls(t2=1.0, t4=4.0, t0=t0)

    @classmethod
    def gaussian(cls, t0=1.0):
        return cls(t2=1.0, t0=t0)

    @property
    def degree(self):
        if self.t4 != 0:
            return 4
        if self.t3 != 0:
            raise CurveError("cubic potentials are not one-cut on the real line")
        if self.t2 != 0:
            return 2
        raise CurveError("potential must have degree 2 or 4")

    @property
    def is_even(self):
        return self.t1 == 0 and self.t3 == 0

    def V(self, x):
        return ((self.t4 / 4 * x + self.t3 / 3) * x + self.t2 / 2) * x * x + self.t1 * x

    def dV(self, x):
        return ((self.t4 * x + self.t3) * x + self.t2) * x + self.t1

    def d2V(self, x):
        return (3 * self.t4 * x + 2 * self.t3) * x + self.t2

    def minimum(self):
        """Location of the global minimum of V on the real line."""
        roots = np.roots([self.t4, self.t3, self.t2, self.t1]) if self.t4 else np.roots(
            [self.t2, self.t1]
        )
        real = [r.real for r in roots if abs(r.imag) < 1e-9 * (1 + abs(r))]
        return min(real, key=self.V)


@dataclass(frozen=True)
class BetaParams:
    beta: float
    n_eigen: int
    gamma: float
    hbar: float

    def __post_init__(self):
        if not self.beta > 0:
            raise ValueError("beta must be positive")
        if self.n_eigen < 1:
            raise ValueError("n_eigen must be >= 1")

    @classmethod
    def make(cls, beta, n_eigen, t0):
        sb = math.sqrt(beta)
        gamma = 0.0 if beta == 1 else sb - 1 / sb
        return cls(beta=beta, n_eigen=n_eigen, gamma=gamma, hbar=t0 / (n_eigen * sb))


def _sqrt_series(s, p, n):
    """Coefficients of ``sqrt(1 - s u + p u^2)`` in powers of ``u`` up to ``u^n``.

    Works with plain numbers or jets for ``s``/``p``.
    """
    f = [1.0, -s, p] + [0.0] * max(0, n - 2)
    g = [1.0]
    for k in range(1, n + 1):
        acc = f[k]
        for i in range(1, k):
            acc = acc - g[i] * g[k - i]
        g.append(acc / 2)
    return g


def _moments(pot, s, p):
    """``(m0, m1, m2)`` and the series of sqrt(sigma)/x for the endpoint sum/product."""
    c = _sqrt_series(s, p, 4)
    m2 = -pot.t4 / 2
    m1 = -pot.t3 / 2 - m2 * c[1]
    m0 = -pot.t2 / 2 - m2 * c[2] - m1 * c[1]
    return (m0, m1, m2), c


def _laurent_W0(pot, s, p, n_terms):
    """Coefficients of ``W0(x) = V'(x)/2 + M(x) sqrt(sigma(x))`` for ``x^3 ... x^(3-n_terms+1)``."""
    c = _sqrt_series(s, p, n_terms + 2)
    (m0, m1, m2), _ = _moments(pot, s, p)
    half_dv = [pot.t4 / 2, pot.t3 / 2, pot.t2 / 2, pot.t1 / 2]
    out = []
    # M(x) sqrt(sigma) = sum_k (m2 c_k + m1 c_{k-1} + m0 c_{k-2}) x^(3-k)
    for k in range(n_terms):
        term = m2 * c[k]
        if k >= 1:
            term = term + m1 * c[k - 1]
        if k >= 2:
            term = term + m0 * c[k - 2]
        if k < 4:
            term = term + half_dv[k]
        out.append(term)
    return out


def _conditions(pot, s, p):
    """The two matching conditions: x^0 coefficient of W0 and (x^-1 coefficient - t0)."""
    lc = _laurent_W0(pot, s, p, 5)
    return lc[3], lc[4] - pot.t0


def printed_endpoint_residuals(pot, a, b):
    """The two polynomial endpoint equations in their expanded printed form."""
    t1, t2, t3, t4, t0 = pot.t1, pot.t2, pot.t3, pot.t4, pot.t0
    r1 = (
        2 * t3 * (2 * a * b + 3 * a**2 + 3 * b**2)
        + 8 * t2 * (a + b)
        + 16 * t1
        + t4 * (3 * a**2 * b + 3 * a * b**2 + 5 * a**3 + 5 * b**3)
    )
    r2 = (
        16 * t3 * (a**2 * b + a * b**2 - a**3 - b**3)
        - 16 * t2 * (a**2 + b**2)
        + t4 * (6 * a**2 * b**2 + 12 * a**3 * b + 12 * a * b**3 - 15 * (a**4 + b**4))
        + 256 * t0
    )
    return r1, r2


@dataclass(frozen=True)
class SpectralCurve:
    potential: Potential
    a: float
    b: float
    m0: float
    m1: float
    m2: float
    d: int
    zeros_x: tuple = field(default=())
    zeros_z: tuple = field(default=())
    newton_residual: float = 0.0

    @property
    def alpha(self):
        """``(b - a)/4``, the scale of the Zhukovsky map."""
        return (self.b - self.a) / 4

    @property
    def mid(self):
        return (self.a + self.b) / 2

    def M(self, x):
        return (self.m2 * x + self.m1) * x + self.m0

    def dM(self, x):
        return 2 * self.m2 * x + self.m1

    def x_of_z(self, z):
        _check_map_pole(z)
        return self.mid + self.alpha * (z + 1 / z)

    def dx_dz(self, z):
        _check_map_pole(z)
        return self.alpha * (1 - 1 / (z * z))

    def z_of_x(self, x):
        """Preimage of ``x`` on the physical sheet ``|z| > 1``."""
        u = (complex(x) - self.mid) / self.alpha
        r = np.sqrt(complex(u - 2)) * np.sqrt(complex(u + 2))
        z = (u + r) / 2 if abs(u + r) >= abs(u - r) else (u - r) / 2
        if abs(abs(z) - 1) <= _ON_CUT_TOL:
            raise DomainError("branch point / on-cut input")
        return complex(z)

    def y_tilde(self, z):
        return self.M(self.x_of_z(z)) * self.alpha * (z - 1 / z)

    def dy_tilde(self, z):
        x = self.x_of_z(z)
        return self.dM(x) * self.dx_dz(z) * self.alpha * (z - 1 / z) + self.M(x) * self.alpha * (
            1 + 1 / (z * z)
        )

    def W0(self, x):
        """The resolvent in the x variable on the physical sheet."""
        z = self.z_of_x(x)
        return self.y_tilde(z) + self.potential.dV(x) / 2

    def sqrt_sigma(self, z):
        """Physical-sheet branch of ``sqrt((x-a)(x-b))`` at ``x = x(z)``."""
        return self.alpha * (z - 1 / z)

    def laurent_W0(self, n_terms=6):
        """Coefficients of ``W0`` in ``x^3, x^2, ..., x^(4 - n_terms)`` at infinity."""
        s, p = self.a + self.b, self.a * self.b
        return [complex(c).real for c in _laurent_W0(self.potential, s, p, n_terms)]

    def residuals(self):
        """Matching conditions at infinity and the printed endpoint equations."""
        lc = self.laurent_W0(5)
        r1, r2 = printed_endpoint_residuals(self.potential, self.a, self.b)
        return {
            "asymptotic": {
                "polynomial_part": lc[:4],
                "inverse_x_minus_t0": lc[4] - self.potential.t0,
                "newton": self.newton_residual,
            },
            "printed_eq_ab": [r1, r2],
        }


def _check_map_pole(z):
    if abs(value_of(z)) < _MAP_POLE_TOL:
        raise PoleError("pole of map at z=0")


def solve_endpoints(pot, guess=None, tol=1e-12, max_iter=200):
    """Solve for the one-cut support ``[a, b]`` by damped Newton.

    The unknowns are the center ``c`` and log half-width ``eta`` of the cut, so
    iterates always keep ``a < b``.  Residuals are scaled by ``1 + t0``.
    """
    if guess is None:
        x0 = pot.minimum()
        w = max(1.0, pot.t0 ** 0.25)
        a0, b0 = x0 - w, x0 + w
    else:
        a0, b0 = map(float, guess)
        if not a0 < b0:
            raise SolverError("initial guess must satisfy a < b")
    scale = 1.0 + pot.t0
    even = pot.is_even

    def F(c, eta):
        h = _exp(eta)
        s = 2 * c
        p = c * c - h * h
        f1, f2 = _conditions(pot, s, p)
        return f1 / scale, f2 / scale

    def norm(v):
        return max(abs(complex(value_of(t))) for t in v)

    c, eta = ((a0 + b0) / 2, math.log((b0 - a0) / 2))
    if even:
        c = 0.0
    f = [complex(t).real for t in F(c, eta)]
    res = norm(f)
    for _ in range(max_iter):
        if res < tol:
            break
        jc = F(Jet.variable(c, 1), eta)
        je = F(c, Jet.variable(eta, 1))
        J = np.array(
            [[jc[0].coeffs[1].real, je[0].coeffs[1].real], [jc[1].coeffs[1].real, je[1].coeffs[1].real]]
        )
        if even:
            step = np.array([0.0, -f[1] / J[1, 1]]) if J[1, 1] != 0 else None
        else:
            try:
                step = -np.linalg.solve(J, np.array(f))
            except np.linalg.LinAlgError:
                step = None
        if step is None or not np.all(np.isfinite(step)):
            raise SolverError("endpoint solve failed: singular Jacobian")
        # cap the log-width step so one iteration can at most triple or third the cut
        step[1] = max(-1.1, min(1.1, step[1]))
        lam = 1.0
        while lam > 1e-6:
            cn, en = c + lam * step[0], eta + lam * step[1]
            fn = [complex(t).real for t in F(cn, en)]
            rn = norm(fn)
            if np.isfinite(rn) and rn < res * (1 - 1e-4 * lam) or rn < tol:
                break
            lam /= 2
        else:
            raise SolverError("endpoint solve failed: line search stalled")
        c, eta, f, res = cn, en, fn, rn
    else:
        raise SolverError(f"endpoint solve failed: residual {res:.3e} after {max_iter} iterations")

    h = math.exp(eta)
    a, b = c - h, c + h
    if even:
        a, b = -h, h
    return build_curve(pot, a, b, newton_residual=res)


def _exp(eta):
    if isinstance(eta, Jet):
        # exp as a truncated series about the jet's value
        e0 = math.exp(eta.value.real)
        out = Jet.constant(0.0, eta.center, eta.order)
        shift = eta - eta.value
        term = Jet.constant(1.0, eta.center, eta.order)
        for k in range(eta.order + 1):
            out = out + term * (1.0 / math.factorial(k))
            term = term * shift
        return out * e0
    return math.exp(eta)


def build_curve(pot, a, b, newton_residual=0.0):
    """Assemble the curve for given endpoints and check regularity on the cut."""
    s, p = a + b, a * b
    (m0, m1, m2), _ = _moments(pot, s, p)
    m0, m1, m2 = float(m0), float(m1), float(m2)
    d = pot.degree
    xs = np.linspace(a, b, 200)
    Mx = (m2 * xs + m1) * xs + m0
    if np.max(Mx) >= -1e-8:
        raise CurveError("critical/non-regular potential: M vanishes or changes sign on [a, b]")
    curve = SpectralCurve(pot, float(a), float(b), m0, m1, m2, d, newton_residual=newton_residual)
    zx, zz = moment_zeros(curve)
    return SpectralCurve(
        pot, float(a), float(b), m0, m1, m2, d, tuple(zx), tuple(zz), newton_residual
    )


def moment_zeros(curve):
    """Zeros of ``M`` and their preimages outside the unit disk."""
    if curve.m2 == 0:
        if curve.m1 != 0:
            raise CurveError("moment polynomial of unexpected degree")
        return [], []
    disc = np.sqrt(complex(curve.m1 * curve.m1 - 4 * curve.m2 * curve.m0))
    xs = [(-curve.m1 + disc) / (2 * curve.m2), (-curve.m1 - disc) / (2 * curve.m2)]
    # order so that the zero with the larger imaginary (then real) part comes first
    xs.sort(key=lambda x: (-round(x.imag, 14), -x.real))
    zs = []
    for x in xs:
        try:
            zs.append(curve.z_of_x(x))
        except DomainError:
            raise CurveError("zero of M on the cut (critical curve)") from None
    return xs, zs
