"""Eigenvalue density and its 1/N corrections in the angle variable.

On the cut, ``x = (a+b)/2 + (b-a)/2 cos(theta)`` with ``z = e^{i theta}``.  The
density (and each correction coefficient) is the jump of the one-point
function across the cut, times the Jacobian ``dx/dtheta``, divided by
``2 pi i t0`` so that the leading density has unit mass.  ``theta = 0`` is
the right endpoint ``b``.

Corrections whose correlator has a double pole at ``z = +-1`` also carry
point masses at the endpoints.  They are returned separately as
:attr:`DensitySeries.atoms`; the continuous part alone does not integrate to
zero.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .correlators import CorrelatorEngine
from .errors import DomainError
from .numerics import ContourSpec, contour_integral

DEFAULT_GRID = 512
_EDGE_TOL = 1e-14
_IMAG_TOL = 1e-10
# exponent of theta^p near an edge above which a correction counts as integrable
_INTEGRABLE_EXPONENT = -0.9


@dataclass(frozen=True)
class ThetaGrid:
    points: np.ndarray

    def __post_init__(self):
        p = np.asarray(self.points, dtype=float)
        if p.ndim != 1 or p.size < 2:
            raise ValueError("theta grid needs at least two points")
        if np.any(p <= 0) or np.any(p >= np.pi):
            raise ValueError("theta grid must lie strictly inside (0, pi)")
        if np.any(np.diff(p) <= 0):
            raise ValueError("theta grid must be strictly increasing")
        object.__setattr__(self, "points", p)

    @classmethod
    def uniform(cls, count=DEFAULT_GRID):
        # cell midpoints: the trapezoid rule of the even 2pi-periodic extension
        return cls(np.pi * (np.arange(count) + 0.5) / count)

    @property
    def count(self):
        return self.points.size

    def is_uniform(self):
        return np.allclose(self.points, np.pi * (np.arange(self.count) + 0.5) / self.count, atol=1e-15)

    def integrate(self, values):
        v = np.asarray(values, dtype=float)
        if self.is_uniform():
            return float(v.sum() * np.pi / self.count)
        # composite trapezoid with the values held constant out to the endpoints
        t = np.concatenate(([0.0], self.points, [np.pi]))
        v = np.concatenate(([v[0]], v, [v[-1]]))
        return float(np.trapezoid(v, t))


@dataclass
class DensitySeries:
    grid: ThetaGrid
    rho0: np.ndarray
    corrections: dict
    combined: np.ndarray
    hbar: float
    # twice_g -> (mass at theta=0, mass at theta=pi)
    atoms: dict = field(default_factory=dict)
    integrable: dict = field(default_factory=dict)
    notes: list = field(default_factory=list)

    def integrals(self):
        out = {"rho0": self.grid.integrate(self.rho0)}
        for tg, v in self.corrections.items():
            out[tg] = self.grid.integrate(v)
        out["combined"] = self.grid.integrate(self.combined)
        return out

    def combined_atoms(self):
        left = right = 0.0
        for tg, (m0, mpi) in self.atoms.items():
            left += self.hbar**tg * m0
            right += self.hbar**tg * mpi
        return left, right

    def total_mass(self):
        """Mass of the combined density including endpoint atoms."""
        return self.grid.integrate(self.combined) + sum(self.combined_atoms())


def _check_angle(theta):
    if theta <= _EDGE_TOL or theta >= np.pi - _EDGE_TOL:
        raise DomainError("branch-point angle: theta must lie in (0, pi)")


class DensityModel:
    """Density coefficients of a spectral curve at fixed beta."""

    def __init__(self, curve, params, engine=None):
        self.curve = curve
        self.params = params
        self.engine = engine if engine is not None else CorrelatorEngine(curve, params, max_twice_g=2)
        self.t0 = curve.potential.t0

    def _jump(self, twice_g, theta):
        _check_angle(theta)
        zp = complex(math.cos(theta), math.sin(theta))
        w = self.engine.w
        val = 2 * self.curve.alpha * math.sin(theta) * (w(twice_g, zp.conjugate()) - w(twice_g, zp))
        val /= 2j * math.pi * self.t0
        if abs(val.imag) > _IMAG_TOL * max(1.0, abs(val.real)):
            raise DomainError(f"jump combination is not real at theta={theta!r}: {val!r}")
        return val.real

    def _map(self, fn, theta):
        if np.ndim(theta) == 0:
            return fn(float(theta))
        return np.array([fn(float(t)) for t in np.asarray(theta, dtype=float)])

    def rho_inf(self, theta):
        return self._map(lambda t: self._jump(0, t), theta)

    def rho_correction(self, twice_g, theta):
        """N-free coefficient of ``hbar**twice_g`` in the continuous density."""
        if twice_g < 1:
            raise DomainError("corrections start at twice_g = 1")
        if self.params.gamma == 0 and twice_g % 2:
            return self._map(lambda t: (_check_angle(t), 0.0)[1], theta)
        return self._map(lambda t: self._jump(twice_g, t), theta)

    def edge_exponent(self, twice_g, eps=1e-3):
        """Estimated ``p`` in ``rho_g ~ theta^p`` at the worse of the two edges."""
        worst = math.inf
        for edge in (0.0, math.pi):
            sgn = 1 if edge == 0.0 else -1
            r1 = abs(self.rho_correction(twice_g, edge + sgn * eps))
            r2 = abs(self.rho_correction(twice_g, edge + sgn * 2 * eps))
            if r1 < 1e-300 and r2 < 1e-300:
                continue
            worst = min(worst, math.log(max(r2, 1e-300) / max(r1, 1e-300)) / math.log(2.0))
        return worst

    def is_integrable(self, twice_g):
        return self.edge_exponent(twice_g) > _INTEGRABLE_EXPONENT

    def edge_atoms(self, twice_g):
        """Point masses ``(at theta=0, at theta=pi)`` of an integrable correction.

        A term ``C/(z - s)^2`` of ``W_g`` at ``s = +-1`` is ``alpha C s/(x - x(s))``
        near the endpoint, i.e. a mass ``s alpha C / t0`` there.
        """
        zeros = list(self.curve.zeros_z)
        out = []
        for s in (1.0, -1.0):
            reach = [1.0] + [abs(zi - s) for zi in zeros] + [abs(1 / zi - s) for zi in zeros]
            c = ContourSpec(center=s, radius=0.5 * min(reach), nodes=64)
            coef = contour_integral(lambda z: self.engine.w_continued(twice_g, z) * (z - s), c)
            out.append((s * self.curve.alpha * coef / self.t0).real)
        return tuple(out)

    def printed_half_shape(self, theta):
        """The leading-order closed form of the half-order density as printed for the quartic example."""
        g = self.params.gamma
        th = np.asarray(theta, dtype=float)
        acc = 4.0 + 0 * th
        for zi in self.curve.zeros_z:
            acc = acc - 2 * (zi * zi - 1) / (zi * zi - 2 * zi * np.cos(th) + 1)
        return (-(g / (4 * np.pi)) * acc).real

    def half_shape(self, theta):
        """Closed form of :meth:`rho_correction` at ``twice_g=1``.

        ``gamma/(4 pi t0) * (2(d-1) - sum_i 2(z_i^2-1)/(z_i^2 - 2 z_i cos(theta) + 1))``
        over the zeros ``z_i`` of ``M``.
        """
        g = self.params.gamma
        th = np.asarray(theta, dtype=float)
        acc = 2.0 * (self.curve.d - 1) + 0 * th
        for zi in self.curve.zeros_z:
            acc = acc - 2 * (zi * zi - 1) / (zi * zi - 2 * zi * np.cos(th) + 1)
        return (g / (4 * np.pi * self.t0) * acc).real


def compare_half_shape(model, grid=None):
    """Compare the half-order coefficient with the printed closed form.

    Returns the spread of the pointwise ratio, the best affine fit
    ``rho_half = scale * printed + offset`` and the residual of the derived
    closed form :meth:`DensityModel.half_shape`.
    """
    grid = grid or ThetaGrid.uniform()
    th = grid.points
    ours = model.rho_correction(1, th)
    printed = model.printed_half_shape(th)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = ours / printed
    finite = np.isfinite(ratio)
    ref = np.median(ratio[finite]) if finite.any() else float("nan")
    design = np.c_[printed, np.ones_like(printed)]
    (scale, offset), *_ = np.linalg.lstsq(design, ours, rcond=None)
    return {
        "ratio_median": float(ref),
        "ratio_max_deviation": float(np.max(np.abs(ratio[finite] - ref))) if finite.any() else float("nan"),
        "affine_scale": float(scale),
        "affine_offset": float(offset),
        "affine_residual": float(np.max(np.abs(design @ (scale, offset) - ours))),
        "derived_residual": float(np.max(np.abs(model.half_shape(th) - ours))),
    }


def combined_density(curve, params, max_twice_g=1, grid=None, model=None):
    """``rho0 + sum_g hbar^(2g) coef_g`` on ``grid`` at the given ``N`` and ``beta``."""
    if max_twice_g < 0 or max_twice_g > 2:
        raise DomainError(f"density corrections available for twice_g <= 2, got {max_twice_g}")
    grid = grid or ThetaGrid.uniform()
    model = model or DensityModel(curve, params)
    rho0 = model.rho_inf(grid.points)
    series = DensitySeries(grid=grid, rho0=rho0, corrections={}, combined=rho0.copy(), hbar=params.hbar)
    for tg in range(1, max_twice_g + 1):
        coef = model.rho_correction(tg, grid.points)
        series.corrections[tg] = coef
        series.combined = series.combined + params.hbar**tg * coef
        if params.gamma == 0 and tg % 2:
            series.integrable[tg] = True
            series.atoms[tg] = (0.0, 0.0)
            continue
        ok = model.is_integrable(tg)
        series.integrable[tg] = ok
        if ok:
            series.atoms[tg] = model.edge_atoms(tg)
        else:
            series.notes.append(f"non-integrable correction at twice_g={tg}")
    return series


def cumulative(grid, values):
    """Cell edges ``0 = e_0 < ... < e_n = pi`` and the running integral at them."""
    if not grid.is_uniform():
        raise ValueError("cumulative tables need a uniform midpoint grid")
    n = grid.count
    edges = np.pi * np.arange(n + 1) / n
    mass = np.concatenate(([0.0], np.cumsum(np.asarray(values, dtype=float)) * np.pi / n))
    return edges, mass


def bin_masses(grid, values, theta_edges, atoms=(0.0, 0.0)):
    """Mass of a density (plus endpoint atoms) on each ``[theta_k, theta_k+1]``.

    ``theta_edges`` must be increasing and span ``[0, pi]``; the atom at
    ``theta=0`` goes to the first bin and the one at ``pi`` to the last.
    """
    te = np.asarray(theta_edges, dtype=float)
    if te[0] > 1e-12 or te[-1] < np.pi - 1e-12 or np.any(np.diff(te) <= 0):
        raise ValueError("theta edges must increase from 0 to pi")
    edges, mass = cumulative(grid, values)
    f = np.interp(np.clip(te, 0.0, np.pi), edges, mass)
    out = np.diff(f)
    out[0] += atoms[0]
    out[-1] += atoms[1]
    return out


def local_maxima(values, rel_tol=1e-12):
    """Number of interior local maxima, treating near-equal neighbours as flat."""
    v = np.asarray(values, dtype=float)
    d = np.diff(v)
    d[np.abs(d) <= rel_tol * np.max(np.abs(v))] = 0.0
    s = np.sign(d)
    s = s[s != 0]
    return int(np.sum((s[:-1] > 0) & (s[1:] < 0)))
