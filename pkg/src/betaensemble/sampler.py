"""Metropolis sampler for the beta-ensemble eigenvalue measure.

Weight: ``|Delta(lambda)|^(2 beta) exp(-(N beta / t0) sum V(lambda_i))``.
Random numbers come from numpy generators seeded by ``(seed, chain)`` and
are fed to a compiled kernel in blocks, so results do not depend on thread
scheduling.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numba
import numpy as np

from .density import DensityModel, ThetaGrid, cumulative
from .errors import ConfigError, DomainError
from .spectral import BetaParams, Potential, solve_endpoints

TARGET_ACCEPTANCE = 0.35
DEFAULT_BINS = 60
_BLOCK = 1000
_TUNE_WINDOW = 10
_INIT_TABLE = 1024


@dataclass(frozen=True)
class EnsembleConfig:
    potential: Potential
    beta: float
    n_eigen: int = 50
    sweeps: int = 100_000
    burn_in: int = 2_000
    step_scale: float = 0.5
    seed: int = 0
    chains: int = 1
    bins: int = DEFAULT_BINS

    def __post_init__(self):
        if not self.beta > 0:
            raise ConfigError("beta", "must be > 0")
        if self.n_eigen < 2:
            raise ConfigError("n_eigen", "must be >= 2")
        if not 0 <= self.burn_in < self.sweeps:
            raise ConfigError("sweeps", "need sweeps > burn_in >= 0")
        if not self.step_scale > 0:
            raise ConfigError("step_scale", "must be > 0")
        if not 0 <= self.seed < 2**64:
            raise ConfigError("seed", "must be a non-negative 64-bit integer")
        if self.chains < 1:
            raise ConfigError("chains", "must be >= 1")
        if self.bins < 1:
            raise ConfigError("bins", "must be >= 1")


@dataclass
class Histogram:
    edges: np.ndarray
    counts: np.ndarray
    under: int = 0
    over: int = 0
    # samples outside the cut, filled in by histogram_in_theta
    out_of_cut: int = 0
    warnings: list = field(default_factory=list)

    @property
    def total(self):
        return int(self.counts.sum())

    @property
    def density(self):
        return self.counts / (self.total * np.diff(self.edges))

    def masses(self):
        return self.counts / self.total


@dataclass
class ChainResult:
    histogram: Histogram
    acceptance: list
    step: list


def log_weight(cfg, lam):
    lam = np.asarray(lam, dtype=float)
    diff = np.abs(lam[:, None] - lam[None, :])[np.triu_indices(lam.size, 1)]
    if np.any(diff == 0):
        raise DomainError("degenerate configuration (-inf weight)")
    pot = cfg.potential
    return float(2 * cfg.beta * np.log(diff).sum() - lam.size * cfg.beta / pot.t0 * pot.V(lam).sum())


@numba.njit(cache=True, nogil=True)
def _vpot(x, t1, t2, t3, t4):
    return ((t4 / 4 * x + t3 / 3) * x + t2 / 2) * x * x + t1 * x


@numba.njit(cache=True, nogil=True)
def _sweeps(lam, coef, two_beta, field_strength, step, picks, noise, unif, tune, target, edges, counts, outside):
    n = lam.size
    nsweeps = picks.shape[0]
    accepted = 0
    window = 0
    for s in range(nsweeps):
        for k in range(n):
            i = picks[s, k]
            old = lam[i]
            new = old + step * noise[s, k]
            # product of distance ratios, logged once (rescaled to stay finite)
            prod = 1.0
            logsum = 0.0
            for j in range(n):
                if j != i:
                    prod *= abs(new - lam[j]) / abs(old - lam[j])
                    if prod > 1e150 or prod < 1e-150:
                        if prod == 0.0:
                            break
                        logsum += math.log(prod)
                        prod = 1.0
            if prod == 0.0:
                continue
            dv = _vpot(new, coef[0], coef[1], coef[2], coef[3]) - _vpot(old, coef[0], coef[1], coef[2], coef[3])
            dlog = two_beta * (logsum + math.log(prod)) - field_strength * dv
            if math.log(unif[s, k]) < dlog:
                lam[i] = new
                accepted += 1
                window += 1
        if tune:
            if (s + 1) % _TUNE_WINDOW == 0:
                rate = window / (_TUNE_WINDOW * n)
                step *= math.exp(rate - target)
                window = 0
        else:
            for i in range(n):
                b = np.searchsorted(edges, lam[i], side="right") - 1
                if b < 0:
                    outside[0] += 1
                elif b >= counts.size:
                    outside[1] += 1
                else:
                    counts[b] += 1
    return accepted, step


def default_edges(curve, bins=DEFAULT_BINS):
    width = curve.b - curve.a
    return np.linspace(curve.a - 0.2 * width, curve.b + 0.2 * width, bins + 1)


def theta_edges_in_x(curve, bins):
    """x-edges whose images in theta are uniform on ``[0, pi]`` (ascending in x)."""
    th = np.pi * np.arange(bins + 1) / bins
    x = curve.mid + 2 * curve.alpha * np.cos(th)
    x[0], x[-1] = curve.b, curve.a
    return x[::-1].copy()


def _initial_state(curve, rng, n, table=_INIT_TABLE):
    model = DensityModel(curve, BetaParams.make(1.0, n, curve.potential.t0))
    grid = ThetaGrid.uniform(table)
    edges, mass = cumulative(grid, model.rho_inf(grid.points))
    mass /= mass[-1]
    th = np.interp(rng.random(n), mass, edges)
    return np.sort(curve.mid + 2 * curve.alpha * np.cos(th))


def thread_count():
    env = os.environ.get("BETA_SPECTRAL_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise ConfigError("BETA_SPECTRAL_THREADS", f"not an integer: {env!r}") from None
    return os.cpu_count() or 1


def _run_one(cfg, curve, edges, chain):
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence([cfg.seed, chain])))
    n = cfg.n_eigen
    lam = _initial_state(curve, rng, n)
    pot = cfg.potential
    coef = np.array([pot.t1, pot.t2, pot.t3, pot.t4], dtype=float)
    step = cfg.step_scale * (curve.b - curve.a) / math.sqrt(n)
    counts = np.zeros(edges.size - 1, dtype=np.int64)
    outside = np.zeros(2, dtype=np.int64)
    accepted = 0
    done = 0
    while done < cfg.sweeps:
        tune = done < cfg.burn_in
        m = min(_BLOCK, (cfg.burn_in if tune else cfg.sweeps) - done)
        picks = rng.integers(0, n, size=(m, n))
        noise = rng.standard_normal((m, n))
        unif = 1.0 - rng.random((m, n))
        acc, step = _sweeps(
            lam,
            coef,
            2 * cfg.beta,
            n * cfg.beta / pot.t0,
            step,
            picks,
            noise,
            unif,
            tune,
            TARGET_ACCEPTANCE,
            edges,
            counts,
            outside,
        )
        if not tune:
            accepted += acc
        done += m
    rate = accepted / ((cfg.sweeps - cfg.burn_in) * n)
    return Histogram(edges.copy(), counts, int(outside[0]), int(outside[1])), rate, step


def run_chains(cfg, curve=None, edges=None):
    """Run ``cfg.chains`` independent chains and pool their post-burn-in histograms."""
    curve = curve or solve_endpoints(cfg.potential)
    edges = default_edges(curve, cfg.bins) if edges is None else np.asarray(edges, dtype=float)
    workers = min(thread_count(), cfg.chains)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(lambda c: _run_one(cfg, curve, edges, c), range(cfg.chains)))
    else:
        parts = [_run_one(cfg, curve, edges, c) for c in range(cfg.chains)]
    hist = merge_histograms([p[0] for p in parts])
    return ChainResult(hist, [p[1] for p in parts], [p[2] for p in parts])


def merge_histograms(hists):
    if not hists:
        raise ValueError("nothing to merge")
    edges = hists[0].edges
    for h in hists[1:]:
        if h.edges.shape != edges.shape or np.any(h.edges != edges):
            raise ValueError("histograms have different edges")
    return Histogram(
        edges.copy(),
        sum(h.counts for h in hists),
        sum(h.under for h in hists),
        sum(h.over for h in hists),
        sum(h.out_of_cut for h in hists),
    )


def histogram_in_theta(h, curve, leak_warning=0.01):
    """Re-bin an x-histogram in ``theta = arccos(u/2)``, ``u = 4(x - (a+b)/2)/(b-a)``.

    Samples outside ``[a, b]`` are clamped to the nearest endpoint, so they land
    in the first (``theta=0``, right edge) or last bin.  x-bins that lie outside
    the cut collapse onto those bins.
    """
    u = (h.edges - curve.mid) / curve.alpha
    th = np.arccos(np.clip(u / 2, -1.0, 1.0))[::-1]
    counts = h.counts[::-1]
    # merge zero-width bins into their inner neighbour
    keep = np.flatnonzero(np.diff(th) > 0)
    if keep.size == 0:
        raise DomainError("histogram has no bins inside the cut")
    new_counts = np.zeros(keep.size, dtype=np.int64)
    idx = np.clip(np.searchsorted(keep, np.arange(counts.size)), 0, keep.size - 1)
    np.add.at(new_counts, idx, counts)
    new_edges = np.concatenate((th[keep], [th[keep[-1] + 1]]))
    new_edges[0], new_edges[-1] = 0.0, np.pi
    new_counts[0] += h.over
    new_counts[-1] += h.under
    outside = h.under + h.over
    outside += int(h.counts[h.edges[1:] <= curve.a + 1e-12 * abs(curve.a)].sum())
    outside += int(h.counts[h.edges[:-1] >= curve.b - 1e-12 * abs(curve.b)].sum())
    out = Histogram(new_edges, new_counts, 0, 0, outside)
    total = h.total + h.under + h.over
    if total and outside / total > leak_warning:
        out.warnings.append(f"{outside / total:.3%} of samples outside the cut")
    return out


def l1_distance(h, masses):
    """``sum |p_k - q_k|`` between histogram bin masses and model bin masses."""
    return float(np.abs(h.masses() - np.asarray(masses)).sum())


def ks_distance(h, masses):
    return float(np.max(np.abs(np.cumsum(h.masses()) - np.cumsum(masses))))
