"""Command-line entry point: ``python -m betaensemble <command> [options]``."""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from pathlib import Path

import numpy as np

from .config import RunConfig, field_names, load_config
from .correlators import CorrelatorEngine
from .density import DensityModel, ThetaGrid, bin_masses, combined_density, compare_half_shape
from .errors import BetaEnsembleError, ConfigError
from .sampler import (
    EnsembleConfig,
    histogram_in_theta,
    ks_distance,
    l1_distance,
    run_chains,
    theta_edges_in_x,
)
from .spectral import BetaParams, solve_endpoints

EXIT_OK, EXIT_RUNTIME, EXIT_CONFIG = 0, 1, 2


def fmt(v):
    if isinstance(v, str):
        return v
    if isinstance(v, (int, np.integer)) and not isinstance(v, bool):
        return str(int(v))
    return format(float(v), ".17g")


def _jsonable(v):
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple, np.ndarray)):
        return [_jsonable(x) for x in v]
    if isinstance(v, (complex, np.complexfloating)):
        return [_jsonable(v.real), _jsonable(v.imag)]
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        v = float(v)
        # normalise -0.0 so reports do not depend on the sign of exact zeros
        return v + 0.0 if math.isfinite(v) else None
    return v


def write_json(path, obj):
    with open(path, "w") as fh:
        json.dump(_jsonable(obj), fh, indent=2, sort_keys=True, allow_nan=False)
        fh.write("\n")


def write_table(cfg, stem, header, rows):
    out = Path(cfg.output_dir)
    if cfg.format == "json":
        path = out / f"{stem}.json"
        write_json(path, [dict(zip(header, r)) for r in rows])
        return path
    path = out / f"{stem}.csv"
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for r in rows:
            w.writerow([fmt(v) for v in r])
    return path


def _curve(cfg):
    return solve_endpoints(cfg.potential())


def cmd_curve(cfg):
    c = _curve(cfg)
    report = {
        "a": c.a,
        "b": c.b,
        "m0": c.m0,
        "m1": c.m1,
        "m2": c.m2,
        "zeros_x": list(c.zeros_x),
        "zeros_z": list(c.zeros_z),
        "residuals": c.residuals(),
    }
    path = Path(cfg.output_dir) / "curve.json"
    write_json(path, report)
    return [path]


def _closed_available(twice_g, n):
    return (n == 1 and twice_g <= 2) or (n == 2 and twice_g <= 1) or (twice_g == 0 and n <= 3)


def cmd_correlator(cfg):
    c = _curve(cfg)
    params = BetaParams.make(cfg.beta, cfg.n_eigen, cfg.t0)
    eng = CorrelatorEngine(c, params, max_twice_g=max(cfg.max_twice_g, 2))
    rows = []
    for pts in cfg.point_tuples():
        label = ";".join(f"{fmt(p.real)}{'+' if p.imag >= 0 else '-'}{fmt(abs(p.imag))}j" for p in pts)
        for tg in range(cfg.max_twice_g + 1):
            val = closed = complex(math.nan, math.nan)
            err = ""
            try:
                val = eng.w(tg, pts[0], pts[1:], closed_form=False)
                if _closed_available(tg, len(pts)):
                    closed = eng.w(tg, pts[0], pts[1:], closed_form=True)
            except BetaEnsembleError as exc:
                err = str(exc)
            rows.append([tg, len(pts), label, val.real, val.imag, closed.real, closed.imag, err])
    header = ["twice_g", "n", "points", "re", "im", "closed_re", "closed_im", "error"]
    return [write_table(cfg, "correlators", header, rows)]


def cmd_density(cfg):
    c = _curve(cfg)
    params = BetaParams.make(cfg.beta, cfg.n_eigen, cfg.t0)
    mtg = min(cfg.max_twice_g, 2)
    model = DensityModel(c, params)
    s = combined_density(c, params, max_twice_g=mtg, grid=ThetaGrid.uniform(cfg.grid), model=model)
    names = {1: "rho_half_coef", 2: "rho_one_coef"}
    header = ["theta", "rho0"] + [names[tg] for tg in range(1, mtg + 1)] + ["combined"]
    nan = float("nan")
    combined = s.rho0.copy()
    cols = []
    for tg in range(1, mtg + 1):
        if s.integrable[tg]:
            cols.append(s.corrections[tg])
            combined = combined + params.hbar**tg * s.corrections[tg]
        else:
            cols.append(np.full(s.grid.count, nan))
    rows = [[t, r, *(col[i] for col in cols), combined[i]] for i, (t, r) in enumerate(zip(s.grid.points, s.rho0))]
    # integrals of each measure, endpoint atoms included
    integ = ["integral", s.grid.integrate(s.rho0)]
    total = s.grid.integrate(combined)
    for tg in range(1, mtg + 1):
        if s.integrable[tg]:
            atoms = sum(s.atoms[tg])
            integ.append(s.grid.integrate(s.corrections[tg]) + atoms)
            total += params.hbar**tg * atoms
        else:
            integ.append(nan)
    integ.append(total)
    rows.append(integ)
    meta = {
        "hbar": params.hbar,
        "gamma": params.gamma,
        "atoms": {str(k): v for k, v in s.atoms.items()},
        "integrable": {str(k): v for k, v in s.integrable.items()},
        "continuous_integrals": {str(k): v for k, v in s.integrals().items()},
        "warnings": s.notes,
    }
    if mtg >= 1 and params.gamma != 0:
        meta["printed_half_comparison"] = compare_half_shape(model, s.grid)
    meta_path = Path(cfg.output_dir) / "density_meta.json"
    write_json(meta_path, meta)
    return [write_table(cfg, "density", header, rows), meta_path]


def _ensemble(cfg):
    return EnsembleConfig(
        potential=cfg.potential(),
        beta=cfg.beta,
        n_eigen=cfg.n_eigen,
        sweeps=cfg.sweeps,
        burn_in=cfg.burn_in,
        step_scale=cfg.step_scale,
        seed=cfg.seed,
        chains=cfg.chains,
        bins=cfg.bins,
    )


def cmd_sample(cfg):
    c = _curve(cfg)
    res = run_chains(_ensemble(cfg), c)
    h = res.histogram
    rows = [[lo, hi, n, d] for lo, hi, n, d in zip(h.edges[:-1], h.edges[1:], h.counts, h.density)]
    path = write_table(cfg, "histogram", ["x_lo", "x_hi", "count", "density"], rows)
    summary = {"acceptance": res.acceptance, "step": res.step, "under": h.under, "over": h.over, "total": h.total}
    spath = Path(cfg.output_dir) / "summary.json"
    write_json(spath, summary)
    return [path, spath]


def compare_run(cfg, curve=None):
    """Sampler histogram in theta against rho0 and the first-order combined density."""
    c = curve or _curve(cfg)
    params = BetaParams.make(cfg.beta, cfg.n_eigen, cfg.t0)
    s = combined_density(c, params, max_twice_g=1, grid=ThetaGrid.uniform(max(cfg.grid, 1024)))
    res = run_chains(_ensemble(cfg), c, edges=theta_edges_in_x(c, cfg.theta_bins))
    h = histogram_in_theta(res.histogram, c)
    m0 = bin_masses(s.grid, s.rho0, h.edges)
    a0, api = s.atoms.get(1, (0.0, 0.0))
    m1 = bin_masses(s.grid, s.combined, h.edges, (params.hbar * a0, params.hbar * api))
    summary = {
        "l1_rho0": l1_distance(h, m0),
        "l1_combined": l1_distance(h, m1),
        "ks_rho0": ks_distance(h, m0),
        "ks_combined": ks_distance(h, m1),
        "acceptance": res.acceptance,
        "out_of_cut_fraction": h.out_of_cut / h.total,
        "warnings": h.warnings,
        "hbar": params.hbar,
        "gamma": params.gamma,
    }
    return h, m0, m1, summary


def cmd_compare(cfg):
    h, m0, m1, summary = compare_run(cfg)
    width = np.diff(h.edges)
    rows = [
        [lo, hi, e / w, r / w, q / w]
        for lo, hi, e, r, q, w in zip(h.edges[:-1], h.edges[1:], h.masses(), m0, m1, width)
    ]
    path = write_table(cfg, "compare", ["theta_lo", "theta_hi", "empirical", "rho0", "combined"], rows)
    spath = Path(cfg.output_dir) / "summary.json"
    write_json(spath, summary)
    return [path, spath]


COMMANDS = {
    "curve": cmd_curve,
    "correlator": cmd_correlator,
    "density": cmd_density,
    "sample": cmd_sample,
    "compare": cmd_compare,
}


def build_parser():
    p = argparse.ArgumentParser(prog="betaensemble", description="beta-ensemble spectral tools")
    p.add_argument("command", choices=sorted(COMMANDS))
    p.add_argument("--config", help="JSON run configuration")
    defaults = RunConfig()
    for name in field_names():
        if name == "points":
            p.add_argument("--points", action="append", help="comma-separated complex arguments, repeatable")
            continue
        typ = type(getattr(defaults, name))
        p.add_argument(f"--{name.replace('_', '-')}", dest=name, type=typ, default=None)
    return p


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    overrides = {k: v for k, v in vars(args).items() if k not in ("command", "config")}
    if overrides.get("points"):
        overrides["points"] = [s.split(",") for s in overrides["points"]]
    try:
        cfg = load_config(args.config, overrides)
        Path(cfg.output_dir).mkdir(parents=True, exist_ok=True)
        paths = COMMANDS[args.command](cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (BetaEnsembleError, ArithmeticError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    for path in paths:
        print(path)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
