"""Leading eigenvalue density of V = x^4 + x^2/2 over a range of t0.

Writes one CSV per t0 (theta, rho0) plus a summary with mass and the number
of interior local maxima of each curve.
"""

import argparse
import json
from pathlib import Path

import numpy as np

from betaensemble import BetaParams, DensityModel, Potential, ThetaGrid, solve_endpoints
from betaensemble.density import local_maxima

T0_VALUES = (1e-3, 1e-2, 0.05, 0.1, 0.5, 1.0, 5.0, 10.0, 100.0, 1e4)


def density_family(t0_values=T0_VALUES, count=512):
    grid = ThetaGrid.uniform(count)
    out = []
    for t0 in t0_values:
        curve = solve_endpoints(Potential.even_quartic(t0))
        rho = DensityModel(curve, BetaParams.make(1.0, 50, t0)).rho_inf(grid.points)
        out.append({"t0": t0, "b": curve.b, "rho": rho, "mass": grid.integrate(rho), "maxima": local_maxima(rho)})
    return grid, out


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", default="out/fig3")
    args = ap.parse_args()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    grid, family = density_family()
    for row in family:
        np.savetxt(
            out / f"rho0_t0_{row['t0']:g}.csv",
            np.c_[grid.points, row["rho"]],
            delimiter=",",
            header="theta,rho0",
            comments="",
            fmt="%.17g",
        )
    summary = [{k: v for k, v in r.items() if k != "rho"} for r in family]
    (out / "summary.json").write_text(json.dumps(summary, indent=2) + "\n")
    for r in summary:
        print(f"t0={r['t0']:<8g} b={r['b']:.6f} mass={r['mass']:.12f} maxima={r['maxima']}")


if __name__ == "__main__":
    main()
