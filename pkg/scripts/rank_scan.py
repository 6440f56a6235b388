"""Numerical rank of the linearized map across probes, sizes and windows.

Prints the rank and the condition number for every probe and problem size,
then the rank against Im(alpha) for a reference exponent with real part -1.

    python scripts/rank_scan.py --n-complex 8 16 32
"""

import argparse

import numpy as np

from nearfield.analysis import alpha_sweep, default_probe_grids, restricted_data_experiment
from nearfield.optics import GaussianBeam, PlaneWave

PROBES = {
    "plane": PlaneWave(1.0),
    "gaussian(-1-0.2i)": GaussianBeam(1.0, -1 - 0.2j),
    "gaussian(-0.2)": GaussianBeam(1.0, -0.2),
}


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n-complex", type=int, nargs="+", default=[8, 16, 32])
    ap.add_argument("--fractions", type=float, nargs="+", default=[1.0, 0.5, 0.25, 0.1])
    ap.add_argument("--imag", type=float, nargs="+", default=[-1.0, -0.5, -0.1, -0.01, 0.0])
    args = ap.parse_args()

    for name, probe in PROBES.items():
        for nc in args.n_complex:
            g, box, data = default_probe_grids(nc)
            res = restricted_data_experiment(probe, g, box, data, fractions=args.fractions)
            cells = [f"{f:g}:{r.rank}/{r.n_unknowns} cond={(r.sigma_max / r.sigma_min if r.sigma_min > 0 else np.inf):.2e} err={e:.1e}"
                     for f, r, e in zip(args.fractions, res.reports, res.errors)]
            print(f"{name:<18} n_complex={nc:<3} " + "  ".join(cells))
    print()
    for alpha, rep in alpha_sweep(args.imag):
        ratio = rep.sigma_min / rep.sigma_max if rep.sigma_max > 0 else np.nan
        print(f"alpha={alpha:<12} rank={rep.rank}/{rep.n_unknowns} sigma_min/sigma_max={ratio:.2e}")


if __name__ == "__main__":
    main()
