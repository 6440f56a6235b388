"""Reconstruction error of a weak smooth object against the data window size.

The object is the complex Gaussian bump used by the acceptance suite
(n=512 critical grid, support 32 samples, width 4 samples). For each window
fraction it prints the linear Tikhonov error, the error of the dense SVD
solve from ``nearfield.analysis`` and the numerical rank of the windowed
matrix.

    python scripts/calibrate_restricted_data.py --fractions 1 0.5 0.25 0.1
"""

import argparse
import json

import numpy as np

from nearfield.analysis import contiguous_mask, restricted_data_experiment
from nearfield.forward import ComplexField, Perturbation, centered_box, operator_F_lin
from nearfield.grid import Grid
from nearfield.inverse import SolverConfig, reconstruct_linear
from nearfield.optics import PlaneWave


def calibration_object(n, support, width_samples):
    g = Grid.uniform(n, np.sqrt(2 * np.pi / n))
    x = g.axis()
    values = (-0.1j - 0.01) * np.exp(-(x**2) / (2 * (width_samples * g.spacing[0]) ** 2))
    return Perturbation(ComplexField(g, values), centered_box(g, support))


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=512)
    ap.add_argument("--support", type=int, default=32)
    ap.add_argument("--width", type=float, default=4.0, help="bump width in samples")
    ap.add_argument("--fractions", type=float, nargs="+", default=[1.0, 0.5, 0.25, 0.1])
    ap.add_argument("--reg-alpha", type=float, default=1e-8)
    ap.add_argument("--json")
    args = ap.parse_args()

    h = calibration_object(args.n, args.support, args.width)
    g, probe = h.grid, PlaneWave(1.0)
    dense = restricted_data_experiment(probe, g, h.support, fractions=args.fractions, reg_alpha=args.reg_alpha, h=h)
    cfg = SolverConfig(reg_alpha=args.reg_alpha, cg_max_iter=5000, cg_tol=1e-12)
    clean = operator_F_lin(h, probe)
    rows = []
    for f, rep, dense_err in zip(args.fractions, dense.reports, dense.errors):
        rec, report = reconstruct_linear(clean.with_mask(contiguous_mask(args.n, f)), probe, g, h.support, cfg=cfg)
        err = np.linalg.norm(rec.values - h.values) / np.linalg.norm(h.values)
        rows.append({"fraction": f, "iterative_error": float(err), "dense_error": float(dense_err),
                     "rank": rep.rank, "n_unknowns": rep.n_unknowns, "cg_iterations": report.iterations})
        print(f"fraction={f:<5} iterative={err:.3e} dense={dense_err:.3e} rank={rep.rank}/{rep.n_unknowns} "
              f"cg_iter={report.iterations}")
    if args.json:
        with open(args.json, "w") as fh:
            json.dump(rows, fh, indent=2)


if __name__ == "__main__":
    main()
