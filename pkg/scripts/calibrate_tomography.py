"""Slice tomography round trip over several random phantoms.

For each seed it prints the error of the holographic reconstruction, and the
error of plain filtered backprojection of the exact sinograms. The second
number is the floor set by the angular sampling.

    python scripts/calibrate_tomography.py --n 64 --angles 180 --seeds 0 1 2
"""

import argparse
import json
import time

import numpy as np

from nearfield.grid import Grid
from nearfield.inverse import SolverConfig, tomo_reconstruct
from nearfield.optics import ImagingGeometry, PlaneWave
from nearfield.tomo import fbp_reconstruct, phantom_blobs, radon_2d, tomo_forward, uniform_angles


def rel(a, b):
    return float(np.linalg.norm(a - b) / np.linalg.norm(b))


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=64)
    ap.add_argument("--angles", type=int, default=180)
    ap.add_argument("--seeds", type=int, nargs="+", default=[0, 1, 2])
    ap.add_argument("--peak-phase", type=float, default=0.5)
    ap.add_argument("--peak-absorption", type=float, default=0.05)
    ap.add_argument("--linear", action="store_true", help="use the linearized solver per angle")
    ap.add_argument("--json")
    args = ap.parse_args()

    g = Grid.uniform(args.n, 1.0, 2)
    geom = ImagingGeometry.critical(2 * args.n, pixel=1.0, k=1.0, m=1)
    angles = uniform_angles(args.angles)
    detector = geom.physical_grid(2 * args.n)
    cfg = SolverConfig(gn_step_tol=1e-4, cg_tol=1e-6)
    rows = []
    for seed in args.seeds:
        v = phantom_blobs(g, 1.0, args.peak_phase, args.peak_absorption, seed=seed)
        t0 = time.perf_counter()
        images = tomo_forward(v, PlaneWave(1.0), geom, angles)
        rec = tomo_reconstruct(images, PlaneWave(1.0), geom, angles, g, cfg=cfg, nonlinear=not args.linear,
                               support_radius=v.radius)
        row = {
            "seed": seed,
            "delta_error": rel(rec.delta, v.delta),
            "beta_error": rel(rec.beta, v.beta),
            "fbp_floor_delta": rel(fbp_reconstruct(radon_2d(v.delta, angles, detector, g), g), v.delta),
            "fbp_floor_beta": rel(fbp_reconstruct(radon_2d(v.beta, angles, detector, g), g), v.beta),
            "seconds": time.perf_counter() - t0,
        }
        rows.append(row)
        print("  ".join(f"{k}={v:.4g}" if isinstance(v, float) else f"{k}={v}" for k, v in row.items()))
    if args.json:
        with open(args.json, "w") as fh:
            json.dump(rows, fh, indent=2)


if __name__ == "__main__":
    main()
