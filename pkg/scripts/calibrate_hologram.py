"""Disc hologram statistics and padding self-convergence.

Reports, for a phase/absorption disc of radius n/8 and two Fresnel captions:
the background mean outside 1.5 R, the edge overshoot, the flux error of the
padded image and the change of the cropped image when the padding goes from
2x to 4x.

    python scripts/calibrate_hologram.py --n 256 1024
"""

import argparse
import json
import time

import numpy as np

from nearfield.forward import holographic_intensity, phantom_disc, transmission_from_projection
from nearfield.grid import Grid, pad_field
from nearfield.optics import ImagingGeometry, PlaneWave


def run(n, caption, check_padding):
    radius = 0.125 * n
    g = Grid.uniform(n, 1.0, 2)
    o = transmission_from_projection(phantom_disc(g, radius, 1.0, 0.1))
    geom = ImagingGeometry.from_fresnel_caption(caption, radius, 1.0)
    t0 = time.perf_counter()
    full = holographic_intensity(o, PlaneWave(1.0), geom, crop=False)
    image = holographic_intensity(o, PlaneWave(1.0), geom).values
    flux = np.sum(np.abs(pad_field(o.o, 2, 1.0).values) ** 2)
    r = np.sqrt(g.radius_squared())
    row = {
        "n": n,
        "caption": caption,
        "background_offset": float(image[r > 1.5 * radius].mean() - 1),
        "edge_max": float(image[np.abs(r - radius) < 0.25 * radius].max()),
        "flux_rel_error": float(abs(full.values.sum() - flux) / flux),
        "seconds": time.perf_counter() - t0,
    }
    if check_padding:
        finer = holographic_intensity(o, PlaneWave(1.0), geom, pad_factor=4).values
        row["pad2_vs_pad4_max"] = float(np.max(np.abs(image - finer)))
    return row


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, nargs="+", default=[256, 1024])
    ap.add_argument("--captions", type=float, nargs="+", default=[1e-3, 1e-4])
    ap.add_argument("--skip-padding", action="store_true", help="skip the 4x padded comparison")
    ap.add_argument("--json", help="write the rows to this file")
    args = ap.parse_args()
    rows = [run(n, c, not args.skip_padding) for n in args.n for c in args.captions]
    for row in rows:
        print("  ".join(f"{k}={v:.4g}" if isinstance(v, float) else f"{k}={v}" for k, v in row.items()))
    if args.json:
        with open(args.json, "w") as fh:
            json.dump(rows, fh, indent=2)


if __name__ == "__main__":
    main()
