"""Hologram of a phase disc at two Fresnel numbers.

A disc of radius R = n/8 with phase shift 1 rad and absorption 0.1 is
illuminated by a plane wave. The smaller value of 2 pi d / (k R^2) puts the
detector closer, so the interference fringes hug the disc edge. The images
are written as 16-bit PGM files next to this script (or to --out).
"""

import argparse
from pathlib import Path

import numpy as np

from nearfield.forward import holographic_intensity, phantom_disc, transmission_from_projection
from nearfield.grid import Grid
from nearfield.io import write_pgm
from nearfield.optics import ImagingGeometry, PlaneWave, far_field_intensity

ap = argparse.ArgumentParser()
ap.add_argument("--n", type=int, default=512)
ap.add_argument("--out", default=str(Path(__file__).parent / "out"))
args = ap.parse_args()
out = Path(args.out)
out.mkdir(parents=True, exist_ok=True)

n = args.n
radius = n / 8
g = Grid.uniform(n, 1.0, 2)
o = transmission_from_projection(phantom_disc(g, radius, 1.0, 0.1))
r = np.sqrt(g.radius_squared())

for caption in (1e-3, 1e-4):
    geom = ImagingGeometry.from_fresnel_caption(caption, radius, 1.0)
    image = holographic_intensity(o, PlaneWave(1.0), geom).values
    background = image[r > 1.5 * radius].mean()
    inside = image[r < 0.5 * radius].mean()
    edge = image[np.abs(r - radius) < 0.25 * radius].max()
    print(f"2 pi d/(k R^2) = {caption:g}: background {background:.6f}, disc interior {inside:.4f} "
          f"(absorption alone gives {np.exp(-0.2):.4f}), brightest edge fringe {edge:.3f}")
    write_pgm(out / f"disc_hologram_{caption:g}.pgm", image)

ff = far_field_intensity(o.o).values
write_pgm(out / "disc_farfield.pgm", ff, scale="log10")
print(f"far field written on a log scale; parity error "
      f"{np.max(np.abs(ff - np.roll(np.flip(ff, (0, 1)), (1, 1), axis=(0, 1)))) / ff.max():.1e}")
print(f"images in {out}")
