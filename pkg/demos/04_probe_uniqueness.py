"""Is the linearized data map injective? A numerical look.

The map from h to the linear part of the hologram is assembled as a dense
matrix by direct quadrature, and its singular values are inspected. With full
data it has full rank for every probe with a non-real exponent. Cutting the
detector down removes rows. The singular values then interlace, and once
there are fewer rows than unknowns the rank drops.
"""

from nearfield.analysis import alpha_sweep, restricted_data_experiment
from nearfield.optics import GaussianBeam, PlaneWave

for name, probe in [("plane wave", PlaneWave(1.0)), ("divergent Gaussian", GaussianBeam(1.0, -1 - 0.2j))]:
    result = restricted_data_experiment(probe)
    print(name)
    for f, rep in zip(result.fractions, result.reports):
        print(f"  {f:>5.0%} of the detector: {rep.n_data:>3} rows, rank {rep.rank}/{rep.n_unknowns}, "
              f"sigma_max {rep.sigma_max:.3e}, sigma_min {rep.sigma_min:.3e}")

print("reference exponent -1 + i t: the rank collapses when t reaches 0")
for alpha, rep in alpha_sweep([-0.5, -0.05, -0.005, 0.0]):
    print(f"  alpha = {alpha}: rank {rep.rank}/{rep.n_unknowns}")
