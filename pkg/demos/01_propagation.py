"""Two ways to propagate a field, and why they agree at one sampling.

Fresnel propagation can be done in two ways. One multiplies the spectrum by
a unit-modulus phase. The other sandwiches one Fourier transform between two
chirps. This demo shows where each is valid and checks that they meet.
"""

import numpy as np

from nearfield.errors import AliasingError
from nearfield.grid import ComplexField
from nearfield.optics import ImagingGeometry, fresnel_propagate_chirp, fresnel_propagate_multiplier, global_phase

n = 256
geom = ImagingGeometry.critical(n, pixel=1.0, k=1.0, m=1)
gp = geom.physical_grid(n)
gd = geom.to_dimensionless(gp)
print(f"critical geometry for n={n}: d = {geom.d:.3f}, dimensionless spacing^2 * n / 2pi = "
      f"{geom.dimensionless_spacing**2 * n / (2 * np.pi):.6f}")

# A plane wave does not change under propagation except for the global phase.
flat = np.full(n, 0.3 - 1.1j)
for name, out in [
    ("multiplier", fresnel_propagate_multiplier(ComplexField(gp, flat), geom)),
    ("chirp", fresnel_propagate_chirp(ComplexField(gd, flat), geom)),
]:
    drift = np.max(np.abs(out.values / global_phase(geom.k, geom.d) - flat))
    print(f"constant field, {name:>10} form: max deviation {drift:.1e}")

# A smooth, decaying field: both forms produce the same samples.
xi = gd.axis()
psi = np.exp(-xi**2 / 2) * (1 + 0.3j * np.cos(xi))
a = fresnel_propagate_chirp(ComplexField(gd, psi), geom).values
b = fresnel_propagate_multiplier(ComplexField(gp, psi), geom).values
print(f"Gaussian test field: relative difference between the forms {np.linalg.norm(a - b) / np.linalg.norm(b):.1e}")

# Away from critical sampling one of the two chirps is no longer resolved.
far = ImagingGeometry(k=1.0, d=10 * geom.d, pixel=1.0, m=1)
try:
    fresnel_propagate_multiplier(ComplexField(gp, psi), far)
except AliasingError as exc:
    print(f"ten times the distance, multiplier form refuses: {exc}")
near = ImagingGeometry(k=1.0, d=geom.d / 10, pixel=1.0, m=1)
try:
    fresnel_propagate_chirp(ComplexField(near.to_dimensionless(gp), psi), near)
except AliasingError as exc:
    print(f"a tenth of the distance, chirp form refuses: {exc}")

# The multiplier is unitary and can be run backwards.
rng = np.random.default_rng(0)
field = ComplexField(gp, rng.standard_normal(n) + 1j * rng.standard_normal(n))
there = fresnel_propagate_multiplier(field, geom)
back = fresnel_propagate_multiplier(there, geom, -geom.d)
print(f"energy before/after: {field.energy():.12f} / {there.energy():.12f}; "
      f"round trip error {np.linalg.norm(back.values - field.values) / np.linalg.norm(field.values):.1e}")
