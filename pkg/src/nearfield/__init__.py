"""Near-field holography: Fresnel propagation, hologram operators and their inversion.

Submodules
----------
grid
    Sampling grids, fields and the unitary angular-frequency Fourier transform.
optics
    Propagators, probes and reference terms.
forward
    Objects, holographic intensities and the exact and linearized operators.
inverse
    Linear and Gauss-Newton reconstruction, and slice tomography.
tomo
    Radon transform, filtered backprojection and tomographic phantoms.
analysis
    Dense singular-value probes of the linearized data map.
io
    HFLD fields with JSON sidecars, and PGM export.
cli
    The ``nearfield`` command.
"""

__version__ = "0.1.0"
