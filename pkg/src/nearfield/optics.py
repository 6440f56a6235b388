"""Fresnel propagation, probe models and the reference term.

Two propagator realizations are provided:

* :func:`fresnel_propagate_multiplier` works on physical coordinates and
  multiplies the spectrum by ``exp(ikd) exp(-i d sigma^2 / 2k)``. It is exactly
  unitary on the periodic grid and needs ``dxi^2 >= 2 pi / n``.
* :func:`fresnel_propagate_chirp` works on dimensionless coordinates
  ``xi = sqrt(k/d) x`` and evaluates ``gamma exp(ikd) w_F F(w_F psi)`` with
  ``w_F(xi) = exp(i xi^2 / 2)``. It needs ``dxi^2 <= 2 pi / n`` and returns the
  field on the dual grid.

Both agree at critical sampling ``dxi^2 = 2 pi / n``. See
``docs/propagators.md`` for the derivation.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import AliasingError, ProbeZero
from .grid import ComplexField, Grid, RealImage, ft_array, ift_array

__all__ = [
    "ImagingGeometry",
    "PlaneWave",
    "GaussianBeam",
    "CustomCompact",
    "FresnelChirp",
    "CustomWeight",
    "gamma_factor",
    "global_phase",
    "check_chirp_sampling",
    "chirp_w_F",
    "weight_values",
    "fresnel_propagate_multiplier",
    "fresnel_propagate_chirp",
    "reference_term",
    "probe_at_object",
    "far_field_intensity",
]

_SLACK = 1 + 1e-9


@dataclass(frozen=True)
class ImagingGeometry:
    """Wavenumber ``k``, distance ``d``, physical pixel size and lateral dimension ``m``."""

    k: float
    d: float
    pixel: float
    m: int = 2

    def __post_init__(self):
        for name in ("k", "d", "pixel"):
            v = getattr(self, name)
            if not (np.isfinite(v) and v > 0):
                raise ValueError(f"{name} must be positive, got {v}")
        if self.m not in (1, 2):
            raise ValueError(f"lateral dimension must be 1 or 2, got {self.m}")

    @classmethod
    def from_fresnel_caption(cls, value, radius, pixel, k=1.0, m=2):
        """Geometry with ``2 pi d / (k R^2) == value`` for a feature of radius ``R``."""
        return cls(k=k, d=value * k * radius**2 / (2 * np.pi), pixel=pixel, m=m)

    @classmethod
    def critical(cls, n, pixel, k=1.0, m=1):
        """Geometry whose dimensionless sampling is critical for ``n`` samples per axis."""
        return cls(k=k, d=k * pixel**2 * n / (2 * np.pi), pixel=pixel, m=m)

    @property
    def scale(self) -> float:
        """Factor ``sqrt(k/d)`` taking physical lengths to dimensionless ones."""
        return float(np.sqrt(self.k / self.d))

    @property
    def dimensionless_spacing(self) -> float:
        return self.scale * self.pixel

    def fresnel_caption(self, radius) -> float:
        return 2 * np.pi * self.d / (self.k * radius**2)

    def physical_grid(self, n) -> Grid:
        return Grid((n,) * self.m, (self.pixel,) * self.m)

    def to_dimensionless(self, grid: Grid) -> Grid:
        return grid.scaled(self.scale)

    def to_physical(self, grid: Grid) -> Grid:
        return grid.scaled(1 / self.scale)

    def is_critical(self, n, rtol=1e-9) -> bool:
        return abs(self.dimensionless_spacing**2 * n / (2 * np.pi) - 1) <= rtol

    def to_dict(self) -> dict:
        return {"k": self.k, "d": self.d, "pixel": self.pixel, "m": self.m}


@dataclass(frozen=True)
class PlaneWave:
    """Constant illumination ``p0``."""

    p0: complex = 1.0

    def __post_init__(self):
        if self.p0 == 0:
            raise ValueError("plane-wave amplitude p0 must be nonzero")

    @property
    def alpha(self) -> complex:
        return -0.5j

    def to_dict(self):
        return {"variant": "plane", "p0": [complex(self.p0).real, complex(self.p0).imag]}


@dataclass(frozen=True)
class GaussianBeam:
    """Gaussian beam whose detector-plane field is ``p0 exp(ikd) exp(alpha0 xi^2)``."""

    p0: complex = 1.0
    alpha0: complex = -1.0

    def __post_init__(self):
        a = complex(self.alpha0)
        if self.p0 == 0:
            raise ValueError("Gaussian amplitude p0 must be nonzero")
        if not a.real < 0:
            raise ValueError(f"Gaussian beam needs Re(alpha0) < 0, got {a}")
        if a.imag > 0:
            raise ValueError(f"divergent Gaussian beam needs Im(alpha0) <= 0, got {a}")

    @property
    def alpha(self) -> complex:
        return complex(self.alpha0) - 0.5j

    def to_dict(self):
        a = complex(self.alpha0)
        return {
            "variant": "gaussian",
            "p0": [complex(self.p0).real, complex(self.p0).imag],
            "alpha0": [a.real, a.imag],
        }


@dataclass(frozen=True)
class CustomCompact:
    """Sampled compactly supported ``p_check`` with a non-real exponent ``alpha``.

    The reference term is ``F(p_check) exp(alpha xi^2)`` on ``p_check.grid.dual()``.
    """

    p_check: ComplexField
    alpha: complex

    def __post_init__(self):
        if not np.any(self.p_check.values != 0):
            raise ValueError("p_check must not vanish identically")
        if complex(self.alpha).imag == 0:
            raise ValueError("alpha must have a nonzero imaginary part")

    def to_dict(self):
        a = complex(self.alpha)
        return {"variant": "custom", "alpha": [a.real, a.imag]}


@dataclass(frozen=True)
class FresnelChirp:
    """The weight ``w_F(xi) = exp(i xi^2 / 2)``."""


@dataclass(frozen=True)
class CustomWeight:
    """An arbitrary sampled weight; must not vanish on its grid."""

    w: ComplexField

    def __post_init__(self):
        if np.min(np.abs(self.w.values)) <= 0:
            raise ValueError("custom weight must be nonzero everywhere")


def gamma_factor(m: int) -> complex:
    return np.exp(-1j * m * np.pi / 4)


def check_chirp_sampling(grid: Grid, rate: float = 0.5, what: str = "chirp"):
    """Raise :class:`AliasingError` unless ``exp(i rate xi^2)`` is resolved.

    The local frequency ``2 rate |xi|`` must stay below the Nyquist limit
    ``pi / dxi`` on every axis.
    """
    for i, (xmax, dx) in enumerate(zip(grid.max_abs(), grid.spacing)):
        if 2 * abs(rate) * xmax * dx > np.pi * _SLACK:
            raise AliasingError(
                f"{what} undersampled on axis {i}: 2*|rate|*xi_max*dxi = "
                f"{2 * abs(rate) * xmax * dx:.4g} > pi",
                axis=i,
            )


def chirp_w_F(grid: Grid) -> ComplexField:
    """Samples of ``exp(i |xi|^2 / 2)`` on a dimensionless grid."""
    check_chirp_sampling(grid, 0.5, "Fresnel chirp w_F")
    return ComplexField(grid, np.exp(0.5j * grid.radius_squared()))


def weight_values(weight, grid: Grid) -> np.ndarray:
    if isinstance(weight, FresnelChirp) or weight is None:
        return chirp_w_F(grid).values
    if isinstance(weight, CustomWeight):
        if not weight.w.grid.is_close(grid):
            raise ValueError("custom weight grid does not match the object grid")
        return weight.w.values
    raise TypeError(f"unknown weight {weight!r}")


def global_phase(k, d) -> complex:
    return np.exp(1j * np.fmod(k * d, 2 * np.pi))


def fresnel_propagate_multiplier(psi: ComplexField, geom: ImagingGeometry, signed_distance=None):
    """Propagate a physical field by ``signed_distance`` (default ``geom.d``).

    Applies ``exp(ikd) exp(-i d |sigma|^2 / (2k))`` in the Fourier domain. A
    negative distance inverts the forward propagation exactly on the grid.
    """
    d = geom.d if signed_distance is None else float(signed_distance)
    dual = psi.grid.dual()
    for i, (smax, ds) in enumerate(zip(dual.max_abs(), dual.spacing)):
        if abs(d) * smax * ds / geom.k > np.pi * _SLACK:
            raise AliasingError(
                f"propagator multiplier undersampled on axis {i}: "
                f"|d|*sigma_max*dsigma/k = {abs(d) * smax * ds / geom.k:.4g} > pi",
                axis=i,
            )
    kernel = global_phase(geom.k, d) * np.exp(-0.5j * d / geom.k * dual.radius_squared())
    spectrum = ft_array(psi.values, psi.grid)
    return ComplexField(psi.grid, ift_array(kernel * spectrum, dual))


def fresnel_propagate_chirp(psi0: ComplexField, geom: ImagingGeometry) -> ComplexField:
    """Chirp-Fourier-chirp propagation of a dimensionless field.

    Returns ``gamma exp(ikd) w_F F(w_F psi0)`` on ``psi0.grid.dual()``.
    """
    grid = psi0.grid
    w_in = chirp_w_F(grid).values
    dual = grid.dual()
    w_out = np.exp(0.5j * dual.radius_squared())
    values = gamma_factor(grid.ndim) * global_phase(geom.k, geom.d) * w_out * ft_array(w_in * psi0.values, grid)
    return ComplexField(dual, values)


def reference_term(probe, grid: Grid) -> ComplexField:
    """Reference wave ``F(p_check) exp(alpha xi^2)`` on the data grid.

    For a plane wave this is ``(p0/gamma) exp(-i xi^2/2)``; for a Gaussian
    beam ``(p0/gamma) exp((alpha0 - i/2) xi^2)``.
    """
    m = grid.ndim
    xi2 = grid.radius_squared()
    if isinstance(probe, (PlaneWave, GaussianBeam)):
        alpha = probe.alpha
        if alpha.imag != 0:
            check_chirp_sampling(grid, alpha.imag, "reference term")
        return ComplexField(grid, complex(probe.p0) / gamma_factor(m) * np.exp(alpha * xi2))
    if isinstance(probe, CustomCompact):
        if not probe.p_check.grid.dual().is_close(grid):
            raise ValueError("p_check grid is not dual to the data grid")
        check_chirp_sampling(grid, complex(probe.alpha).imag, "reference term")
        return ComplexField(grid, ft_array(probe.p_check.values, probe.p_check.grid) * np.exp(probe.alpha * xi2))
    raise TypeError(f"unknown probe {probe!r}")


def _embed_custom(probe: CustomCompact, grid: Grid) -> CustomCompact:
    """Zero-pad ``p_check`` onto a larger grid with the same spacing."""
    pc = probe.p_check
    if pc.grid.is_close(grid):
        return probe
    if not np.allclose(pc.grid.spacing, grid.spacing, rtol=1e-12) or any(
        a > b or (b - a) % 2 for a, b in zip(pc.grid.shape, grid.shape)
    ):
        raise ValueError("p_check grid cannot be embedded in the object grid")
    values = np.zeros(grid.shape, dtype=complex)
    values[tuple(slice((b - a) // 2, (b - a) // 2 + a) for a, b in zip(pc.grid.shape, grid.shape))] = pc.values
    return CustomCompact(ComplexField(grid, values), probe.alpha)


def probe_at_object(probe, grid: Grid) -> ComplexField:
    """Sample-plane probe ``p`` on a dimensionless object grid.

    This is the field that, propagated by ``d``, produces the probe's reference
    term: ``exp(-ikd) D(p) / (gamma w_F) = F(p_check) exp(alpha xi^2)``.
    """
    m = grid.ndim
    if isinstance(probe, PlaneWave):
        return ComplexField(grid, np.full(grid.shape, complex(probe.p0)))
    if isinstance(probe, GaussianBeam):
        alpha = probe.alpha
        xi2 = grid.radius_squared()
        amp = complex(probe.p0) / gamma_factor(m) * np.sqrt(-2 * alpha) ** (-m)
        return ComplexField(grid, amp * np.exp(xi2 / (4 * alpha) - 0.5j * xi2))
    if isinstance(probe, CustomCompact):
        probe = _embed_custom(probe, grid)
        ref = reference_term(probe, grid.dual())
        return ComplexField(grid, np.exp(-0.5j * grid.radius_squared()) * ift_array(ref.values, grid.dual()))
    raise TypeError(f"unknown probe {probe!r}")


def check_probe_nonvanishing(p: ComplexField, rtol=1e-14):
    amp = np.abs(p.values)
    if amp.min() < rtol * amp.max():
        raise ProbeZero(f"probe modulus drops to {amp.min():.3g} (max {amp.max():.3g})")


def far_field_intensity(psi0: ComplexField) -> RealImage:
    """Fourier intensities ``|F(psi0)|^2`` on the dual grid."""
    return RealImage(psi0.grid.dual(), np.abs(ft_array(psi0.values, psi0.grid)) ** 2)
