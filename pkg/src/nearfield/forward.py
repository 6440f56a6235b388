"""Object models and measurement operators.

Physical intensities are computed with the multiplier propagator on a padded
grid. The abstract operators

    F(h)     = |R + F(w h)|^2
    F_lin(h) = |R + F(w h)|^2 - |F(w h)|^2

act on a compactly supported perturbation ``h`` sampled on a dimensionless
object grid and return data on its dual grid; ``R`` is the probe's
:func:`~nearfield.optics.reference_term`.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DivisionByNearZero, SupportError
from .grid import ComplexField, Grid, RealImage, crop_field, ft_array, pad_field
from .optics import (
    FresnelChirp,
    ImagingGeometry,
    PlaneWave,
    fresnel_propagate_multiplier,
    probe_at_object,
    reference_term,
    weight_values,
)

__all__ = [
    "PhaseAbsorptionProjection",
    "TransmissionFunction",
    "Perturbation",
    "support_mask",
    "bounding_box",
    "centered_box",
    "transmission_from_projection",
    "phantom_disc",
    "phantom_gaussian",
    "holographic_intensity",
    "intensity_linearized",
    "perturbation_from_transmission",
    "operator_F",
    "operator_F_lin",
    "flat_field_normalize",
]

Box = tuple[tuple[int, int], ...]


def support_mask(grid: Grid, box: Box | None) -> np.ndarray:
    mask = np.zeros(grid.shape, dtype=bool)
    if box is None:
        mask[...] = True
        return mask
    mask[tuple(slice(lo, hi) for lo, hi in box)] = True
    return mask


def bounding_box(mask: np.ndarray) -> Box:
    """Smallest index box containing all True entries (empty box if none)."""
    mask = np.asarray(mask, dtype=bool)
    if not mask.any():
        return tuple((n // 2, n // 2) for n in mask.shape)
    box = []
    for ax in range(mask.ndim):
        other = tuple(i for i in range(mask.ndim) if i != ax)
        idx = np.flatnonzero(mask.any(axis=other) if other else mask)
        box.append((int(idx[0]), int(idx[-1]) + 1))
    return tuple(box)


def centered_box(grid: Grid, widths) -> Box:
    """Index box of the given widths centered on the origin sample."""
    widths = np.broadcast_to(np.atleast_1d(widths), (grid.ndim,))
    box = []
    for n, w in zip(grid.shape, widths):
        w = int(w)
        if not 0 < w <= n:
            raise ValueError(f"box width {w} does not fit axis of {n}")
        lo = n // 2 - w // 2
        box.append((lo, lo + w))
    return tuple(box)


@dataclass(frozen=True)
class PhaseAbsorptionProjection:
    """Projected phase ``phi = k int delta dz`` and attenuation ``mu = k int beta dz``."""

    grid: Grid
    phi: np.ndarray
    mu: np.ndarray

    def __post_init__(self):
        phi = np.asarray(self.phi, dtype=float).reshape(self.grid.shape)
        mu = np.asarray(self.mu, dtype=float).reshape(self.grid.shape)
        if not (np.all(np.isfinite(phi)) and np.all(np.isfinite(mu))):
            raise ValueError("projection contains non-finite samples")
        if np.any(mu < 0):
            raise ValueError("attenuation mu must be >= 0")
        object.__setattr__(self, "phi", phi)
        object.__setattr__(self, "mu", mu)


@dataclass(frozen=True)
class TransmissionFunction:
    """Transmission ``o`` with ``o == 1`` outside the index box ``support``."""

    o: ComplexField
    support: Box

    def __post_init__(self):
        outside = ~support_mask(self.o.grid, self.support)
        if np.any(self.o.values[outside] != 1):
            raise SupportError("transmission differs from 1 outside its support box")

    @property
    def grid(self) -> Grid:
        return self.o.grid

    @classmethod
    def empty(cls, grid: Grid) -> "TransmissionFunction":
        return cls(ComplexField(grid, np.ones(grid.shape)), bounding_box(np.zeros(grid.shape, bool)))


@dataclass(frozen=True)
class Perturbation:
    """Compactly supported ``h``; samples outside ``support`` are zeroed on construction."""

    h: ComplexField
    support: Box | None = None

    def __post_init__(self):
        if self.support is None:
            object.__setattr__(self, "support", tuple((0, n) for n in self.h.grid.shape))
        inside = support_mask(self.h.grid, self.support)
        if not inside.all():
            object.__setattr__(self, "h", self.h.with_values(np.where(inside, self.h.values, 0)))

    @property
    def grid(self) -> Grid:
        return self.h.grid

    @property
    def values(self) -> np.ndarray:
        return self.h.values

    def with_values(self, values) -> "Perturbation":
        return Perturbation(self.h.with_values(values), self.support)

    @classmethod
    def zeros(cls, grid: Grid, support: Box | None = None) -> "Perturbation":
        return cls(ComplexField(grid, np.zeros(grid.shape)), support)

    def support_values(self) -> np.ndarray:
        return self.h.values[tuple(slice(lo, hi) for lo, hi in self.support)]

    def n_unknowns(self) -> int:
        """Real degrees of freedom inside the support box."""
        return 2 * int(np.prod([hi - lo for lo, hi in self.support]))


def transmission_from_projection(proj: PhaseAbsorptionProjection) -> TransmissionFunction:
    """``O = exp(-mu) exp(-i phi)``; the support box bounds the nonzero samples."""
    o = np.exp(-proj.mu) * np.exp(-1j * proj.phi)
    box = bounding_box((proj.phi != 0) | (proj.mu != 0))
    return TransmissionFunction(ComplexField(proj.grid, o), box)


def phantom_disc(grid: Grid, radius, phi_in, mu_in, smooth_edge=False) -> PhaseAbsorptionProjection:
    """Disc (interval in 1-D) of constant phase and attenuation.

    The edge is hard unless ``smooth_edge`` is set, in which case a raised
    cosine one sample wide replaces the step.
    """
    if mu_in < 0:
        raise ValueError("mu_in must be >= 0")
    if radius < 0:
        raise ValueError("radius must be >= 0")
    if 2 * radius > min(grid.max_abs()):
        raise SupportError(f"disc of radius {radius} needs a margin of at least its radius inside the grid")
    r = np.sqrt(grid.radius_squared())
    if smooth_edge and radius > 0:
        dx = min(grid.spacing)
        t = np.clip((r - (radius - dx / 2)) / dx, 0, 1)
        profile = 0.5 * (1 + np.cos(np.pi * t))
    else:
        profile = (r < radius).astype(float)
    return PhaseAbsorptionProjection(grid, phi_in * profile, mu_in * profile)


def phantom_gaussian(grid: Grid, width, phi_peak, mu_peak, cutoff=6.0, center=None) -> PhaseAbsorptionProjection:
    """Smooth Gaussian bump truncated at ``cutoff`` widths, for convergence studies."""
    if mu_peak < 0:
        raise ValueError("mu_peak must be >= 0")
    center = np.zeros(grid.ndim) if center is None else np.atleast_1d(center)
    r2 = np.zeros(grid.shape)
    for i, a in enumerate(grid.mesh()):
        r2 = r2 + (a - center[i]) ** 2
    profile = np.where(r2 < (cutoff * width) ** 2, np.exp(-r2 / (2 * width**2)), 0.0)
    return PhaseAbsorptionProjection(grid, phi_peak * profile, mu_peak * profile)


def _exit_wave(o: TransmissionFunction, probe, geom: ImagingGeometry, pad_factor: int):
    if o.grid.ndim != geom.m:
        raise ValueError(f"object grid has {o.grid.ndim} axes but geometry has m={geom.m}")
    padded = pad_field(o.o, pad_factor, fill=1.0)
    if isinstance(probe, PlaneWave):
        p = complex(probe.p0)
    else:
        p = probe_at_object(probe, geom.to_dimensionless(padded.grid)).values
    return padded, p


def holographic_intensity(o: TransmissionFunction, probe, geom: ImagingGeometry, pad_factor=2, crop=True) -> RealImage:
    """Detector intensity ``|D_d(P O)|^2`` on the object's physical grid.

    The transmission is padded by ``pad_factor`` with its background value 1
    before propagation; with ``crop=False`` the padded intensity is returned.
    """
    padded, p = _exit_wave(o, probe, geom, pad_factor)
    psi = fresnel_propagate_multiplier(padded.with_values(p * padded.values), geom)
    image = RealImage(padded.grid, np.abs(psi.values) ** 2)
    return crop_field(image, o.grid) if crop else image


def intensity_linearized(o: TransmissionFunction, probe, geom: ImagingGeometry, pad_factor=2, crop=True) -> RealImage:
    """``I_d - |D_d(P (O - 1))|^2``; may be negative."""
    padded, p = _exit_wave(o, probe, geom, pad_factor)
    full = fresnel_propagate_multiplier(padded.with_values(p * padded.values), geom)
    scattered = fresnel_propagate_multiplier(padded.with_values(p * (padded.values - 1)), geom)
    image = RealImage(padded.grid, np.abs(full.values) ** 2 - np.abs(scattered.values) ** 2)
    return crop_field(image, o.grid) if crop else image


def perturbation_from_transmission(o: TransmissionFunction, probe, geom: ImagingGeometry) -> Perturbation:
    """``h = p (o - 1)`` on the dimensionless version of the object grid."""
    grid = geom.to_dimensionless(o.grid)
    p = probe_at_object(probe, grid).values
    return Perturbation(ComplexField(grid, p * (o.o.values - 1)), o.support)


def _scattered_spectrum(h: Perturbation, weight) -> np.ndarray:
    return ft_array(weight_values(weight, h.grid) * h.values, h.grid)


def operator_F(h: Perturbation, probe, weight=FresnelChirp()) -> RealImage:
    """Nonlinear data ``|R + F(w h)|^2`` on ``h.grid.dual()``."""
    dual = h.grid.dual()
    ref = reference_term(probe, dual).values
    return RealImage(dual, np.abs(ref + _scattered_spectrum(h, weight)) ** 2)


def operator_F_lin(h: Perturbation, probe, weight=FresnelChirp(), expanded=True) -> RealImage:
    """Linearized data ``F(h) - |F(w h)|^2``.

    ``expanded=True`` evaluates ``|R|^2 + 2 Re(conj(R) F(w h))``; otherwise the
    difference of squared moduli is formed directly.
    """
    dual = h.grid.dual()
    ref = reference_term(probe, dual).values
    g = _scattered_spectrum(h, weight)
    if expanded:
        values = np.abs(ref) ** 2 + 2 * np.real(np.conj(ref) * g)
    else:
        values = np.abs(ref + g) ** 2 - np.abs(g) ** 2
    return RealImage(dual, values)


def flat_field_normalize(image: RealImage, probe, geom: ImagingGeometry, pad_factor=2) -> RealImage:
    """Divide by the empty-beam intensity ``|D_d(P)|^2`` simulated on the same grid."""
    empty = holographic_intensity(TransmissionFunction.empty(image.grid), probe, geom, pad_factor).values
    if empty.min() < 1e-14 * empty.max():
        raise DivisionByNearZero(
            f"empty-beam intensity falls to {empty.min():.3g} (max {empty.max():.3g})"
        )
    return image.with_values(image.values / empty)
