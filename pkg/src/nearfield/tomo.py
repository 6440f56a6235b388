"""Parallel-beam tomography for the slice (m = 1) geometry.

Conventions: a 2-D field ``f[i0, i1]`` samples ``f(x0, x1)`` on a centered
:class:`~nearfield.grid.Grid`; the direction ``theta = (cos t, sin t)`` is
expressed in ``(x0, x1)`` and the Radon transform is

    R f(t, s) = int f(s theta + y theta_perp) dy,   theta_perp = (-sin t, cos t).

With the unitary transform of :mod:`nearfield.grid` the Fourier slice
identity reads ``F_1[R f(t, .)](sigma) = sqrt(2 pi) F_2[f](sigma theta)``.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.ndimage import map_coordinates

from .errors import PhaseWrapError, SupportError, ZeroTransmission
from .forward import PhaseAbsorptionProjection, holographic_intensity, transmission_from_projection
from .grid import Grid, RealImage

__all__ = [
    "Volume",
    "Sinogram",
    "reconstruction_radius",
    "uniform_angles",
    "radon_2d",
    "project_volume",
    "check_no_phase_wrap",
    "log_transmission",
    "fbp_reconstruct",
    "tomo_forward",
    "phantom_blobs",
]


def reconstruction_radius(grid: Grid) -> float:
    """Radius of the disc that every line integral must fully contain.

    One sample of margin is kept so bilinear interpolation never reads past
    the grid edge.
    """
    return min(n / 2 - 1 for n in grid.shape) * min(grid.spacing)


def uniform_angles(count: int) -> np.ndarray:
    """``count`` equally spaced angles covering ``[0, pi)``."""
    return np.arange(count) * (np.pi / count)


def _check_disc_support(values: np.ndarray, grid: Grid, radius: float, what: str):
    outside = grid.radius_squared() > radius**2
    if np.any(values[outside] != 0):
        raise SupportError(f"{what} is nonzero outside the disc of radius {radius:.6g}")


@dataclass(frozen=True)
class Volume:
    """Slice of the refractive decrement ``delta`` and absorption ``beta``.

    Both fields vanish outside a disc of radius ``radius`` (defaults to
    :func:`reconstruction_radius`), which must fit inside the grid.
    """

    grid: Grid
    delta: np.ndarray
    beta: np.ndarray
    radius: float | None = None

    def __post_init__(self):
        if self.grid.ndim != 2:
            raise ValueError("a Volume lives on a 2-D grid")
        delta = np.asarray(self.delta, dtype=float).reshape(self.grid.shape)
        beta = np.asarray(self.beta, dtype=float).reshape(self.grid.shape)
        if not (np.all(np.isfinite(delta)) and np.all(np.isfinite(beta))):
            raise ValueError("volume contains non-finite samples")
        if np.any(beta < 0):
            raise ValueError("beta must be >= 0")
        limit = reconstruction_radius(self.grid)
        radius = limit if self.radius is None else float(self.radius)
        if not 0 <= radius <= limit:
            raise SupportError(f"support radius {radius:.6g} exceeds the reconstruction disc {limit:.6g}")
        _check_disc_support(delta, self.grid, radius, "delta")
        _check_disc_support(beta, self.grid, radius, "beta")
        object.__setattr__(self, "delta", delta)
        object.__setattr__(self, "beta", beta)
        object.__setattr__(self, "radius", radius)

    @classmethod
    def zeros(cls, grid: Grid) -> "Volume":
        return cls(grid, np.zeros(grid.shape), np.zeros(grid.shape))

    def scaled(self, factor: float) -> "Volume":
        return Volume(self.grid, factor * self.delta, factor * self.beta, self.radius)


@dataclass(frozen=True)
class Sinogram:
    """Line-integral data, one row per angle (angle-major)."""

    angles: np.ndarray
    detector: Grid
    values: np.ndarray
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        angles = np.asarray(self.angles, dtype=float).ravel()
        if self.detector.ndim != 1:
            raise ValueError("sinogram detector grid must be 1-D")
        if angles.size and (np.any(np.diff(angles) <= 0) or angles[0] < 0 or angles[-1] >= np.pi):
            raise ValueError("angles must be strictly increasing inside [0, pi)")
        values = np.asarray(self.values)
        if not np.iscomplexobj(values):
            values = values.astype(float)
        values = values.reshape(angles.size, self.detector.shape[0])
        if not np.all(np.isfinite(values)):
            raise ValueError("sinogram contains non-finite samples")
        object.__setattr__(self, "angles", angles)
        object.__setattr__(self, "values", values)

    def with_values(self, values) -> "Sinogram":
        return Sinogram(self.angles, self.detector, values, dict(self.meta))


def _as_array(f, grid: Grid | None):
    if isinstance(f, RealImage):
        return np.asarray(f.values, dtype=float), f.grid
    if grid is None:
        raise ValueError("grid is required when f is a plain array")
    return np.asarray(f, dtype=float).reshape(grid.shape), grid


def radon_2d(f, angles, detector: Grid | None = None, grid: Grid | None = None) -> Sinogram:
    """Line integrals of a compactly supported 2-D field.

    Samples along each line are spaced half a pixel apart and read by bilinear
    interpolation; the trapezoid rule sums them.

    Parameters
    ----------
    f : RealImage or ndarray
        Field on a square-pixel 2-D grid; pass ``grid`` for a plain array.
    angles : array_like
        Strictly increasing angles in ``[0, pi)``.
    detector : Grid, optional
        1-D detector grid; defaults to the object's first axis.

    Raises
    ------
    SupportError
        If ``f`` is nonzero outside :func:`reconstruction_radius`.
    """
    values, grid = _as_array(f, grid)
    if grid.ndim != 2 or not np.isclose(grid.spacing[0], grid.spacing[1], rtol=1e-12):
        raise ValueError("radon_2d needs a 2-D grid with square pixels")
    dx = grid.spacing[0]
    radius = reconstruction_radius(grid)
    _check_disc_support(values, grid, radius, "field")
    detector = Grid.uniform(grid.shape[0], dx) if detector is None else detector
    angles = np.asarray(angles, dtype=float)

    step = dx / 2
    m = int(np.ceil(radius / step))
    y = np.arange(-m, m + 1) * step
    weights = np.full(y.size, step)
    weights[[0, -1]] = step / 2
    s = detector.axis()
    origin = np.array([n // 2 for n in grid.shape], dtype=float)

    out = np.empty((angles.size, s.size))
    for a, t in enumerate(angles):
        c, sn = np.cos(t), np.sin(t)
        x0 = s[:, None] * c - y[None, :] * sn
        x1 = s[:, None] * sn + y[None, :] * c
        coords = np.stack([x0 / dx + origin[0], x1 / dx + origin[1]])
        samples = map_coordinates(values, coords, order=1, mode="constant", cval=0.0)
        out[a] = samples @ weights
    return Sinogram(angles, detector, out)


def project_volume(v: Volume, theta: float, k: float, detector: Grid | None = None):
    """Projected phase and attenuation at one angle, and the transmission.

    Returns ``(PhaseAbsorptionProjection, TransmissionFunction)`` on the 1-D
    detector grid with ``phi = k R delta`` and ``mu = k R beta``.
    """
    sino = radon_2d(v.delta, [theta], detector, v.grid)
    mu = radon_2d(v.beta, [theta], detector, v.grid).values[0]
    # bilinear sums of a nonnegative field are nonnegative up to rounding
    proj = PhaseAbsorptionProjection(sino.detector, k * sino.values[0], np.maximum(k * mu, 0.0))
    return proj, transmission_from_projection(proj)


def check_no_phase_wrap(v: Volume, k: float, n_angles: int = 180, warn_only: bool = False) -> float:
    """Largest projected phase ``k R delta`` over ``n_angles`` (at least 180) angles.

    Raises :class:`PhaseWrapError` unless every projected phase lies in
    ``[-1e-12, 2 pi)``; with ``warn_only`` a warning is issued instead.
    """
    angles = uniform_angles(max(int(n_angles), 180))
    sino = radon_2d(v.delta, angles, grid=v.grid)
    phase = k * sino.values
    peak = float(phase.max())
    low = float(phase.min())
    bad = None
    if peak >= 2 * np.pi:
        a, j = np.unravel_index(np.argmax(phase), phase.shape)
        bad = f"projected phase {peak:.6g} reaches 2*pi"
    elif low < -1e-12:
        a, j = np.unravel_index(np.argmin(phase), phase.shape)
        bad = f"projected phase {low:.6g} is negative"
    if bad is not None:
        theta, x = float(angles[a]), float(sino.detector.axis()[j])
        message = f"{bad} at theta={theta:.6g} rad, x={x:.6g}"
        if not warn_only:
            raise PhaseWrapError(message, theta=theta, x=x, value=float(phase[a, j]))
        warnings.warn(message, stacklevel=2)
    return peak


def log_transmission(o_theta, k: float, branch_tol: float = 0.0):
    """Invert ``o = exp(-i k R delta - k R beta)`` on the branch ``Im log o in (-2 pi, 0]``.

    Parameters
    ----------
    o_theta : TransmissionFunction or ComplexField or ndarray
    k : float
        Wavenumber.
    branch_tol : float
        Phases in ``(0, branch_tol]`` are kept positive instead of being
        mapped next to ``-2 pi``. Zero keeps the strict branch.

    Returns
    -------
    (r_delta, r_beta) : tuple of ndarray
        ``r_delta = -Im(log o) / k`` and ``r_beta = -Re(log o) / k``.
    """
    o = getattr(o_theta, "o", o_theta)
    o = np.asarray(getattr(o, "values", o), dtype=complex)
    mod = np.abs(o)
    if mod.min() < 1e-14:
        raise ZeroTransmission(f"|o| falls to {mod.min():.3g}; logarithm undefined")
    angle = np.angle(o)
    angle = np.where(angle > branch_tol, angle - 2 * np.pi, angle)
    return -angle / k, -np.log(mod) / k


def _ramlak_kernel(n: int, spacing: float) -> np.ndarray:
    """Band-limited ramp in real space on offsets ``-n .. n-1``, FFT-ordered."""
    j = np.fft.ifftshift(np.arange(-n, n))
    kern = np.zeros(2 * n)
    kern[j == 0] = 1 / (4 * spacing**2)
    odd = j % 2 == 1
    kern[odd] = -1 / (np.pi**2 * j[odd] ** 2 * spacing**2)
    return kern


def fbp_reconstruct(s: Sinogram, grid: Grid | None = None, window: str = "ramlak") -> np.ndarray:
    """Filtered backprojection of a real parallel-beam sinogram.

    Each row is convolved (zero padded to twice its length) with the Ram-Lak
    kernel, optionally apodized by a Hann window, and backprojected with
    linear interpolation. For angles covering ``[0, pi)`` uniformly,

        f(x) = (pi / N) sum_t Q_t(x . theta).

    Samples outside :func:`reconstruction_radius` of the output grid are set
    to zero, since no line integral constrains them.

    Parameters
    ----------
    s : Sinogram
        Real data with at least two uniformly spaced angles.
    grid : Grid, optional
        Output grid; defaults to a square grid matching the detector.
    window : {"ramlak", "hann"}
    """
    if s.angles.size < 2:
        raise ValueError(f"filtered backprojection needs at least 2 angles, got {s.angles.size}")
    steps = np.diff(s.angles)
    if np.ptp(steps) > 1e-9 * steps.mean():
        raise ValueError("filtered backprojection needs uniformly spaced angles")
    if np.iscomplexobj(s.values):
        raise ValueError("filtered backprojection takes real data; split complex sinograms first")
    n = s.detector.shape[0]
    tau = s.detector.spacing[0]
    grid = Grid.uniform(n, tau, 2) if grid is None else grid

    spectrum = np.fft.fft(_ramlak_kernel(n, tau))
    if window == "hann":
        nu = np.fft.fftfreq(2 * n)
        spectrum = spectrum * 0.5 * (1 + np.cos(2 * np.pi * nu))
    elif window != "ramlak":
        raise ValueError(f"unknown window {window!r}")
    padded = np.zeros((s.angles.size, 2 * n))
    padded[:, :n] = s.values
    filtered = tau * np.real(np.fft.ifft(np.fft.fft(padded, axis=1) * spectrum, axis=1))[:, :n]

    x0, x1 = grid.mesh()
    det = s.detector.axis()
    out = np.zeros(grid.shape)
    for t, q in zip(s.angles, filtered):
        out += np.interp(x0 * np.cos(t) + x1 * np.sin(t), det, q, left=0.0, right=0.0)
    out[grid.radius_squared() > reconstruction_radius(grid) ** 2] = 0.0
    return out * steps.mean()


def tomo_forward(v: Volume, probe, geom, angles, detector: Grid | None = None, pad_factor: int = 2,
                 allow_wrap: bool = False) -> list[RealImage]:
    """Holographic intensity for every angle of a slice volume.

    ``geom`` must have ``m = 1``; its pixel is the detector spacing. The
    phase-wrap check runs first and only warns when ``allow_wrap`` is set.
    """
    if geom.m != 1:
        raise ValueError("tomographic slices use m = 1 geometry")
    check_no_phase_wrap(v, geom.k, warn_only=allow_wrap)
    detector = geom.physical_grid(2 * v.grid.shape[0]) if detector is None else detector
    images = []
    for t in np.asarray(angles, dtype=float):
        _, o = project_volume(v, t, geom.k, detector)
        images.append(holographic_intensity(o, probe, geom, pad_factor))
    return images


def phantom_blobs(grid: Grid, k: float, peak_phase: float, peak_absorption: float, support_frac: float = 0.5,
                  seed: int | None = 0) -> Volume:
    """Smooth weak slice phantom made of a few Gaussian blobs.

    The blobs are tapered to zero inside a disc of ``support_frac`` times
    the reconstruction radius, and ``delta`` and ``beta`` are scaled so the
    largest projected phase ``k R delta`` and attenuation ``k R beta`` over
    180 angles equal ``peak_phase`` and ``peak_absorption``.
    """
    rng = np.random.default_rng(seed)
    radius = support_frac * reconstruction_radius(grid)
    x0, x1 = grid.mesh()
    r2 = x0**2 + x1**2
    taper = np.where(r2 < radius**2, np.cos(0.5 * np.pi * np.sqrt(r2) / radius) ** 2, 0.0)

    def blobs(count):
        total = np.zeros(grid.shape)
        for _ in range(count):
            rho = radius * 0.45 * np.sqrt(rng.uniform())
            ang = rng.uniform(0, 2 * np.pi)
            w = radius * rng.uniform(0.2, 0.35)
            total += rng.uniform(0.5, 1.0) * np.exp(-((x0 - rho * np.cos(ang)) ** 2 + (x1 - rho * np.sin(ang)) ** 2) / (2 * w**2))
        return total * taper

    delta, beta = blobs(3), blobs(3)
    angles = uniform_angles(180)
    pd = radon_2d(delta, angles, grid=grid).values.max()
    pb = radon_2d(beta, angles, grid=grid).values.max()
    return Volume(grid, delta * peak_phase / (k * pd), beta * peak_absorption / (k * pb), radius)
