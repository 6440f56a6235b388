"""Centered uniform grids, sampled fields and the unitary Fourier transform.

Sample positions on every axis are ``x_j = (j - n/2) * spacing`` for
``j = 0 .. n-1`` with ``n`` even, so the origin is an explicit sample and the
grid is symmetric up to the single unpaired sample at ``-n/2 * spacing``.

The Fourier transform uses the unitary angular-frequency convention

    F(f)(xi) = (2 pi)^(-m/2) * integral f(x) exp(-i xi.x) dx,

discretized as a Riemann sum and evaluated with a centered FFT. Its output
lives on the dual grid with spacing ``2 pi / (n * spacing)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.fft

__all__ = [
    "Grid",
    "ComplexField",
    "RealImage",
    "fourier_transform",
    "inverse_fourier_transform",
    "pad_field",
    "crop_field",
    "ft_array",
    "ift_array",
]


@dataclass(frozen=True)
class Grid:
    """Uniform centered grid with one or two axes."""

    shape: tuple[int, ...]
    spacing: tuple[float, ...]

    def __post_init__(self):
        shape = tuple(int(n) for n in np.atleast_1d(self.shape))
        spacing = tuple(float(s) for s in np.atleast_1d(self.spacing))
        if len(spacing) == 1 and len(shape) > 1:
            spacing = spacing * len(shape)
        if len(shape) not in (1, 2) or len(spacing) != len(shape):
            raise ValueError(f"grid needs 1 or 2 axes, got shape={shape}, spacing={spacing}")
        for n, s in zip(shape, spacing):
            if n < 2 or n % 2:
                raise ValueError(f"axis size must be even and >= 2, got {n}")
            if not (np.isfinite(s) and s > 0):
                raise ValueError(f"spacing must be positive, got {s}")
        object.__setattr__(self, "shape", shape)
        object.__setattr__(self, "spacing", spacing)

    @classmethod
    def uniform(cls, n: int, spacing: float, ndim: int = 1) -> "Grid":
        return cls((n,) * ndim, (spacing,) * ndim)

    @property
    def ndim(self) -> int:
        return len(self.shape)

    @property
    def size(self) -> int:
        return int(np.prod(self.shape))

    @property
    def cell_volume(self) -> float:
        """Measure of one sample, ``prod(spacing)``."""
        return float(np.prod(self.spacing))

    def axis(self, i: int = 0) -> np.ndarray:
        n = self.shape[i]
        return (np.arange(n) - n // 2) * self.spacing[i]

    def axes(self) -> list[np.ndarray]:
        return [self.axis(i) for i in range(self.ndim)]

    def mesh(self) -> list[np.ndarray]:
        return np.meshgrid(*self.axes(), indexing="ij")

    def radius_squared(self) -> np.ndarray:
        """``|x|^2`` at every sample."""
        r2 = np.zeros(self.shape)
        for i, a in enumerate(self.axes()):
            sl = [np.newaxis] * self.ndim
            sl[i] = slice(None)
            r2 = r2 + a[tuple(sl)] ** 2
        return r2

    def max_abs(self) -> tuple[float, ...]:
        """Largest ``|x|`` per axis (attained by the unpaired first sample)."""
        return tuple(n // 2 * s for n, s in zip(self.shape, self.spacing))

    def dual(self) -> "Grid":
        return Grid(self.shape, tuple(2 * np.pi / (n * s) for n, s in zip(self.shape, self.spacing)))

    def scaled(self, factor: float) -> "Grid":
        return Grid(self.shape, tuple(s * factor for s in self.spacing))

    def is_close(self, other: "Grid", rtol: float = 1e-12) -> bool:
        return self.shape == other.shape and bool(
            np.allclose(self.spacing, other.spacing, rtol=rtol, atol=0)
        )


def _check_values(grid: Grid, values, dtype) -> np.ndarray:
    values = np.asarray(values, dtype=dtype)
    if values.shape != grid.shape:
        if values.size == grid.size:
            values = values.reshape(grid.shape)
        else:
            raise ValueError(f"values of shape {values.shape} do not match grid {grid.shape}")
    if not np.all(np.isfinite(values)):
        raise ValueError("field contains NaN or Inf samples")
    return values


@dataclass(frozen=True)
class ComplexField:
    """Complex samples on a grid. ``values`` has shape ``grid.shape``."""

    grid: Grid
    values: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "values", _check_values(self.grid, self.values, np.complex128))

    def with_values(self, values) -> "ComplexField":
        return ComplexField(self.grid, values)

    def norm(self) -> float:
        """L2 norm including the grid measure."""
        return float(np.sqrt(np.sum(np.abs(self.values) ** 2) * self.grid.cell_volume))

    def energy(self) -> float:
        return float(np.sum(np.abs(self.values) ** 2) * self.grid.cell_volume)


@dataclass(frozen=True)
class RealImage:
    """Real samples on a grid with an optional data mask (True = inside U)."""

    grid: Grid
    values: np.ndarray
    mask: np.ndarray | None = field(default=None)

    def __post_init__(self):
        object.__setattr__(self, "values", _check_values(self.grid, self.values, np.float64))
        if self.mask is not None:
            mask = np.asarray(self.mask, dtype=bool)
            if mask.size != self.values.size:
                raise ValueError("mask length does not match values")
            object.__setattr__(self, "mask", mask.reshape(self.grid.shape))

    def with_values(self, values) -> "RealImage":
        return RealImage(self.grid, values, self.mask)

    def with_mask(self, mask) -> "RealImage":
        return RealImage(self.grid, self.values, mask)

    def masked_values(self) -> np.ndarray:
        """Values with samples outside the mask set to zero."""
        if self.mask is None:
            return self.values
        return np.where(self.mask, self.values, 0.0)


def _centered_axes(ndim_grid: int, ndim_values: int) -> tuple[int, ...]:
    return tuple(range(ndim_values - ndim_grid, ndim_values))


def ft_array(values: np.ndarray, grid: Grid) -> np.ndarray:
    """Unitary transform of an array whose trailing axes match ``grid``.

    Leading axes are treated as a batch.
    """
    axes = _centered_axes(grid.ndim, np.ndim(values))
    if np.shape(values)[-grid.ndim:] != grid.shape:
        raise ValueError(f"array shape {np.shape(values)} does not end with grid {grid.shape}")
    out = scipy.fft.fftshift(
        scipy.fft.fftn(scipy.fft.ifftshift(values, axes=axes), axes=axes), axes=axes
    )
    return out * (grid.cell_volume / (2 * np.pi) ** (grid.ndim / 2))


def ift_array(values: np.ndarray, dual: Grid) -> np.ndarray:
    """Inverse of :func:`ft_array`; ``dual`` is the grid the input lives on."""
    axes = _centered_axes(dual.ndim, np.ndim(values))
    if np.shape(values)[-dual.ndim:] != dual.shape:
        raise ValueError(f"array shape {np.shape(values)} does not end with grid {dual.shape}")
    out = scipy.fft.fftshift(
        scipy.fft.ifftn(scipy.fft.ifftshift(values, axes=axes), axes=axes), axes=axes
    )
    return out * (dual.size * dual.cell_volume / (2 * np.pi) ** (dual.ndim / 2))


def fourier_transform(f: ComplexField) -> ComplexField:
    """Unitary Fourier transform; the result lives on ``f.grid.dual()``.

    Parseval holds with grid measures:
    ``sum |F f|^2 * dxi^m == sum |f|^2 * dx^m``.
    """
    return ComplexField(f.grid.dual(), ft_array(f.values, f.grid))


def inverse_fourier_transform(g: ComplexField) -> ComplexField:
    """Inverse of :func:`fourier_transform`; the result lives on ``g.grid.dual()``."""
    return ComplexField(g.grid.dual(), ift_array(g.values, g.grid))


def _embed_slices(small: tuple[int, ...], big: tuple[int, ...]) -> tuple[slice, ...]:
    return tuple(slice((b - s) // 2, (b - s) // 2 + s) for s, b in zip(small, big))


def pad_field(f: ComplexField, factor: int = 2, fill: complex = 0.0) -> ComplexField:
    """Embed ``f`` in the center of a grid ``factor`` times larger per axis.

    Sample positions are preserved, so ``crop_field(pad_field(f, k), f.grid)``
    returns ``f`` bit for bit.
    """
    factor = int(factor)
    if factor < 1:
        raise ValueError(f"pad factor must be >= 1, got {factor}")
    if factor == 1:
        return f
    big = Grid(tuple(n * factor for n in f.grid.shape), f.grid.spacing)
    values = np.full(big.shape, fill, dtype=np.complex128)
    values[_embed_slices(f.grid.shape, big.shape)] = f.values
    return ComplexField(big, values)


def crop_field(f, grid: Grid):
    """Cut the centered window ``grid`` out of a field or image on a larger grid."""
    if f.grid.ndim != grid.ndim or any(s > b for s, b in zip(grid.shape, f.grid.shape)):
        raise ValueError(f"cannot crop {f.grid.shape} to {grid.shape}")
    if not np.allclose(f.grid.spacing, grid.spacing, rtol=1e-12, atol=0):
        raise ValueError("crop target must have the same spacing")
    sl = _embed_slices(grid.shape, f.grid.shape)
    if isinstance(f, RealImage):
        mask = None if f.mask is None else f.mask[sl]
        return RealImage(grid, f.values[sl], mask)
    return ComplexField(grid, f.values[sl])
