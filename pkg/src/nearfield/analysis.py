"""Dense numerical probes of the injectivity of the linearized data map.

The real-linear map ``T(h) = 2 Re(conj(R) F(w h))`` is assembled column by
column for the real and imaginary parts of every unknown in a support box and
its singular spectrum is inspected, for full data and for data restricted to
contiguous windows of the detector.

Two discretizations are available:

* ``data_grid=None`` uses the FFT model of :mod:`nearfield.inverse`, with data
  on the dual of the object grid. This matches the reconstruction code exactly.
* an explicit ``data_grid`` evaluates the transform by direct quadrature. The
  unknowns are then weights of point samples ``h = sum_j h_j dx delta(x - x_j)``
  and every entry is an exact evaluation of the continuous map on that
  subspace, so object and data spacings can be chosen freely.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import BudgetError, SolverError
from .forward import Perturbation, support_mask
from .grid import Grid, RealImage
from .inverse import _Model
from .optics import CustomWeight, FresnelChirp, GaussianBeam, PlaneWave, gamma_factor, reference_term

__all__ = [
    "MAX_UNKNOWNS",
    "RANK_RTOL",
    "InjectivityReport",
    "ExperimentResult",
    "default_probe_grids",
    "contiguous_mask",
    "assemble_linearized_matrix",
    "linearized_apply_direct",
    "injectivity_probe",
    "restricted_data_experiment",
    "alpha_sweep",
]

MAX_UNKNOWNS = 4096
RANK_RTOL = 1e-12


def default_probe_grids(n_complex: int = 32):
    """Object grid, support box and data grid of the default injectivity setup.

    ``n_complex`` point samples at spacing 2 form the support; the data grid
    has ``4 n_complex`` samples (twice the number of real unknowns) at spacing
    ``12.8 / (4 n_complex)``. The data window is narrow enough that a Gaussian
    envelope ``exp(-xi^2)`` still carries signal across all of it.
    """
    n_complex = int(n_complex)
    if n_complex < 2 or n_complex % 2:
        raise ValueError("n_complex must be even and >= 2")
    grid = Grid.uniform(n_complex, 2.0)
    n_data = 4 * n_complex
    data_grid = Grid.uniform(n_data, 12.8 / n_data)
    return grid, ((0, n_complex),), data_grid


def contiguous_mask(shape, fraction: float) -> np.ndarray:
    """Centered contiguous window covering ``fraction`` of the samples.

    In 2-D the window is a rectangle with side fraction ``sqrt(fraction)``.
    """
    shape = tuple(np.atleast_1d(shape))
    if not 0 < fraction <= 1:
        raise ValueError(f"mask fraction must lie in (0, 1], got {fraction}")
    side = fraction ** (1 / len(shape))
    mask = np.zeros(shape, dtype=bool)
    index = []
    for n in shape:
        w = max(1, int(round(side * n)))
        lo = n // 2 - w // 2
        index.append(slice(lo, lo + w))
    mask[tuple(index)] = True
    return mask


def _describe_mask(mask) -> str:
    if mask is None:
        return "full"
    mask = np.asarray(mask, dtype=bool)
    ranges = []
    for ax in range(mask.ndim):
        other = tuple(i for i in range(mask.ndim) if i != ax)
        idx = np.flatnonzero(mask.any(axis=other) if other else mask)
        ranges.append(f"{idx[0]}:{idx[-1] + 1}" if idx.size else "empty")
    return f"{100 * mask.mean():.4g}% [{','.join(ranges)}]"


def _reference_values(probe, data_grid: Grid, exact: bool = False) -> np.ndarray:
    """Reference term on the data grid; a bare complex number is read as ``alpha``.

    For a bare exponent the reference is ``exp(alpha xi^2) / gamma``, i.e. a
    unit-amplitude probe with no restriction on the sign of ``Im(alpha)``.
    With ``exact`` the closed forms are evaluated pointwise without the
    chirp-sampling check, which only concerns FFT-based use of the samples.
    """
    gamma = gamma_factor(data_grid.ndim)
    xi2 = data_grid.radius_squared()
    if isinstance(probe, (int, float, complex, np.number)):
        return np.exp(complex(probe) * xi2) / gamma
    if exact and isinstance(probe, (PlaneWave, GaussianBeam)):
        return complex(probe.p0) / gamma * np.exp(probe.alpha * xi2)
    return reference_term(probe, data_grid).values


def _direct_kernel(grid: Grid, support, data_grid: Grid, weight) -> tuple[np.ndarray, np.ndarray]:
    """Complex matrix ``K`` with ``F(w h)(xi_i) = sum_j K_ij h_j`` on the support."""
    if data_grid.ndim != grid.ndim:
        raise ValueError("object and data grids must have the same dimension")
    inside = support_mask(grid, support).ravel()
    x = np.stack([m.ravel()[inside] for m in grid.mesh()], axis=-1)
    xi = np.stack([m.ravel() for m in data_grid.mesh()], axis=-1)
    if isinstance(weight, FresnelChirp) or weight is None:
        w = np.exp(0.5j * np.sum(x**2, axis=-1))
    elif isinstance(weight, CustomWeight):
        if not weight.w.grid.is_close(grid):
            raise ValueError("custom weight grid does not match the object grid")
        w = weight.w.values.ravel()[inside]
    else:
        raise TypeError(f"unknown weight {weight!r}")
    scale = grid.cell_volume / (2 * np.pi) ** (grid.ndim / 2)
    return np.exp(-1j * xi @ x.T) * (w * scale)[None, :], inside


def linearized_apply_direct(h: Perturbation, probe, data_grid: Grid, weight=FresnelChirp(), mask=None) -> RealImage:
    """``T(h)`` on an arbitrary data grid by direct summation, without a matrix.

    Evaluates ``2 Re(conj(R(xi)) F(w h)(xi))`` one data sample at a time.
    Masked samples are set to zero.
    """
    inside = support_mask(h.grid, h.support)
    x = [m[inside] for m in h.grid.mesh()]
    if isinstance(weight, FresnelChirp) or weight is None:
        wh = np.exp(0.5j * sum(c**2 for c in x)) * h.values[inside]
    else:
        wh = weight.w.values[inside] * h.values[inside]
    ref = _reference_values(probe, data_grid, exact=True).ravel()
    scale = h.grid.cell_volume / (2 * np.pi) ** (h.grid.ndim / 2)
    out = np.empty(data_grid.size)
    for i, point in enumerate(zip(*(m.ravel() for m in data_grid.mesh()))):
        phase = sum(p * c for p, c in zip(point, x))
        out[i] = 2 * np.real(np.conj(ref[i]) * scale * np.sum(np.exp(-1j * phase) * wh))
    out = out.reshape(data_grid.shape)
    if mask is not None:
        out = out * np.asarray(mask, dtype=bool).reshape(data_grid.shape)
    return RealImage(data_grid, out, mask)


def assemble_linearized_matrix(probe, grid: Grid, support=None, data_grid: Grid | None = None, mask=None,
                               weight=FresnelChirp(), max_unknowns: int = MAX_UNKNOWNS,
                               method: str | None = None) -> np.ndarray:
    """Dense real matrix of ``T`` restricted to a support box and a data mask.

    Parameters
    ----------
    probe : PlaneWave, GaussianBeam, CustomCompact or complex
        Illumination; a bare complex number is used as the exponent ``alpha``
        of a unit reference ``exp(alpha xi^2)``.
    grid : Grid
        Dimensionless object grid.
    support : box, optional
        Index box of the unknowns (whole grid by default).
    data_grid : Grid, optional
        Detector samples. ``None`` means the FFT dual of ``grid``; any other
        grid switches to direct quadrature (see the module notes).
    mask : array of bool, optional
        Data samples kept as rows.
    max_unknowns : int
        Budget on the number of real unknowns (columns).
    method : {"fft", "direct"}, optional
        Forces a discretization. The default is ``"fft"`` when the data grid
        is the dual of ``grid`` and ``"direct"`` otherwise.

    Returns
    -------
    ndarray, shape (n_data, 2 * n_support)
        ``A @ concatenate([Re h, Im h])`` equals the masked samples of ``T(h)``
        in C order. Columns follow the support samples in C order, real parts
        first.

    Raises
    ------
    BudgetError
        If ``2 * n_support`` exceeds ``max_unknowns``.
    """
    inside = support_mask(grid, support)
    n_cols = 2 * int(inside.sum())
    if n_cols > max_unknowns:
        raise BudgetError(f"{n_cols} real unknowns exceed the dense budget of {max_unknowns}")
    on_dual = data_grid is None or data_grid.is_close(grid.dual(), rtol=1e-12)
    method = ("fft" if on_dual else "direct") if method is None else method
    if method not in ("fft", "direct"):
        raise ValueError(f"unknown method {method!r}")
    if method == "fft" and not on_dual:
        raise ValueError("the FFT discretization needs data on the dual grid")
    data_grid = grid.dual() if data_grid is None else data_grid
    rows = np.ones(data_grid.size, dtype=bool) if mask is None else np.asarray(mask, dtype=bool).ravel()
    if rows.size != data_grid.size:
        raise ValueError("mask does not match the data grid")

    if method == "fft" and not isinstance(probe, (int, float, complex, np.number)):
        model = _Model(probe, grid, support, weight)
        idx = np.flatnonzero(inside.ravel())
        cols = np.empty((data_grid.size, n_cols))
        for c, unit in enumerate((1.0, 1j)):
            for j, flat in enumerate(idx):
                e = np.zeros(grid.size, dtype=complex)
                e[flat] = unit
                cols[:, c * idx.size + j] = model.apply(e.reshape(grid.shape)).ravel()
        return cols[rows]

    kernel, _ = _direct_kernel(grid, support, data_grid, weight)
    B = np.conj(_reference_values(probe, data_grid, exact=True).ravel())[:, None] * kernel
    return np.hstack([2 * B.real, -2 * B.imag])[rows]


@dataclass
class InjectivityReport:
    """Singular spectrum of one assembled matrix."""

    n_unknowns: int
    n_data: int
    singular_values: np.ndarray
    rank: int
    mask: str = "full"
    threshold: float = RANK_RTOL

    def __post_init__(self):
        s = np.asarray(self.singular_values, dtype=float)
        if np.any(s < 0) or np.any(np.diff(s) > 0):
            raise ValueError("singular values must be nonnegative and descending")
        if self.rank > min(self.n_unknowns, self.n_data):
            raise ValueError("rank exceeds the matrix dimensions")
        self.singular_values = s

    @property
    def sigma_max(self) -> float:
        return float(self.singular_values[0]) if self.singular_values.size else 0.0

    @property
    def sigma_min(self) -> float:
        """Smallest of the ``n_unknowns`` singular values (0 for missing ones)."""
        s = self.singular_values
        return float(s[self.n_unknowns - 1]) if s.size >= self.n_unknowns else 0.0

    @property
    def injective(self) -> bool:
        return self.rank == self.n_unknowns

    def to_dict(self) -> dict:
        return {
            "n_unknowns": self.n_unknowns,
            "n_data": self.n_data,
            "rank": self.rank,
            "injective": self.injective,
            "sigma_max": self.sigma_max,
            "sigma_min": self.sigma_min,
            "threshold": self.threshold,
            "mask": self.mask,
            "singular_values": self.singular_values.tolist(),
        }


def injectivity_probe(A: np.ndarray, mask_description: str = "full", rtol: float = RANK_RTOL) -> InjectivityReport:
    """Full SVD of ``A`` with numerical rank at ``rtol * sigma_max``."""
    A = np.asarray(A, dtype=float)
    if A.ndim != 2:
        raise ValueError("expected a 2-D matrix")
    try:
        s = np.linalg.svd(A, compute_uv=False)
    except np.linalg.LinAlgError as exc:
        raise SolverError(f"SVD failed: {exc}") from exc
    rank = int(np.count_nonzero(s > rtol * s[0])) if s.size and s[0] > 0 else 0
    return InjectivityReport(A.shape[1], A.shape[0], s, rank, mask_description, rtol)


@dataclass
class ExperimentResult:
    """Reports and reconstruction errors of a restricted-data experiment."""

    fractions: list
    reports: list
    errors: list
    reg_alpha: float
    meta: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "reg_alpha": self.reg_alpha,
            "meta": self.meta,
            "runs": [
                {"fraction": f, "reconstruction_error": e, **r.to_dict()}
                for f, r, e in zip(self.fractions, self.reports, self.errors)
            ],
        }

    def write(self, out_dir, stem: str = "injectivity") -> tuple[Path, Path]:
        """Write ``<stem>.json`` and ``<stem>_spectra.csv`` (index, sigma per mask)."""
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        json_path = out / f"{stem}.json"
        json_path.write_text(json.dumps(self.to_dict(), indent=2))
        csv_path = out / f"{stem}_spectra.csv"
        with open(csv_path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["fraction", "index", "sigma"])
            for f, r in zip(self.fractions, self.reports):
                for i, s in enumerate(r.singular_values):
                    writer.writerow([f, i, repr(float(s))])
        return json_path, csv_path


def _tikhonov(A, b, alpha):
    u, s, vt = np.linalg.svd(A, full_matrices=False)
    return vt.T @ (s / (s**2 + alpha) * (u.T @ b))


def restricted_data_experiment(probe, grid: Grid | None = None, support=None, data_grid: Grid | None = None,
                               fractions=(1.0, 0.5, 0.25, 0.1), reg_alpha: float = 1e-8, h=None, seed: int = 0,
                               weight=FresnelChirp(), max_unknowns: int = MAX_UNKNOWNS) -> ExperimentResult:
    """Spectra and noise-free Tikhonov errors for nested contiguous data windows.

    With ``grid=None`` the default setup of :func:`default_probe_grids` is used.
    The test object is ``h`` (values on the support, or a :class:`Perturbation`)
    or, by default, a seeded complex Gaussian random vector. The reconstruction
    minimizes ``dxi |A v - b|^2 + reg_alpha dx |v|^2``, the same weighting as
    :func:`nearfield.inverse.reconstruct_linear`.
    """
    if grid is None:
        grid, support, data_grid = default_probe_grids()
    inside = support_mask(grid, support)
    dual = grid.dual() if data_grid is None else data_grid
    A_full = assemble_linearized_matrix(probe, grid, support, data_grid, None, weight, max_unknowns)
    if h is None:
        rng = np.random.default_rng(seed)
        hv = rng.standard_normal(inside.sum()) + 1j * rng.standard_normal(inside.sum())
    elif isinstance(h, Perturbation):
        hv = h.values[inside]
    else:
        hv = np.asarray(h, dtype=complex).ravel()
    if hv.size != inside.sum():
        raise ValueError("test object does not match the support")
    v_true = np.concatenate([hv.real, hv.imag])
    b_full = A_full @ v_true
    ratio = grid.cell_volume / dual.cell_volume

    reports, errors = [], []
    for f in fractions:
        if f == 1:
            A, b, desc = A_full, b_full, "full"
        else:
            rows = contiguous_mask(dual.shape, f).ravel()
            A, b, desc = A_full[rows], b_full[rows], _describe_mask(rows.reshape(dual.shape))
        reports.append(injectivity_probe(A, desc))
        v = _tikhonov(A, b, reg_alpha * ratio)
        errors.append(float(np.linalg.norm(v - v_true) / np.linalg.norm(v_true)))
    meta = {
        "object_grid": {"shape": list(grid.shape), "spacing": list(grid.spacing)},
        "data_grid": {"shape": list(dual.shape), "spacing": list(dual.spacing)},
        "discretization": "fft" if data_grid is None else "direct",
    }
    return ExperimentResult(list(fractions), reports, errors, reg_alpha, meta)


def alpha_sweep(imag_parts, real_part: float = -1.0, grid: Grid | None = None, support=None,
                data_grid: Grid | None = None) -> list[tuple[complex, InjectivityReport]]:
    """Full-data spectra for reference exponents ``alpha = real_part + i t``.

    Exploratory only: it shows how the numerical rank behaves as ``Im(alpha)``
    approaches zero, where the uniqueness argument no longer applies.
    """
    if grid is None:
        grid, support, data_grid = default_probe_grids()
    out = []
    for t in imag_parts:
        alpha = complex(real_part, t)
        out.append((alpha, injectivity_probe(assemble_linearized_matrix(alpha, grid, support, data_grid))))
    return out
