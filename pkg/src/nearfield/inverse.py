"""Reconstruction of perturbations, objects and slice volumes.

The unknown ``h`` lives on the support box of a dimensionless object grid;
data live on the dual grid. All inner products carry the grid measures, and
``h`` is handled through the real inner product ``Re <a, b>`` because the
data maps are real-linear only.

Linear problems are solved on the Tikhonov-regularized normal equations

    (T^T M T + alpha) h = T^T M b

with the conjugate residual variant of conjugate gradients, whose residual
norm never increases. Nonlinear problems use an iteratively regularized
Gauss-Newton loop around the same inner solver.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field

import numpy as np

from .errors import PhaseWrapError, SolverError
from .forward import Perturbation, TransmissionFunction, centered_box, support_mask
from .grid import ComplexField, Grid, RealImage, ft_array, ift_array
from .optics import FresnelChirp, check_probe_nonvanishing, probe_at_object, reference_term, weight_values
from .tomo import Sinogram, Volume, fbp_reconstruct, log_transmission, reconstruction_radius

__all__ = [
    "SolverConfig",
    "ConvergenceReport",
    "flin_jacobian_apply",
    "flin_jacobian_adjoint",
    "nonlinear_jacobian_apply",
    "nonlinear_jacobian_adjoint",
    "reconstruct_linear",
    "reconstruct_nonlinear",
    "recover_object",
    "tomo_reconstruct",
]


@dataclass(frozen=True)
class SolverConfig:
    """Solver hyperparameters.

    Attributes
    ----------
    reg_alpha : float
        Tikhonov weight (initial weight for Gauss-Newton).
    cg_max_iter, cg_tol : int, float
        Inner iteration cap and relative normal-equation residual target.
    gn_max_iter, gn_step_tol : int, float
        Outer iteration cap and relative step-size stopping threshold.
    """

    reg_alpha: float = 1e-8
    cg_max_iter: int = 500
    cg_tol: float = 1e-10
    gn_max_iter: int = 50
    gn_step_tol: float = 1e-10

    def __post_init__(self):
        if not (np.isfinite(self.reg_alpha) and self.reg_alpha >= 0):
            raise ValueError("reg_alpha must be >= 0")
        for name in ("cg_tol", "gn_step_tol"):
            if not 0 < getattr(self, name) < 1:
                raise ValueError(f"{name} must lie in (0, 1)")
        for name in ("cg_max_iter", "gn_max_iter"):
            value = getattr(self, name)
            if int(value) != value or value < 1:
                raise ValueError(f"{name} must be an integer >= 1")

    @classmethod
    def from_dict(cls, data: dict) -> "SolverConfig":
        known = {k: data[k] for k in cls.__dataclass_fields__ if k in data}
        unknown = set(data) - set(known)
        if unknown:
            raise ValueError(f"unknown solver settings: {sorted(unknown)}")
        return cls(**known)

    @classmethod
    def from_json(cls, text: str) -> "SolverConfig":
        return cls.from_dict(json.loads(text))

    def to_dict(self) -> dict:
        return asdict(self)

    def replace(self, **changes) -> "SolverConfig":
        return SolverConfig(**{**self.to_dict(), **changes})


@dataclass
class ConvergenceReport:
    """Iteration record of a solve; ``residuals`` are normal-equation residual norms."""

    method: str
    iterations: int = 0
    residuals: list = field(default_factory=list)
    objective: list = field(default_factory=list)
    reg_alpha: float = 0.0
    converged: bool = False
    inner: list = field(default_factory=list)

    @property
    def final_residual(self) -> float:
        return self.residuals[-1] if self.residuals else float("nan")

    def to_dict(self) -> dict:
        return {
            "method": self.method,
            "iterations": self.iterations,
            "converged": self.converged,
            "final_residual": self.final_residual,
            "final_reg_alpha": self.reg_alpha,
            "residual_history": [float(r) for r in self.residuals],
            "objective_history": [float(r) for r in self.objective],
            "inner_iterations": [int(r) for r in self.inner],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


# --- operators ------------------------------------------------------------------------------

class _Model:
    """Cached probe, weight and masks for one object grid and support box."""

    def __init__(self, probe, grid: Grid, support=None, weight=None, mask=None):
        self.grid = grid
        self.dual = grid.dual()
        self.support = tuple((0, n) for n in grid.shape) if support is None else tuple(support)
        self.inside = support_mask(grid, self.support)
        self.w = weight_values(FresnelChirp() if weight is None else weight, grid)
        self.ref = reference_term(probe, self.dual).values
        self.mask = None if mask is None else np.asarray(mask, dtype=bool).reshape(self.dual.shape)
        self.dx = grid.cell_volume
        self.dxi = self.dual.cell_volume

    def spectrum(self, h):
        return ft_array(self.w * h, self.grid)

    def apply(self, dh, base=None):
        """``2 Re(conj(R + base) F(w dh))`` on the data grid, masked."""
        ref = self.ref if base is None else self.ref + base
        out = 2 * np.real(np.conj(ref) * self.spectrum(dh))
        return out if self.mask is None else out * self.mask

    def adjoint(self, r, base=None):
        ref = self.ref if base is None else self.ref + base
        r = r if self.mask is None else r * self.mask
        return np.where(self.inside, 2 * np.conj(self.w) * ift_array(ref * r, self.dual), 0)

    def dot_h(self, a, b) -> float:
        return float(np.real(np.vdot(a, b))) * self.dx

    def dot_data(self, a, b) -> float:
        return float(np.vdot(a, b).real) * self.dxi


def _check_data_grid(data: RealImage, grid: Grid):
    if not data.grid.is_close(grid.dual(), rtol=1e-9):
        raise ValueError("data must be sampled on the dual of the object grid")


def flin_jacobian_apply(dh: Perturbation, probe, weight=FresnelChirp(), mask=None) -> RealImage:
    """``T(dh) = 2 Re(conj(R) F(w dh))``, the linear part of ``F_lin``."""
    model = _Model(probe, dh.grid, dh.support, weight, mask)
    return RealImage(model.dual, model.apply(dh.values))


def flin_jacobian_adjoint(r: RealImage, probe, grid: Grid, support=None, weight=FresnelChirp(), mask=None) -> Perturbation:
    """``T^T(r) = 2 conj(w) F^{-1}(R r)`` restricted to the support box.

    Adjoint with respect to ``sum T(h) r dxi`` and ``Re sum conj(h) g dx``.
    Samples outside ``mask`` (or ``r.mask``) are ignored.
    """
    _check_data_grid(r, grid)
    mask = r.mask if mask is None else mask
    model = _Model(probe, grid, support, weight, mask)
    return Perturbation(ComplexField(grid, model.adjoint(r.values)), model.support)


def nonlinear_jacobian_apply(h: Perturbation, dh: Perturbation, probe, weight=FresnelChirp()) -> RealImage:
    """Derivative of ``F`` at ``h``: ``2 Re(conj(R + F(w h)) F(w dh))``."""
    model = _Model(probe, h.grid, h.support, weight)
    return RealImage(model.dual, model.apply(dh.values, model.spectrum(h.values)))


def nonlinear_jacobian_adjoint(h: Perturbation, r: RealImage, probe, weight=FresnelChirp()) -> Perturbation:
    _check_data_grid(r, h.grid)
    model = _Model(probe, h.grid, h.support, weight, r.mask)
    return Perturbation(ComplexField(h.grid, model.adjoint(r.values, model.spectrum(h.values))), h.support)


# --- solvers ----------------------------------------------------------------------------------

def _conjugate_residual(normal, rhs, x0, model: _Model, alpha, cfg: SolverConfig, report: ConvergenceReport,
                        objective=None):
    """Conjugate residuals for the self-adjoint positive ``normal`` operator.

    Minimizes the normal-equation residual over growing Krylov spaces, so its
    norm is non-increasing. Stops at ``cg_tol`` relative to ``rhs``.
    """
    x = x0.copy()
    r = rhs - normal(x)
    scale = np.sqrt(model.dot_h(rhs, rhs))
    norm_r = np.sqrt(model.dot_h(r, r))
    report.residuals.append(norm_r)
    if objective is not None:
        report.objective.append(objective(x))
    if scale == 0 or norm_r <= cfg.cg_tol * scale:
        report.converged = True
        return x
    Ar = normal(r)
    p, Ap = r.copy(), Ar.copy()
    rAr = model.dot_h(r, Ar)
    increases = 0
    for it in range(1, cfg.cg_max_iter + 1):
        ApAp = model.dot_h(Ap, Ap)
        if ApAp <= 0 or rAr <= 0:
            break
        a = rAr / ApAp
        x = x + a * p
        r = r - a * Ap
        new_norm = np.sqrt(model.dot_h(r, r))
        increases = increases + 1 if new_norm > norm_r else 0
        norm_r = new_norm
        report.iterations += 1
        report.residuals.append(norm_r)
        if objective is not None:
            report.objective.append(objective(x))
        if increases >= 10:
            raise SolverError(f"conjugate residual diverged at iteration {it} (residual {norm_r:.3g})")
        if norm_r <= cfg.cg_tol * scale:
            report.converged = True
            break
        Ar = normal(r)
        rAr_new = model.dot_h(r, Ar)
        beta = rAr_new / rAr
        rAr = rAr_new
        p = r + beta * p
        Ap = Ar + beta * Ap
    return x


def _mask_of(data: RealImage, mask):
    mask = data.mask if mask is None else mask
    if mask is not None and not np.any(mask):
        raise ValueError("data mask is empty")
    return mask


def reconstruct_linear(data: RealImage, probe, grid: Grid, support=None, weight=FresnelChirp(),
                       cfg: SolverConfig | None = None, mask=None):
    """Tikhonov-regularized inversion of ``F_lin`` from (masked) data.

    Minimizes ``|M (T h - (data - |R|^2))|^2 + reg_alpha |h|^2``.

    Parameters
    ----------
    data : RealImage
        Linearized intensities on ``grid.dual()``; ``data.mask`` selects the
        observed samples unless ``mask`` is given.
    probe : PlaneWave, GaussianBeam or CustomCompact
    grid : Grid
        Dimensionless object grid.
    support : box, optional
        Index box of the unknown; defaults to the whole grid.

    Returns
    -------
    (Perturbation, ConvergenceReport)
    """
    cfg = SolverConfig() if cfg is None else cfg
    _check_data_grid(data, grid)
    model = _Model(probe, grid, support, weight, _mask_of(data, mask))
    b = data.values - np.abs(model.ref) ** 2
    alpha = cfg.reg_alpha
    report = ConvergenceReport("linear", reg_alpha=alpha)

    def normal(h):
        return model.adjoint(model.apply(h)) + alpha * h

    def objective(h):
        res = model.apply(h) - (b if model.mask is None else b * model.mask)
        return model.dot_data(res, res) + alpha * model.dot_h(h, h)

    rhs = model.adjoint(b)
    h = _conjugate_residual(normal, rhs, np.zeros(grid.shape, complex), model, alpha, cfg, report, objective)
    return Perturbation(ComplexField(grid, h), model.support), report


def reconstruct_nonlinear(data: RealImage, probe, grid: Grid, init: Perturbation | None = None, support=None,
                          weight=FresnelChirp(), cfg: SolverConfig | None = None, mask=None):
    """Iteratively regularized Gauss-Newton fit of ``F(h)`` to intensities.

    Each outer step solves

        min |M (F'(h) dh - (data - F(h)))|^2 + a_j |h + dh - init|^2

    with ``a_0 = reg_alpha`` and ``a_{j+1} = max(a_j / 2, 1e-14)``, and stops
    once ``|dh| <= gn_step_tol |h|``.

    When five consecutive steps fail to lower the best data misfit the
    iteration has stagnated. If the best misfit is below ``1e-6`` times the
    initial one this is the model or rounding floor, and the best iterate is
    returned as converged; otherwise :class:`SolverError` is raised.

    Returns
    -------
    (Perturbation, ConvergenceReport)
    """
    cfg = SolverConfig() if cfg is None else cfg
    _check_data_grid(data, grid)
    if init is not None:
        support = init.support if support is None else support
    model = _Model(probe, grid, support, weight, _mask_of(data, mask))
    h0 = np.zeros(grid.shape, complex) if init is None else np.where(model.inside, init.values, 0)
    h = h0.copy()
    target = data.values if model.mask is None else data.values * model.mask
    report = ConvergenceReport("gauss-newton")
    alpha = cfg.reg_alpha

    def misfit(h):
        g = model.spectrum(h)
        pred = np.abs(model.ref + g) ** 2
        res = target - (pred if model.mask is None else pred * model.mask)
        return g, res, model.dot_data(res, res)

    g, res, value = misfit(h)
    initial, best, best_h, stalled = value, value, h, 0
    report.objective.append(value)
    for it in range(1, cfg.gn_max_iter + 1):

        def normal(dh, g=g, a=alpha):
            return model.adjoint(model.apply(dh, g), g) + a * dh

        rhs = model.adjoint(res, g) - alpha * (h - h0)
        inner = ConvergenceReport("inner")
        dh = _conjugate_residual(normal, rhs, np.zeros_like(h), model, alpha, cfg, inner)
        report.inner.append(inner.iterations)
        report.residuals.append(inner.final_residual)
        h = h + dh
        report.iterations = it
        report.reg_alpha = alpha
        g, res, value = misfit(h)
        report.objective.append(value)
        if value < best:
            best, best_h, stalled = value, h, 0
        else:
            stalled += 1
        step, size = np.sqrt(model.dot_h(dh, dh)), np.sqrt(model.dot_h(h, h))
        if step <= cfg.gn_step_tol * size:
            report.converged = True
            break
        if stalled >= 5:
            if best <= 1e-6 * initial:
                report.converged = True
                h = best_h
                break
            raise SolverError(f"Gauss-Newton stagnated at iteration {it} (misfit {value:.3g}, best {best:.3g})")
        alpha = max(alpha / 2, 1e-14)
    return Perturbation(ComplexField(grid, h), model.support), report


def recover_object(h: Perturbation, probe) -> TransmissionFunction:
    """``o = 1 + h / p`` with the sample-plane probe on ``h.grid``."""
    p = probe_at_object(probe, h.grid)
    check_probe_nonvanishing(p)
    inside = support_mask(h.grid, h.support)
    o = np.where(inside, 1 + h.values / np.where(inside, p.values, 1), 1.0)
    return TransmissionFunction(ComplexField(h.grid, o), h.support)


# --- tomography ---------------------------------------------------------------------------------

def tomo_reconstruct(images, probe, geom, angles, volume_grid: Grid, cfg: SolverConfig | None = None,
                     nonlinear: bool = False, support_radius: float | None = None, branch_tol: float = 0.5,
                     return_reports: bool = False):
    """Slice volume from one holographic image per angle.

    Per angle the perturbation is retrieved (linearized by default, Gauss-
    Newton with ``nonlinear``), turned into a transmission, and inverted by
    :func:`~nearfield.tomo.log_transmission`; the phase and attenuation
    sinograms are then backprojected separately onto ``volume_grid``.

    Parameters
    ----------
    images : sequence of RealImage
        Detector intensities on a common 1-D physical grid.
    geom : ImagingGeometry
        Slice geometry (``m = 1``).
    angles : array_like
        Uniformly spaced angles in ``[0, pi)``, one per image.
    support_radius : float, optional
        Physical radius bounding the object; sets the per-angle support box.
        Defaults to the reconstruction disc of ``volume_grid``.
    branch_tol : float
        Passed to :func:`log_transmission`; positive values keep small
        positive phase errors from wrapping.

    Raises
    ------
    PhaseWrapError
        If a recovered phase lies within 1e-6 of the branch boundary -2 pi.
    """
    cfg = SolverConfig() if cfg is None else cfg
    angles = np.asarray(angles, dtype=float)
    if len(images) != angles.size:
        raise ValueError(f"{len(images)} images for {angles.size} angles")
    if angles.size < 2:
        raise ValueError(f"tomographic reconstruction needs at least 2 angles, got {angles.size}")
    if geom.m != 1:
        raise ValueError("tomographic slices use m = 1 geometry")
    detector = images[0].grid
    grid = geom.to_dimensionless(detector).dual()
    physical = geom.to_physical(grid)
    radius = reconstruction_radius(volume_grid) if support_radius is None else support_radius
    width = min(grid.shape[0], 2 * int(np.ceil(radius / physical.spacing[0])) + 4)
    support = centered_box(grid, width)

    r_delta = np.empty((angles.size, grid.shape[0]))
    r_beta = np.empty_like(r_delta)
    reports = []
    for a, (theta, image) in enumerate(zip(angles, images)):
        if not image.grid.is_close(detector):
            raise ValueError("all images must share one detector grid")
        data = RealImage(grid.dual(), image.values, image.mask)
        if nonlinear:
            h, rep = reconstruct_nonlinear(data, probe, grid, support=support, cfg=cfg)
        else:
            h, rep = reconstruct_linear(data, probe, grid, support=support, cfg=cfg)
        reports.append(rep)
        o = recover_object(h, probe)
        rd, rb = log_transmission(o, geom.k, branch_tol=branch_tol)
        if np.any(rd * geom.k >= 2 * np.pi - 1e-6):
            j = int(np.argmax(rd))
            raise PhaseWrapError(
                f"recovered phase reaches the branch boundary at theta={theta:.6g}",
                theta=float(theta), x=float(physical.axis()[j]), value=float(rd[j] * geom.k),
            )
        r_delta[a], r_beta[a] = rd, rb

    delta = fbp_reconstruct(Sinogram(angles, physical, r_delta), volume_grid)
    beta = fbp_reconstruct(Sinogram(angles, physical, r_beta), volume_grid)
    volume = Volume(volume_grid, delta, np.maximum(beta, 0.0))
    return (volume, reports) if return_reports else volume
