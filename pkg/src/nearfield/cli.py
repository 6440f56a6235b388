"""Command-line front end.

Every command reads its parameters from flags and, optionally, from a JSON
file given with ``--config`` whose keys are the long flag names (with
underscores). Flags given on the command line override the file.

Exit codes: 0 success, 2 invalid input, 3 aliasing, 4 solver failure,
5 phase wrapping.
"""

from __future__ import annotations

import argparse
import json
import logging
import re
import sys
import warnings
from pathlib import Path

import numpy as np

from . import analysis, io
from .errors import AliasingError, BudgetError, PhaseWrapError, SolverError
from .forward import (
    TransmissionFunction,
    bounding_box,
    centered_box,
    flat_field_normalize,
    holographic_intensity,
    phantom_disc,
    phantom_gaussian,
    transmission_from_projection,
)
from .grid import ComplexField, Grid, RealImage
from .inverse import SolverConfig, reconstruct_linear, reconstruct_nonlinear, recover_object, tomo_reconstruct
from .optics import GaussianBeam, ImagingGeometry, PlaneWave, far_field_intensity
from .tomo import Volume, check_no_phase_wrap, phantom_blobs, tomo_forward, uniform_angles

log = logging.getLogger("nearfield")

EXIT_OK, EXIT_INVALID, EXIT_ALIASING, EXIT_SOLVER, EXIT_WRAP = 0, 2, 3, 4, 5

# Built-in defaults; argparse itself uses None so that config files can fill gaps.
DEFAULTS = {
    "seed": 0,
    "out": ".",
    "n": 1024,
    "dim": 2,
    "pixel": 1.0,
    "radius_frac": 0.125,
    "phi": 1.0,
    "mu": 0.1,
    "width": None,
    "k": 1.0,
    "d": None,
    "fresnel_caption": None,
    "radius": None,
    "probe": "plane",
    "p0": "1",
    "alpha0": "-1",
    "pad": 2,
    "noise_sigma": 0.0,
    "object": None,
    "intensity": None,
    "support": None,
    "mask": None,
    "reg_alpha": 1e-8,
    "cg_max_iter": 500,
    "cg_tol": 1e-10,
    "gn_max_iter": 50,
    "gn_step_tol": 1e-10,
    "angles": 180,
    "peak_phase": 0.5,
    "peak_absorption": 0.05,
    "volume": None,
    "input": None,
    "branch_tol": 0.5,
    "masks": "100,50,25,10",
    "n_complex": 32,
    "max_unknowns": analysis.MAX_UNKNOWNS,
}


class UsageError(ValueError):
    """Invalid command-line input."""


# --- parsing helpers ---------------------------------------------------------------------------

def parse_complex(text) -> complex:
    """Parse ``"re,im"``, ``"1+2j"``/``"1+2i"`` or a plain number."""
    if isinstance(text, (int, float, complex)):
        return complex(text)
    if isinstance(text, (list, tuple)):
        return complex(*map(float, text))
    s = str(text).strip().replace(" ", "")
    try:
        if "," in s:
            re_, im = s.split(",")
            return complex(float(re_), float(im))
        return complex(s.replace("i", "j"))
    except ValueError as exc:
        raise UsageError(f"cannot parse complex number {text!r}") from exc


def parse_mask(text, shape) -> np.ndarray:
    """``"x0:x1"`` or ``"x0:x1,y0:y1"`` index ranges (half open) to a boolean mask."""
    parts = str(text).split(",")
    if len(parts) != len(shape):
        raise UsageError(f"mask {text!r} needs {len(shape)} range(s)")
    mask = np.zeros(shape, dtype=bool)
    index = []
    for part, n in zip(parts, shape):
        m = re.fullmatch(r"\s*(-?\d+)\s*:\s*(-?\d+)\s*", part)
        if not m:
            raise UsageError(f"bad mask range {part!r}; expected start:stop")
        lo, hi = int(m.group(1)), int(m.group(2))
        if not 0 <= lo < hi <= n:
            raise UsageError(f"mask range {lo}:{hi} outside 0:{n}")
        index.append(slice(lo, hi))
    mask[tuple(index)] = True
    return mask


def _merge_negative_values(argv):
    """Let ``--flag -1,-0.2`` pass a negative value list to ``--flag``."""
    out = []
    for tok in argv:
        if (
            out
            and out[-1].startswith("--")
            and "=" not in out[-1]
            and re.fullmatch(r"-[\d.][\d.eE+\-,ij]*", tok)
        ):
            out[-1] = f"{out[-1]}={tok}"
        else:
            out.append(tok)
    return out


class Settings:
    """Resolved parameters: command line, then config file, then defaults."""

    def __init__(self, args: argparse.Namespace, config: dict):
        self._args = args
        self._config = config

    def __getattr__(self, name):
        value = getattr(self._args, name, None)
        if value is None:
            value = self._config.get(name, DEFAULTS.get(name))
        return value

    def flag(self, name) -> bool:
        return bool(getattr(self._args, name, False) or self._config.get(name, False))


def _probe(s: Settings):
    p0 = parse_complex(s.p0)
    if s.probe == "plane":
        return PlaneWave(p0)
    if s.probe == "gaussian":
        return GaussianBeam(p0, parse_complex(s.alpha0))
    raise UsageError(f"unknown probe {s.probe!r}")


def _probe_from_meta(meta: dict):
    desc = meta.get("probe", {"variant": "plane", "p0": [1.0, 0.0]})
    p0 = complex(*desc["p0"])
    if desc["variant"] == "gaussian":
        return GaussianBeam(p0, complex(*desc["alpha0"]))
    return PlaneWave(p0)


def _solver(s: Settings) -> SolverConfig:
    return SolverConfig(
        reg_alpha=float(s.reg_alpha),
        cg_max_iter=int(s.cg_max_iter),
        cg_tol=float(s.cg_tol),
        gn_max_iter=int(s.gn_max_iter),
        gn_step_tol=float(s.gn_step_tol),
    )


def _out(s: Settings) -> Path:
    out = Path(s.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _write_json(path: Path, doc: dict):
    path.write_text(json.dumps(doc, indent=2))


# --- commands ------------------------------------------------------------------------------------

def cmd_phantom(s: Settings) -> int:
    n, dim, pixel = int(s.n), int(s.dim), float(s.pixel)
    phi, mu = float(s.phi), float(s.mu)
    if mu < 0:
        raise UsageError(f"--mu must satisfy mu >= 0, got {mu}")
    grid = Grid.uniform(n, pixel, dim)
    radius = float(s.radius_frac) * n * pixel if s.radius is None else float(s.radius)
    if s.flag("gaussian"):
        width = radius / 3 if s.width is None else float(s.width)
        proj = phantom_gaussian(grid, width, phi, mu)
    else:
        proj = phantom_disc(grid, radius, phi, mu, smooth_edge=s.flag("smooth_edge"))
    o = transmission_from_projection(proj)
    out = _out(s)
    meta = {"kind": "gaussian" if s.flag("gaussian") else "disc", "radius": radius, "phi": phi, "mu": mu,
            "support": [list(b) for b in o.support]}
    io.save_field(out / "phi.hfld", RealImage(grid, proj.phi), meta)
    io.save_field(out / "mu.hfld", RealImage(grid, proj.mu), meta)
    io.save_field(out / "transmission.hfld", o.o, meta)
    log.info("phantom: wrote %s", out / "transmission.hfld")
    return EXIT_OK


def _geometry(s: Settings, meta: dict, grid: Grid) -> ImagingGeometry:
    """Geometry from flags; the pixel defaults to the spacing of ``grid``."""
    k, m = float(s.k), grid.ndim
    explicit = getattr(s._args, "pixel", None) or s._config.get("pixel")
    pixel = float(explicit) if explicit is not None else float(grid.spacing[0])
    if s.flag("critical"):
        return ImagingGeometry.critical(grid.shape[0], pixel, k, m)
    if s.fresnel_caption is not None:
        radius = s.radius if s.radius is not None else meta.get("radius")
        if radius is None:
            raise UsageError("--fresnel-caption needs --radius or an object with a recorded radius")
        return ImagingGeometry.from_fresnel_caption(float(s.fresnel_caption), float(radius), pixel, k, m)
    if s.d is None:
        raise UsageError("give --d, --fresnel-caption or --critical")
    return ImagingGeometry(k=k, d=float(s.d), pixel=pixel, m=m)


def cmd_simulate(s: Settings) -> int:
    out = _out(s)
    obj_path = Path(s.object) if s.object else out / "transmission.hfld"
    field, meta = io.load_field(obj_path)
    if not isinstance(field, ComplexField):
        raise UsageError(f"{obj_path} does not hold a complex transmission")
    support = tuple(tuple(b) for b in meta["support"]) if "support" in meta else bounding_box(field.values != 1)
    o = TransmissionFunction(field, support)
    geom = _geometry(s, meta, field.grid)
    if not np.isclose(geom.pixel, field.grid.spacing[0]):
        raise UsageError(f"--pixel {geom.pixel} does not match the object grid spacing {field.grid.spacing[0]}")
    probe = _probe(s)
    image = holographic_intensity(o, probe, geom, pad_factor=int(s.pad))
    if float(s.noise_sigma) > 0:
        rng = np.random.default_rng(int(s.seed))
        image = image.with_values(image.values + float(s.noise_sigma) * rng.standard_normal(image.values.shape))
    side = {"geometry": geom.to_dict(), "probe": probe.to_dict(), "object": str(obj_path),
            "fresnel_caption": geom.fresnel_caption(meta["radius"]) if "radius" in meta else None,
            "noise_sigma": float(s.noise_sigma), "seed": int(s.seed)}
    side["pgm"] = io.write_pgm(out / "intensity.pgm", image.values)
    io.save_field(out / "intensity.hfld", image, side)
    if s.flag("far_field"):
        psi0 = ComplexField(geom.to_dimensionless(field.grid), field.values)
        ff = far_field_intensity(psi0)
        scaling = io.write_pgm(out / "farfield.pgm", ff.values, scale="log10")
        io.save_field(out / "farfield.hfld", ff, {"pgm": scaling, "geometry": geom.to_dict()})
    log.info("simulate: d=%.6g, wrote %s", geom.d, out / "intensity.hfld")
    return EXIT_OK


def cmd_flatfield(s: Settings) -> int:
    out = _out(s)
    path = Path(s.intensity) if s.intensity else out / "intensity.hfld"
    image, meta = io.load_field(path)
    if "geometry" in meta and s.d is None and s.fresnel_caption is None and not s.flag("critical"):
        geom = ImagingGeometry(**meta["geometry"])
        probe = _probe_from_meta(meta)
    else:
        geom = _geometry(s, meta, image.grid)
        probe = _probe(s)
    norm = flat_field_normalize(image, probe, geom, pad_factor=int(s.pad))
    side = {"geometry": geom.to_dict(), "probe": probe.to_dict(), "source": str(path)}
    side["pgm"] = io.write_pgm(out / "flatfield.pgm", norm.values)
    io.save_field(out / "flatfield.hfld", norm, side)
    return EXIT_OK


def cmd_reconstruct(s: Settings) -> int:
    out = _out(s)
    path = Path(s.intensity) if s.intensity else out / "intensity.hfld"
    image, meta = io.load_field(path)
    if not isinstance(image, RealImage):
        raise UsageError(f"{path} does not hold a real intensity")
    if "geometry" in meta and s.d is None and s.fresnel_caption is None and not s.flag("critical"):
        geom = ImagingGeometry(**meta["geometry"])
    else:
        geom = _geometry(s, meta, image.grid)
    probe = _probe_from_meta(meta) if "probe" in meta and getattr(s._args, "probe", None) is None else _probe(s)
    data_grid = geom.to_dimensionless(image.grid)
    grid = data_grid.dual()
    width = int(s.support) if s.support is not None else max(2, image.grid.shape[0] // 4)
    support = centered_box(grid, width)
    mask = parse_mask(s.mask, image.grid.shape) if s.mask else image.mask
    data = RealImage(grid.dual(), image.values, mask)
    cfg = _solver(s)
    if s.flag("nonlinear"):
        h, report = reconstruct_nonlinear(data, probe, grid, support=support, cfg=cfg)
    else:
        h, report = reconstruct_linear(data, probe, grid, support=support, cfg=cfg)
    o = recover_object(h, probe)
    physical = geom.to_physical(grid)
    side = {"geometry": geom.to_dict(), "probe": probe.to_dict(), "support": [list(b) for b in support],
            "mask": s.mask, "physical_spacing": list(physical.spacing)}
    io.save_field(out / "h.hfld", h.h, side)
    io.save_field(out / "object.hfld", ComplexField(physical, o.o.values), side)
    _write_json(out / "convergence.json", report.to_dict())
    log.info("reconstruct: %s, %d iterations", report.method, report.iterations)
    return EXIT_OK


def _load_volume(prefix: str) -> Volume:
    delta, _ = io.load_field(f"{prefix}_delta.hfld")
    beta, _ = io.load_field(f"{prefix}_beta.hfld")
    return Volume(delta.grid, delta.values, beta.values)


def cmd_tomo_sim(s: Settings) -> int:
    out = _out(s)
    k, pixel = float(s.k), float(s.pixel)
    if s.volume:
        v = _load_volume(s.volume)
    else:
        n = int(s.n) if getattr(s._args, "n", None) is not None or "n" in s._config else 64
        grid = Grid.uniform(n, pixel, 2)
        v = phantom_blobs(grid, k, float(s.peak_phase), float(s.peak_absorption), seed=int(s.seed))
    n = v.grid.shape[0]
    geom = ImagingGeometry.critical(2 * n, pixel=v.grid.spacing[0], k=k, m=1)
    angles = uniform_angles(int(s.angles))
    probe = _probe(s)
    allow = s.flag("allow_wrap")
    check_no_phase_wrap(v, k, warn_only=allow)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore" if allow else "default")
        images = tomo_forward(v, probe, geom, angles, pad_factor=int(s.pad), allow_wrap=allow)
    stack = np.array([im.values for im in images])
    side = {"geometry": geom.to_dict(), "probe": probe.to_dict(), "angles": angles.tolist(), "k": k,
            "volume_shape": list(v.grid.shape), "volume_spacing": list(v.grid.spacing), "radius": v.radius}
    io.save_array(out / "tomo_intensities.hfld", stack, side)
    io.save_field(out / "volume_delta.hfld", RealImage(v.grid, v.delta), {"radius": v.radius})
    io.save_field(out / "volume_beta.hfld", RealImage(v.grid, v.beta), {"radius": v.radius})
    log.info("tomo sim: %d angles, wrote %s", len(angles), out / "tomo_intensities.hfld")
    return EXIT_OK


def cmd_tomo_recon(s: Settings) -> int:
    out = _out(s)
    path = Path(s.input) if s.input else out / "tomo_intensities.hfld"
    stack, meta = io.load_array(path)
    angles = np.asarray(meta.get("angles", []), dtype=float)
    if angles.size < 2:
        raise UsageError(f"tomographic reconstruction needs at least 2 angles, got {angles.size}")
    geom = ImagingGeometry(**meta["geometry"])
    probe = _probe_from_meta(meta)
    detector = geom.physical_grid(stack.shape[1])
    images = [RealImage(detector, row) for row in stack]
    vgrid = Grid(tuple(meta["volume_shape"]), tuple(meta["volume_spacing"]))
    volume, reports = tomo_reconstruct(
        images, probe, geom, angles, vgrid, cfg=_solver(s), nonlinear=s.flag("nonlinear"),
        support_radius=meta.get("radius"), branch_tol=float(s.branch_tol), return_reports=True,
    )
    io.save_field(out / "recon_delta.hfld", RealImage(vgrid, volume.delta))
    io.save_field(out / "recon_beta.hfld", RealImage(vgrid, volume.beta))
    report = {"angles": int(angles.size), "nonlinear": s.flag("nonlinear"),
              "per_angle": [r.to_dict() for r in reports]}
    truth = path.parent / "volume_delta.hfld"
    if truth.exists():
        ref = _load_volume(str(path.parent / "volume"))
        report["relative_error_delta"] = float(np.linalg.norm(volume.delta - ref.delta) / np.linalg.norm(ref.delta))
        report["relative_error_beta"] = float(np.linalg.norm(volume.beta - ref.beta) / np.linalg.norm(ref.beta))
    _write_json(out / "tomo_report.json", report)
    log.info("tomo recon: wrote %s", out / "recon_delta.hfld")
    return EXIT_OK


def cmd_probe_uniqueness(s: Settings) -> int:
    out = _out(s)
    fractions = [float(f) / 100 for f in str(s.masks).split(",")]
    if any(not 0 < f <= 1 for f in fractions):
        raise UsageError("--masks takes percentages in (0, 100]")
    fractions = sorted(fractions, reverse=True)
    probe = _probe(s)
    grid, support, data_grid = analysis.default_probe_grids(int(s.n_complex))
    result = analysis.restricted_data_experiment(
        probe, grid, support, data_grid, fractions=fractions, reg_alpha=float(s.reg_alpha),
        seed=int(s.seed), max_unknowns=int(s.max_unknowns),
    )
    result.meta["probe"] = probe.to_dict()
    result.write(out)
    for f, rep in zip(fractions, result.reports):
        log.info("mask %5.1f%%: rank %d of %d", 100 * f, rep.rank, rep.n_unknowns)
    return EXIT_OK


# --- parser --------------------------------------------------------------------------------------

def _common(parser, suppress: bool):
    default = argparse.SUPPRESS if suppress else None
    parser.add_argument("--config", default=default, help="JSON file of parameters (flags override it)")
    parser.add_argument("--seed", type=int, default=default, help="random seed (default 0)")
    parser.add_argument("--out", default=default, help="output directory (default .)")
    parser.add_argument("--quiet", action="store_true", default=default, help="only report errors")


def _geometry_flags(p):
    p.add_argument("--k", type=float, help="wavenumber (default 1)")
    p.add_argument("--d", type=float, help="propagation distance")
    p.add_argument("--pixel", type=float, help="physical sample spacing")
    p.add_argument("--fresnel-caption", type=float, help="dimensionless value 2 pi d / (k R^2); sets d")
    p.add_argument("--radius", type=float, help="feature radius R for --fresnel-caption")
    p.add_argument("--critical", action="store_true", default=None,
                   help="choose d so the dimensionless grid is critically sampled")


def _probe_flags(p):
    p.add_argument("--probe", choices=["plane", "gaussian"], help="illumination (default plane)")
    p.add_argument("--p0", help="probe amplitude, e.g. 1 or 1,0.5 (re,im)")
    p.add_argument("--alpha0", help="Gaussian exponent, e.g. -1 or -1,-0.2 (re,im)")


def _solver_flags(p):
    p.add_argument("--reg-alpha", type=float)
    p.add_argument("--cg-max-iter", type=int)
    p.add_argument("--cg-tol", type=float)
    p.add_argument("--gn-max-iter", type=int)
    p.add_argument("--gn-step-tol", type=float)
    p.add_argument("--nonlinear", action="store_true", default=None, help="Gauss-Newton instead of linearized")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="nearfield", description="Near-field holography toolkit")
    _common(parser, suppress=False)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("phantom", help="disc or Gaussian test object")
    _common(p, suppress=True)
    shape = p.add_mutually_exclusive_group()
    shape.add_argument("--disc", action="store_true", default=None)
    shape.add_argument("--gaussian", action="store_true", default=None)
    p.add_argument("--n", type=int, help="samples per axis (default 1024)")
    p.add_argument("--dim", type=int, choices=[1, 2], help="lateral dimension (default 2)")
    p.add_argument("--pixel", type=float)
    p.add_argument("--radius-frac", type=float, help="radius as a fraction of the grid width (default 0.125)")
    p.add_argument("--radius", type=float, help="radius in physical units (overrides --radius-frac)")
    p.add_argument("--phi", type=float, help="phase inside the object (default 1)")
    p.add_argument("--mu", type=float, help="attenuation inside the object, >= 0 (default 0.1)")
    p.add_argument("--width", type=float, help="Gaussian width (default radius/3)")
    p.add_argument("--smooth-edge", action="store_true", default=None)
    p.set_defaults(func=cmd_phantom)

    p = sub.add_parser("simulate", help="holographic intensity of a transmission")
    _common(p, suppress=True)
    p.add_argument("--object", help="transmission HFLD (default <out>/transmission.hfld)")
    _geometry_flags(p)
    _probe_flags(p)
    p.add_argument("--pad", type=int, help="padding factor (default 2)")
    p.add_argument("--noise-sigma", type=float, help="additive Gaussian noise level")
    p.add_argument("--far-field", action="store_true", default=None, help="also write the far-field pattern")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("reconstruct", help="recover h and the transmission from one image")
    _common(p, suppress=True)
    p.add_argument("--intensity", help="intensity HFLD (default <out>/intensity.hfld)")
    _geometry_flags(p)
    _probe_flags(p)
    p.add_argument("--support", type=int, help="support box width in samples (default n/4)")
    p.add_argument("--mask", help="data window start:stop[,start:stop] in detector samples")
    _solver_flags(p)
    p.set_defaults(func=cmd_reconstruct)

    p = sub.add_parser("tomo", help="slice tomography")
    tsub = p.add_subparsers(dest="tomo_command", required=True)
    t = tsub.add_parser("sim", help="per-angle holograms of a phantom or volume")
    _common(t, suppress=True)
    t.add_argument("--volume", help="prefix of <prefix>_delta.hfld and <prefix>_beta.hfld")
    t.add_argument("--n", type=int, help="phantom size (default 64)")
    t.add_argument("--angles", type=int, help="number of angles (default 180)")
    t.add_argument("--peak-phase", type=float, help="largest projected phase k R delta (default 0.5)")
    t.add_argument("--peak-absorption", type=float, help="largest projected attenuation (default 0.05)")
    t.add_argument("--k", type=float)
    t.add_argument("--pixel", type=float)
    t.add_argument("--pad", type=int)
    _probe_flags(t)
    t.add_argument("--allow-wrap", action="store_true", default=None, help="warn instead of failing on phase wrap")
    t.set_defaults(func=cmd_tomo_sim)
    t = tsub.add_parser("recon", help="recover delta and beta")
    _common(t, suppress=True)
    t.add_argument("--input", help="stacked intensities (default <out>/tomo_intensities.hfld)")
    t.add_argument("--branch-tol", type=float)
    _solver_flags(t)
    t.set_defaults(func=cmd_tomo_recon)

    p = sub.add_parser("probe-uniqueness", help="singular spectra of the linearized map")
    _common(p, suppress=True)
    p.add_argument("--masks", help="comma separated data fractions in percent (default 100,50,25,10)")
    _probe_flags(p)
    p.add_argument("--n-complex", type=int, help="complex unknowns (default 32)")
    p.add_argument("--reg-alpha", type=float)
    p.add_argument("--max-unknowns", type=int, help="dense budget on real unknowns (default 4096)")
    p.set_defaults(func=cmd_probe_uniqueness)

    p = sub.add_parser("flatfield", help="divide an image by the empty-beam intensity")
    _common(p, suppress=True)
    p.add_argument("--intensity", help="intensity HFLD (default <out>/intensity.hfld)")
    _geometry_flags(p)
    _probe_flags(p)
    p.add_argument("--pad", type=int)
    p.set_defaults(func=cmd_flatfield)
    return parser


def _configure_logging(quiet: bool):
    if not any(getattr(h, "_nearfield", False) for h in log.handlers):
        handler = logging.StreamHandler()
        handler.setFormatter(logging.Formatter("%(message)s"))
        handler._nearfield = True
        log.addHandler(handler)
    log.setLevel(logging.ERROR if quiet else logging.INFO)


def main(argv=None) -> int:
    parser = build_parser()
    argv = _merge_negative_values(list(sys.argv[1:] if argv is None else argv))
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    _configure_logging(bool(args.quiet))
    try:
        config = {}
        if args.config:
            config = json.loads(Path(args.config).read_text())
            if not isinstance(config, dict):
                raise UsageError("config file must hold a JSON object")
            config = {key.replace("-", "_"): value for key, value in config.items()}
        return args.func(Settings(args, config))
    except PhaseWrapError as exc:
        where = ""
        if exc.theta is not None and "theta=" not in str(exc):
            where = f" (theta={exc.theta:.6g}, x={exc.x:.6g}, phase={exc.value:.6g})"
        log.error("phase wrap: %s%s", exc, where)
        return EXIT_WRAP
    except AliasingError as exc:
        log.error("aliasing: %s", exc)
        return EXIT_ALIASING
    except SolverError as exc:
        log.error("solver failure: %s", exc)
        return EXIT_SOLVER
    except (BudgetError, ValueError, OSError, KeyError) as exc:
        log.error("invalid input: %s", exc)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
