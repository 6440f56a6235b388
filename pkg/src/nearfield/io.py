"""File formats: HFLD v1 binary fields, JSON sidecars and 16-bit PGM images.

HFLD v1 layout (all integers little-endian ``u32``)::

    b"HFLD" | version=1 | ndim | dims[ndim] | dtype | payload

``dtype`` is 1 for real float64 and 2 for complex float64 stored as
interleaved (re, im) pairs. The payload is row-major little-endian. A field
written as ``name.hfld`` gets a sidecar ``name.json`` with the grid spacing,
an optional run-length encoded mask and free-form metadata.
"""

from __future__ import annotations

import json
import struct
from pathlib import Path

import numpy as np

from .grid import ComplexField, Grid, RealImage

__all__ = [
    "HFLDError",
    "write_hfld",
    "read_hfld",
    "encode_mask",
    "decode_mask",
    "save_field",
    "load_field",
    "save_array",
    "load_array",
    "write_pgm",
    "read_pgm",
    "pgm_to_values",
]

MAGIC = b"HFLD"
VERSION = 1
DTYPE_REAL = 1
DTYPE_COMPLEX = 2


class HFLDError(ValueError):
    """Malformed or unsupported HFLD file."""


def write_hfld(path, values) -> Path:
    """Write a real or complex array as HFLD v1."""
    values = np.asarray(values)
    if np.iscomplexobj(values):
        code, payload = DTYPE_COMPLEX, np.ascontiguousarray(values, dtype="<c16")
    elif np.issubdtype(values.dtype, np.number) or values.dtype == bool:
        code, payload = DTYPE_REAL, np.ascontiguousarray(values, dtype="<f8")
    else:
        raise TypeError(f"cannot store dtype {values.dtype} in HFLD")
    header = MAGIC + struct.pack(f"<II{values.ndim}II", VERSION, values.ndim, *values.shape, code)
    path = Path(path)
    path.write_bytes(header + payload.tobytes(order="C"))
    return path


def read_hfld(path) -> np.ndarray:
    data = Path(path).read_bytes()
    if data[:4] != MAGIC:
        raise HFLDError(f"{path}: bad magic {data[:4]!r}")
    try:
        version, ndim = struct.unpack_from("<II", data, 4)
        if version != VERSION:
            raise HFLDError(f"{path}: unsupported version {version}")
        dims = struct.unpack_from(f"<{ndim}I", data, 12)
        (code,) = struct.unpack_from("<I", data, 12 + 4 * ndim)
    except struct.error as exc:
        raise HFLDError(f"{path}: truncated header") from exc
    offset = 16 + 4 * ndim
    dtype = {DTYPE_REAL: "<f8", DTYPE_COMPLEX: "<c16"}.get(code)
    if dtype is None:
        raise HFLDError(f"{path}: unknown dtype code {code}")
    count = int(np.prod(dims, dtype=np.int64))
    if len(data) - offset != count * np.dtype(dtype).itemsize:
        raise HFLDError(f"{path}: payload size does not match dims {dims}")
    return np.frombuffer(data, dtype=dtype, count=count, offset=offset).reshape(dims).astype(dtype[1:])


def encode_mask(mask) -> dict:
    """Run-length encoding of a boolean array in row-major order."""
    mask = np.asarray(mask, dtype=bool)
    flat = mask.ravel()
    if flat.size == 0:
        return {"shape": list(mask.shape), "start": False, "runs": []}
    edges = np.flatnonzero(np.diff(flat.astype(np.int8))) + 1
    bounds = np.concatenate([[0], edges, [flat.size]])
    return {"shape": list(mask.shape), "start": bool(flat[0]), "runs": np.diff(bounds).tolist()}


def decode_mask(doc: dict) -> np.ndarray:
    runs = doc["runs"]
    values = np.resize([doc["start"], not doc["start"]], len(runs)).astype(bool)
    flat = np.repeat(values, runs)
    return flat.reshape(doc["shape"])


def _sidecar(path: Path) -> Path:
    return path.with_suffix(".json")


def save_field(path, field, meta: dict | None = None) -> Path:
    """Write a :class:`ComplexField` or :class:`RealImage` with its JSON sidecar.

    ``meta`` (geometry, probe, scaling, ...) is stored under ``"meta"``.
    """
    path = Path(path)
    if path.suffix != ".hfld":
        path = path.with_suffix(".hfld")
    write_hfld(path, field.values)
    doc = {
        "format": "HFLD",
        "version": VERSION,
        "kind": "complex" if isinstance(field, ComplexField) else "real",
        "shape": list(field.grid.shape),
        "spacing": list(field.grid.spacing),
    }
    mask = getattr(field, "mask", None)
    if mask is not None:
        doc["mask"] = encode_mask(mask)
    if meta:
        doc["meta"] = meta
    _sidecar(path).write_text(json.dumps(doc, indent=2, default=_json_default))
    return path


def load_field(path):
    """Read a field written by :func:`save_field`; returns ``(field, meta)``."""
    path = Path(path)
    if path.suffix != ".hfld":
        path = path.with_suffix(".hfld")
    values = read_hfld(path)
    side = _sidecar(path)
    doc = json.loads(side.read_text()) if side.exists() else {}
    spacing = doc.get("spacing", [1.0] * values.ndim)
    grid = Grid(values.shape, spacing)
    if np.iscomplexobj(values) or doc.get("kind") == "complex":
        return ComplexField(grid, values), doc.get("meta", {})
    mask = decode_mask(doc["mask"]) if "mask" in doc else None
    return RealImage(grid, values, mask), doc.get("meta", {})


def save_array(path, values, meta: dict | None = None) -> Path:
    """Write a bare array (for example an angle-major stack) with a sidecar."""
    path = Path(path)
    if path.suffix != ".hfld":
        path = path.with_suffix(".hfld")
    values = np.asarray(values)
    write_hfld(path, values)
    doc = {"format": "HFLD", "version": VERSION, "kind": "array", "shape": list(values.shape)}
    if meta:
        doc["meta"] = meta
    _sidecar(path).write_text(json.dumps(doc, indent=2, default=_json_default))
    return path


def load_array(path):
    """Read ``(values, meta)`` written by :func:`save_array` or :func:`save_field`."""
    path = Path(path)
    if path.suffix != ".hfld":
        path = path.with_suffix(".hfld")
    side = _sidecar(path)
    doc = json.loads(side.read_text()) if side.exists() else {}
    return read_hfld(path), doc.get("meta", {})


def _json_default(obj):
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    raise TypeError(f"not JSON serializable: {type(obj).__name__}")


def write_pgm(path, values, scale: str = "linear") -> dict:
    """Export a real 1-D or 2-D array as a 16-bit binary PGM.

    The samples are mapped linearly (after ``log10`` when ``scale="log10"``)
    from ``[vmin, vmax]`` onto ``0 .. 65535``. A 1-D array becomes a single
    row. Returns the scaling record needed to invert the export.
    """
    img = np.atleast_2d(np.asarray(values, dtype=float))
    if img.ndim != 2:
        raise ValueError("PGM export needs a 1-D or 2-D array")
    if scale == "log10":
        tiny = np.finfo(float).tiny
        img = np.log10(np.maximum(img, tiny))
    elif scale != "linear":
        raise ValueError(f"unknown scale {scale!r}")
    vmin, vmax = float(img.min()), float(img.max())
    span = vmax - vmin
    counts = np.zeros(img.shape) if span == 0 else (img - vmin) / span * 65535
    samples = np.rint(counts).astype(">u2")
    header = f"P5\n{img.shape[1]} {img.shape[0]}\n65535\n".encode("ascii")
    Path(path).write_bytes(header + samples.tobytes())
    return {"scale": scale, "vmin": vmin, "vmax": vmax, "maxval": 65535}


def read_pgm(path) -> np.ndarray:
    """Read a binary 16-bit PGM written by :func:`write_pgm`."""
    data = Path(path).read_bytes()
    tokens, pos = [], 0
    while len(tokens) < 4:
        while data[pos:pos + 1].isspace():
            pos += 1
        if data[pos:pos + 1] == b"#":
            pos = data.index(b"\n", pos) + 1
            continue
        end = pos
        while not data[end:end + 1].isspace():
            end += 1
        tokens.append(data[pos:end])
        pos = end
    pos += 1
    if tokens[0] != b"P5" or int(tokens[3]) != 65535:
        raise ValueError(f"{path}: not a 16-bit binary PGM")
    width, height = int(tokens[1]), int(tokens[2])
    return np.frombuffer(data, dtype=">u2", count=width * height, offset=pos).reshape(height, width)


def pgm_to_values(samples, scaling: dict) -> np.ndarray:
    """Undo :func:`write_pgm` up to its 16-bit quantization."""
    vals = scaling["vmin"] + np.asarray(samples, dtype=float) / 65535 * (scaling["vmax"] - scaling["vmin"])
    return 10**vals if scaling["scale"] == "log10" else vals
