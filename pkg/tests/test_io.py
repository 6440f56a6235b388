import struct

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nearfield.grid import ComplexField, Grid, RealImage
from nearfield.io import (
    HFLDError,
    decode_mask,
    encode_mask,
    load_field,
    pgm_to_values,
    read_hfld,
    read_pgm,
    save_field,
    write_hfld,
    write_pgm,
)


def test_hfld_header_layout(tmp_path):
    path = write_hfld(tmp_path / "a.hfld", np.arange(6.0).reshape(2, 3))
    raw = path.read_bytes()
    assert raw[:4] == b"HFLD"
    assert struct.unpack("<5I", raw[4:24]) == (1, 2, 2, 3, 1)
    assert np.frombuffer(raw[24:], "<f8").tolist() == [0, 1, 2, 3, 4, 5]


def test_hfld_complex_is_interleaved(tmp_path):
    path = write_hfld(tmp_path / "c.hfld", np.array([1 + 2j, 3 - 4j]))
    raw = path.read_bytes()
    assert struct.unpack("<I", raw[16:20]) == (2,)
    assert np.frombuffer(raw[20:], "<f8").tolist() == [1, 2, 3, -4]


@pytest.mark.parametrize("shape", [(8,), (4, 6)])
@pytest.mark.parametrize("complex_", [False, True])
def test_hfld_round_trip(tmp_path, shape, complex_):
    rng = np.random.default_rng(0)
    values = rng.standard_normal(shape)
    if complex_:
        values = values + 1j * rng.standard_normal(shape)
    back = read_hfld(write_hfld(tmp_path / "f.hfld", values))
    assert back.dtype == values.dtype
    assert np.array_equal(back, values)


def test_hfld_rejects_bad_files(tmp_path):
    path = write_hfld(tmp_path / "f.hfld", np.zeros(4))
    raw = path.read_bytes()
    for bad in (b"XXXX" + raw[4:], raw[:-8], raw[:4] + struct.pack("<I", 2) + raw[8:]):
        path.write_bytes(bad)
        with pytest.raises(HFLDError):
            read_hfld(path)


@settings(max_examples=50, deadline=None)
@given(st.lists(st.booleans(), min_size=0, max_size=64))
def test_mask_run_length_round_trip(bits):
    mask = np.array(bits, dtype=bool)
    doc = encode_mask(mask)
    assert sum(doc["runs"]) == mask.size
    assert np.array_equal(decode_mask(doc), mask)


def test_mask_encoding_example():
    assert encode_mask([0, 0, 1, 1, 1, 0]) == {"shape": [6], "start": False, "runs": [2, 3, 1]}


def test_field_with_sidecar(tmp_path):
    g = Grid((4, 6), (0.5, 0.25))
    mask = np.zeros((4, 6), bool)
    mask[1:3, 2:5] = True
    img = RealImage(g, np.arange(24.0).reshape(4, 6), mask)
    path = save_field(tmp_path / "img", img, meta={"geometry": {"k": 1.0}})
    back, meta = load_field(path)
    assert back.grid == g and np.array_equal(back.values, img.values) and np.array_equal(back.mask, mask)
    assert meta == {"geometry": {"k": 1.0}}
    f = ComplexField(Grid.uniform(8, 0.1), np.exp(1j * np.arange(8.0)))
    back, _ = load_field(save_field(tmp_path / "f.hfld", f))
    assert isinstance(back, ComplexField) and np.array_equal(back.values, f.values)


def test_pgm_export(tmp_path):
    img = np.linspace(0, 2, 12).reshape(3, 4)
    scaling = write_pgm(tmp_path / "a.pgm", img)
    raw = (tmp_path / "a.pgm").read_bytes()
    assert raw.startswith(b"P5\n4 3\n65535\n")
    samples = read_pgm(tmp_path / "a.pgm")
    assert samples[0, 0] == 0 and samples[-1, -1] == 65535
    # big-endian samples
    assert raw[-2:] == b"\xff\xff"
    assert np.max(np.abs(pgm_to_values(samples, scaling) - img)) <= 2 / 65535


def test_pgm_log_scale_and_flat_image(tmp_path):
    img = np.array([1e-4, 1e-2, 1.0])
    scaling = write_pgm(tmp_path / "l.pgm", img, scale="log10")
    assert scaling["vmin"] == pytest.approx(-4) and scaling["vmax"] == pytest.approx(0)
    assert np.allclose(pgm_to_values(read_pgm(tmp_path / "l.pgm"), scaling)[0], img, rtol=1e-3)
    write_pgm(tmp_path / "flat.pgm", np.ones((2, 2)))
    assert not read_pgm(tmp_path / "flat.pgm").any()
