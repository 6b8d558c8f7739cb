from __future__ import annotations

import numpy as np
import pytest

from src.errors import LatticeError
from src.snapshot import MAGIC, load_snapshot, save_snapshot


def test_spinor_snapshot_keeps_header_and_values(tmp_path, config4):
    path = save_snapshot(tmp_path / "psi.snap", config4.lat, config4.psi, "psi", bg=config4.bg, seed=7)
    header, values = load_snapshot(path)
    assert path.read_bytes()[:8] == MAGIC
    assert header.kind == "psi"
    assert header.sizes == list(config4.lat.sizes)
    assert header.spacings == pytest.approx(list(config4.lat.spacings))
    assert header.complex_valued and header.components == 2
    assert header.flux == config4.bg.m.tolist()
    assert header.seed == 7
    assert np.array_equal(values, config4.psi)


def test_scalar_field_gets_a_component_axis(tmp_path, lat3, rng):
    f = rng.normal(size=lat3.sizes)
    header, values = load_snapshot(save_snapshot(tmp_path / "f.snap", lat3, f, "cochain", winding=[1, 0, -1]))
    assert not header.complex_valued
    assert header.winding == [1, 0, -1]
    assert values.shape == (1,) + lat3.sizes
    assert np.array_equal(values[0], f)


def test_shape_mismatch_is_rejected(tmp_path, lat3):
    with pytest.raises(LatticeError):
        save_snapshot(tmp_path / "bad.snap", lat3, np.zeros((2, 3, 3, 3)), "a")


def test_foreign_file_is_rejected(tmp_path):
    path = tmp_path / "notes.txt"
    path.write_bytes(b"not a snapshot at all")
    with pytest.raises(LatticeError):
        load_snapshot(path)
