"""Binary field snapshots.

Layout: 8-byte magic, little-endian uint64 header length, UTF-8 JSON header
(``SnapshotHeader``), then the field as little-endian float64 with complex
values stored as interleaved (re, im) pairs.
"""

from __future__ import annotations

import logging
import struct
from pathlib import Path

import numpy as np

from src.errors import LatticeError
from src.lattice import FluxBackground, TorusLattice
from src.models import SnapshotHeader

logger = logging.getLogger(__name__)

MAGIC = b"MLSNAP01"


def save_snapshot(
    path: Path,
    lat: TorusLattice,
    values: np.ndarray,
    kind: str,
    degree: int = 0,
    bg: FluxBackground | None = None,
    seed: int | None = None,
    winding: list[int] | None = None,
) -> Path:
    values = np.asarray(values)
    if values.shape[1:] != lat.sizes and values.shape != lat.sizes:
        raise LatticeError(f"snapshot of shape {values.shape} on lattice {lat.sizes}")
    if values.shape == lat.sizes:
        values = values[np.newaxis]
    complex_valued = np.iscomplexobj(values)
    header = SnapshotHeader(
        kind=kind,
        sizes=list(lat.sizes),
        spacings=list(lat.spacings),
        degree=degree,
        components=values.shape[0],
        complex_valued=complex_valued,
        flux=bg.m.tolist() if bg is not None else [],
        seed=seed,
        winding=winding or [],
    )
    payload = values.astype(np.complex128 if complex_valued else np.float64)
    if complex_valued:
        payload = payload.view(np.float64)
    raw_header = header.model_dump_json().encode("utf-8")
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<Q", len(raw_header)))
        fh.write(raw_header)
        fh.write(payload.astype("<f8").tobytes(order="C"))
    logger.debug("wrote snapshot %s (%s, %d components)", path, kind, header.components)
    return path


def load_snapshot(path: Path) -> tuple[SnapshotHeader, np.ndarray]:
    data = Path(path).read_bytes()
    if data[:8] != MAGIC:
        raise LatticeError(f"{path} is not a field snapshot")
    (length,) = struct.unpack("<Q", data[8:16])
    header = SnapshotHeader.model_validate_json(data[16 : 16 + length].decode("utf-8"))
    flat = np.frombuffer(data[16 + length :], dtype="<f8").astype(np.float64)
    shape = (header.components, *header.sizes)
    if header.complex_valued:
        values = flat.view(np.complex128).reshape(shape)
    else:
        values = flat.reshape(shape)
    return header, values.copy()
