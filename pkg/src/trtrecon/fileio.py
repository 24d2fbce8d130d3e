"""Binary file formats and slice export.

Field files ("TTF1"): little-endian, 24-byte header
    magic 4s | version u32 | n u32 | extent f64 | n_components u32
followed by n^3 * n_components float64 values ordered component-fastest,
then x1, then x2, then x3.  Component counts: 1 scalar, 3 vector, 6 tensor.

Dataset files ("TTD1"): little-endian, 108-byte header
    magic 4s | version u32 | n_axes u32 | n_angles u32 | h u32 | w u32 |
    n_components u32 | 9 x f64 axis vectors (row per axis, zero padded) |
    angle_range f64
followed by n_axes * n_angles * h * w * n_components float64 values in index
order [axis][angle][row][col][component].

All writes go through a temporary file in the target directory and a rename,
so a crash cannot leave a half-written file at the destination.
"""

from __future__ import annotations

import os
import struct
import tempfile

import numpy as np

from .core import SymTensorField3, VoxelGrid3, unit_vector
from .projector import AcquisitionConfig, TrtDataSet

FIELD_MAGIC = b"TTF1"
DATA_MAGIC = b"TTD1"
FORMAT_VERSION = 1

_FIELD_HEADER = struct.Struct("<4sIIdI")
_DATA_HEADER = struct.Struct("<4sIIIIII9dd")


def _atomic_write(path: str, payload: bytes) -> None:
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(payload)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _check_magic(blob: bytes, expected: bytes, path: str) -> None:
    if len(blob) < 4:
        raise ValueError(f"{path}: truncated before magic (got {len(blob)} bytes)")
    if blob[:4] != expected:
        raise ValueError(
            f"{path}: bad magic at offset 0: found {blob[:4]!r}, expected {expected!r}")


def write_field(path: str, values, grid: VoxelGrid3 | None = None) -> None:
    """Write a scalar (n,n,n), vector (n,n,n,3) or tensor (n,n,n,6) field.

    Accepts a SymTensorField3 directly, in which case grid may be omitted.
    """
    if isinstance(values, SymTensorField3):
        grid = values.grid
        values = values.values
    if grid is None:
        raise ValueError("grid required when passing a bare array")
    values = np.asarray(values, dtype=float)
    if values.shape == grid.shape:
        ncomp = 1
        values = values[..., np.newaxis]
    elif values.ndim == 4 and values.shape[:3] == grid.shape and values.shape[3] in (3, 6):
        ncomp = values.shape[3]
    else:
        raise ValueError(
            f"cannot serialise shape {values.shape} on grid n={grid.n} "
            "(expected (n,n,n)[, 3 or 6])")
    header = _FIELD_HEADER.pack(FIELD_MAGIC, FORMAT_VERSION, grid.n, grid.extent, ncomp)
    payload = np.ascontiguousarray(
        values.transpose(2, 1, 0, 3), dtype="<f8").tobytes()
    _atomic_write(path, header + payload)


def read_field(path: str):
    """Read a field file; returns (values, grid) with values (n,n,n) for
    scalars and (n,n,n,C) otherwise."""
    with open(path, "rb") as fh:
        blob = fh.read()
    _check_magic(blob, FIELD_MAGIC, path)
    if len(blob) < _FIELD_HEADER.size:
        raise ValueError(
            f"{path}: truncated header, {len(blob)} bytes < {_FIELD_HEADER.size}")
    magic, version, n, extent, ncomp = _FIELD_HEADER.unpack_from(blob, 0)
    if version != FORMAT_VERSION:
        raise ValueError(f"{path}: unsupported field format version {version}")
    if ncomp not in (1, 3, 6):
        raise ValueError(f"{path}: invalid component count {ncomp}")
    expected = n**3 * ncomp * 8
    actual = len(blob) - _FIELD_HEADER.size
    if actual != expected:
        raise ValueError(
            f"{path}: payload length mismatch at offset {_FIELD_HEADER.size}: "
            f"expected {expected} bytes, got {actual}")
    grid = VoxelGrid3(n, extent)
    flat = np.frombuffer(blob, dtype="<f8", offset=_FIELD_HEADER.size)
    values = flat.reshape(n, n, n, ncomp).transpose(2, 1, 0, 3).copy()
    if ncomp == 1:
        return values[..., 0], grid
    return values, grid


def read_tensor_field(path: str) -> SymTensorField3:
    values, grid = read_field(path)
    if values.ndim != 4 or values.shape[3] != 6:
        raise ValueError(f"{path}: not a 6-component tensor field")
    return SymTensorField3(grid, values)


def write_dataset(path: str, dataset: TrtDataSet) -> None:
    cfg = dataset.config
    axes_flat = np.zeros(9)
    for k, axis in enumerate(cfg.axes):
        axes_flat[3 * k:3 * k + 3] = unit_vector(axis)
    header = _DATA_HEADER.pack(
        DATA_MAGIC, FORMAT_VERSION, cfg.n_axes, cfg.n_angles,
        dataset.h, dataset.w, 3, *axes_flat, 2.0 * np.pi)
    payload = np.ascontiguousarray(dataset.data, dtype="<f8").tobytes()
    _atomic_write(path, header + payload)


def read_dataset(path: str, extent: float = 1.0) -> TrtDataSet:
    """Read a dataset file.  The format does not store the physical extent,
    so it must be supplied (default: the unit cube used by the standard
    phantoms).  Binning and noise are already baked into stored data."""
    with open(path, "rb") as fh:
        blob = fh.read()
    _check_magic(blob, DATA_MAGIC, path)
    if len(blob) < _DATA_HEADER.size:
        raise ValueError(
            f"{path}: truncated header, {len(blob)} bytes < {_DATA_HEADER.size}")
    unpacked = _DATA_HEADER.unpack_from(blob, 0)
    magic, version, n_axes, n_angles, h, w, ncomp = unpacked[:7]
    axes_flat = np.array(unpacked[7:16])
    angle_range = unpacked[16]
    if version != FORMAT_VERSION:
        raise ValueError(f"{path}: unsupported dataset format version {version}")
    if ncomp != 3:
        raise ValueError(f"{path}: expected 3 measurement components, got {ncomp}")
    if not np.isclose(angle_range, 2.0 * np.pi):
        raise ValueError(f"{path}: only full-circle datasets supported "
                         f"(angle range {angle_range!r})")
    axes = []
    for k in range(n_axes):
        vec = axes_flat[3 * k:3 * k + 3]
        matches = [ax for ax in (1, 2, 3) if np.array_equal(vec, unit_vector(ax))]
        if not matches:
            raise ValueError(f"{path}: axis {k} vector {vec} is not a coordinate axis")
        axes.append(matches[0])
    expected = n_axes * n_angles * h * w * ncomp * 8
    actual = len(blob) - _DATA_HEADER.size
    if actual != expected:
        raise ValueError(
            f"{path}: payload length mismatch at offset {_DATA_HEADER.size}: "
            f"expected {expected} bytes, got {actual}")
    data = np.frombuffer(blob, dtype="<f8", offset=_DATA_HEADER.size)
    data = data.reshape(n_axes, n_angles, h, w, ncomp).copy()
    cfg = AcquisitionConfig(n_angles=n_angles, detector_h=h, detector_w=w,
                            axes=tuple(axes), bin_factor=1)
    return TrtDataSet(config=cfg, grid=VoxelGrid3(h, extent), data=data)


# ---------------------------------------------------------------------------
# slice export
# ---------------------------------------------------------------------------

def _extract_slab(volume: np.ndarray, axis: int, index: int) -> np.ndarray:
    """(n, n) slab of a scalar volume on the cyclic in-plane axes (a, b)."""
    n = volume.shape[0]
    if not 0 <= index < n:
        raise ValueError(f"plane index {index} out of range [0, {n})")
    if axis == 1:
        return volume[index, :, :]
    if axis == 2:
        return volume[:, index, :].T
    if axis == 3:
        return volume[:, :, index]
    raise ValueError(f"axis label must be 1, 2 or 3, got {axis!r}")


def export_slice(volume: np.ndarray, axis: int, index: int, path: str,
                 fmt: str = "pgm", vmin: float | None = None,
                 vmax: float | None = None) -> None:
    """Export one plane of a scalar volume.

    Image orientation: columns run along the first cyclic in-plane axis
    (ascending), rows along the second (top row = highest coordinate).
    PGM output is binary 8-bit with linear windowing to [vmin, vmax]
    (values clamped; grey = floor(255 * t + 0.5), so mid-window maps to 128).
    CSV output is the raw values, row-major in the same orientation, with
    full float64 round-trip precision.
    """
    volume = np.asarray(volume, dtype=float)
    slab = _extract_slab(volume, axis, index)
    img = slab.T[::-1, :]                 # rows along b descending, cols along a
    if fmt == "pgm":
        if vmin is None:
            vmin = float(slab.min())
        if vmax is None:
            vmax = float(slab.max())
        if not vmin < vmax:
            raise ValueError(f"invalid window: min {vmin!r} must be < max {vmax!r}")
        t = (np.clip(img, vmin, vmax) - vmin) / (vmax - vmin)
        grey = np.minimum(np.floor(255.0 * t + 0.5), 255).astype(np.uint8)
        header = f"P5\n{grey.shape[1]} {grey.shape[0]}\n255\n".encode()
        _atomic_write(path, header + grey.tobytes())
    elif fmt == "csv":
        lines = [",".join(f"{v:.17g}" for v in row) for row in img]
        _atomic_write(path, ("\n".join(lines) + "\n").encode())
    else:
        raise ValueError(f"unknown export format {fmt!r} (use 'pgm' or 'csv')")
