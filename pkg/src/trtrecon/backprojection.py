"""Back-projection onto planes and slice-by-slice volumes.

Two flavours live here:

* ``backproject_plane`` / ``backproject_axis``: quadrature of the continuous
  back-projection operator (mean over angles of linearly interpolated
  sinogram values).  These feed the reconstruction pipelines.
* ``splat_plane`` / ``adjoint_acquisition``: exact transposes of the traced
  forward operators, for adjoint pairings and normal-equation style checks.

Angles are assumed uniform over [0, 2*pi).  The offset of a point x within a
plane orthogonal to the rotation axis is p(x) = <x, zeta(theta)>.
"""

from __future__ import annotations

import numpy as np

from .core import INPLANE_AXES, AxisFrame, SymTensorField3, VoxelGrid3
from .projector import (
    AcquisitionConfig,
    _inplane_trace,
    measurement_coeffs,
)


def backproject_plane(sinogram: np.ndarray, pcols: np.ndarray,
                      centers: np.ndarray) -> np.ndarray:
    """Discrete back-projection of one plane's sinogram.

    sinogram is (n_angles, n_p) over uniform angles in [0, 2*pi) and uniform
    offsets pcols; the result is evaluated on the square lattice centers x
    centers (indexed [ia, ib] along the cyclic in-plane axes) as the mean
    over angles of linearly interpolated rows.  Offsets outside the sampled
    range contribute zero.
    """
    sinogram = np.asarray(sinogram, dtype=float)
    n_angles, n_p = sinogram.shape
    if len(pcols) != n_p:
        raise ValueError(f"{n_p} sinogram columns but {len(pcols)} offsets")
    a = np.asarray(centers)[:, None]
    b = np.asarray(centers)[None, :]
    p0 = pcols[0]
    dp = pcols[1] - pcols[0]
    out = np.zeros((len(centers), len(centers)))
    thetas = 2.0 * np.pi * np.arange(n_angles) / n_angles
    for j, th in enumerate(thetas):
        p = a * np.sin(th) - b * np.cos(th)       # <x, zeta>
        u = (p - p0) / dp
        i0 = np.floor(u).astype(np.intp)
        frac = u - i0
        valid = (i0 >= 0) & (i0 <= n_p - 2)
        i0c = np.clip(i0, 0, n_p - 2)
        row = sinogram[j]
        vals = row[i0c] * (1.0 - frac) + row[i0c + 1] * frac
        out += np.where(valid, vals, 0.0)
    return out / n_angles


def _place_planes(bp: np.ndarray, axis: int, n_out: int, offset: int) -> np.ndarray:
    """Assemble per-plane back-projections (h, m, m) into a volume (m, m, m)
    padded with zero planes, mapping in-plane (a, b) axes to grid axes."""
    h = bp.shape[0]
    out = np.zeros((n_out, n_out, n_out))
    sl = slice(offset, offset + h)
    if axis == 1:
        out[sl, :, :] = bp                            # (s, x2, x3)
    elif axis == 2:
        out[:, sl, :] = bp.transpose(2, 0, 1)         # (x1, s, x3) from (s, x3, x1)
    else:
        out[:, :, sl] = bp.transpose(1, 2, 0)         # (x1, x2, s) from (s, x1, x2)
    return out


def backproject_axis(component: np.ndarray, axis: int, grid: VoxelGrid3,
                     pad_factor: int = 1) -> np.ndarray:
    """Slice-by-slice back-projection of one data component (n_angles, h, w).

    Detector rows are the planes of ``grid`` (h must equal grid.n).  With
    pad_factor > 1 the output volume is evaluated on the enlarged grid
    ``grid.padded(pad_factor)``; planes without data stay zero.  Equals
    looping ``backproject_plane`` over the rows.
    """
    component = np.asarray(component, dtype=float)
    if component.ndim != 3:
        raise ValueError("component must be (n_angles, rows, cols)")
    n_angles, h, n_p = component.shape
    if h != grid.n:
        raise ValueError(f"{h} detector rows do not match grid n = {grid.n}")
    padded = grid.padded(pad_factor)
    centers = padded.centers
    pcols = (np.arange(n_p) - (n_p - 1) / 2.0) * grid.voxel_size
    p0, dp = pcols[0], grid.voxel_size

    a = centers[:, None]
    b = centers[None, :]
    m = padded.n
    acc = np.zeros((h, m * m))
    thetas = 2.0 * np.pi * np.arange(n_angles) / n_angles
    for j, th in enumerate(thetas):
        p = (a * np.sin(th) - b * np.cos(th)).ravel()
        u = (p - p0) / dp
        i0 = np.floor(u).astype(np.intp)
        frac = u - i0
        valid = (i0 >= 0) & (i0 <= n_p - 2)
        i0c = np.clip(i0, 0, n_p - 2)
        rows = component[j]                           # (h, n_p)
        vals = rows[:, i0c] * (1.0 - frac) + rows[:, i0c + 1] * frac
        vals[:, ~valid] = 0.0
        acc += vals
    bp = (acc / n_angles).reshape(h, m, m)
    return _place_planes(bp, axis, m, grid.pad_offset(pad_factor))


# ---------------------------------------------------------------------------
# exact transposes of the traced forward operators
# ---------------------------------------------------------------------------

def splat_plane(sinogram: np.ndarray, pcols: np.ndarray, grid: VoxelGrid3,
                axis: int = 3) -> np.ndarray:
    """Transpose of planar scalar ray integration over the (angle, offset)
    lattice: spreads each sample along its traced ray weighted by the
    intersection lengths.  Returns an (n, n) slab on the in-plane axes."""
    sinogram = np.asarray(sinogram, dtype=float)
    n_angles = sinogram.shape[0]
    out = np.zeros((grid.n, grid.n))
    for j in range(n_angles):
        frame = AxisFrame(axis, 2.0 * np.pi * j / n_angles)
        for c, p in enumerate(pcols):
            ia, ib, seg = _inplane_trace(grid, frame, frame.ray(0.0, p))
            if seg.size:
                out[ia, ib] += sinogram[j, c] * seg
    return out


def _scatter_planes(values: np.ndarray, axis: int, ia, ib, inc) -> None:
    """Accumulate (n_planes, K, 6) increments along an in-plane ray, the
    transpose of ``projector._gather_planes``."""
    if axis == 1:
        values[:, ia, ib, :] += inc
    elif axis == 2:
        values[ib, :, ia, :] += np.moveaxis(inc, 0, 1)
    else:
        values[ia, ib, :, :] += np.moveaxis(inc, 0, 1)


def adjoint_acquisition(data: np.ndarray, cfg: AcquisitionConfig,
                        grid: VoxelGrid3) -> SymTensorField3:
    """Exact transpose of the noise-free acquisition map.

    Pairs with ``simulate_acquisition`` (noise_pct = 0):
    <Forward f, d> = <f, adjoint_acquisition(d)> up to floating-point
    reduction order.  Binning is transposed as replicate / bin_factor^2.
    """
    data = np.asarray(data, dtype=float)
    b = cfg.bin_factor
    expected = (cfg.n_axes, cfg.n_angles, cfg.detector_h // b, cfg.detector_w // b, 3)
    if data.shape != expected:
        raise ValueError(f"data shape {data.shape}, expected {expected}")
    if cfg.detector_h != grid.n:
        raise ValueError("detector rows must match the grid edge")
    if b > 1:
        data = np.repeat(np.repeat(data, b, axis=2), b, axis=3) / (b * b)

    pcols = (np.arange(cfg.detector_w) - (cfg.detector_w - 1) / 2.0) * grid.voxel_size
    values = np.zeros(grid.shape + (6,))
    for a, axis in enumerate(cfg.axes):
        for j, theta in enumerate(cfg.thetas):
            frame = AxisFrame(axis, theta)
            coeffs = measurement_coeffs(frame)          # (3, 6)
            for c, p in enumerate(pcols):
                ia, ib, seg = _inplane_trace(grid, frame, frame.ray(0.0, p))
                if seg.size == 0:
                    continue
                contrib = data[a, j, :, c, :] @ coeffs   # (h, 6)
                inc = seg[None, :, None] * contrib[:, None, :]
                _scatter_planes(values, axis, ia, ib, inc)
    return SymTensorField3(grid, values)
