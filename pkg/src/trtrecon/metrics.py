"""Error metrics for comparing reconstructed fields against references.

Band-limited comparisons low-pass both fields with a sharp radial frequency
mask before differencing; ray-tracing discretisation dominates the top of the
band, so pipeline accuracy statements exclude it.  Interior comparisons
restrict to the central part of the domain.
"""

from __future__ import annotations

import numpy as np

from .core import COMPONENT_NAMES, SymTensorField3, VoxelGrid3


def relative_l2(a: np.ndarray, b: np.ndarray) -> float:
    """||a - b|| / ||b||, with the convention 0/0 = 0."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    ref = float(np.linalg.norm(b))
    diff = float(np.linalg.norm(a - b))
    if ref == 0:
        return 0.0 if diff == 0 else np.inf
    return diff / ref


def band_limit(arr: np.ndarray, fraction: float) -> np.ndarray:
    """Sharp radial low-pass: keep frequency bins within ``fraction`` of the
    Nyquist radius (aliases scaled per axis), zero the rest."""
    arr = np.asarray(arr, dtype=float)
    spec = np.fft.fftn(arr)
    r2 = np.zeros(arr.shape)
    for k, nk in enumerate(arr.shape):
        alias = np.fft.fftfreq(nk) * 2.0           # -1 .. 1 in units of Nyquist
        shape = [1] * arr.ndim
        shape[k] = nk
        r2 = r2 + alias.reshape(shape) ** 2
    spec[r2 > fraction**2] = 0.0
    return np.fft.ifftn(spec).real


def interior_mask(grid: VoxelGrid3, fraction: float) -> np.ndarray:
    """Boolean (n, n, n) mask of voxels with |x_k| <= fraction * extent."""
    keep1d = np.abs(grid.centers) <= fraction * grid.extent
    return (keep1d[:, None, None] & keep1d[None, :, None] & keep1d[None, None, :])


def banded_relative_l2(a: np.ndarray, b: np.ndarray, grid: VoxelGrid3,
                       band_fraction: float = 0.8,
                       interior_fraction: float = 0.9) -> float:
    """Relative L2 error after low-passing both fields and restricting to the
    interior of the domain."""
    mask = interior_mask(grid, interior_fraction)
    return relative_l2(band_limit(a, band_fraction)[mask],
                       band_limit(b, band_fraction)[mask])


def field_error_report(a: SymTensorField3, b: SymTensorField3,
                       band_fraction=0.8, interior_fraction=0.9) -> dict:
    """Per-component and aggregate errors of field a against reference b,
    both plain and band-limited."""
    if a.grid != b.grid:
        raise ValueError("fields live on different grids")
    report = {"components": {}, "band_fraction": band_fraction,
              "interior_fraction": interior_fraction}
    for ci, name in enumerate(COMPONENT_NAMES):
        report["components"][f"f{name}"] = {
            "relative_l2": relative_l2(a.values[..., ci], b.values[..., ci]),
            "banded_relative_l2": banded_relative_l2(
                a.values[..., ci], b.values[..., ci], a.grid,
                band_fraction, interior_fraction),
        }
    report["aggregate_relative_l2"] = relative_l2(a.values, b.values)
    return report
