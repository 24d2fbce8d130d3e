"""Discrete forward model: voxel ray tracing, per-ray transverse-tensor
measurements, full rotational acquisition with binning and noise, and the
planar longitudinal transforms used as identity oracles.

Measurement components per ray, in storage order:

    0  axial: <eta, (integrated f) eta>
    1  J1:    <(integrated f) eta, zeta>,  zeta = xi x eta
    2  J2:    <zeta, (integrated f) zeta>

J1 and J2 are evaluated through the in-plane identities (rotated vector
field for J1, planar adjugate for J2) so that they agree bit-exactly with
``lrt_plane`` on the corresponding slabs when both use the same trace.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .core import (
    INPLANE_AXES,
    AxisFrame,
    Ray,
    SymTensorField3,
    VoxelGrid3,
    adjugate2,
    eta_cross_f_eta,
    inplane_quadratic,
)

COMP_AXIAL = 0
COMP_J1 = 1
COMP_J2 = 2

_DIR_EPS = 1e-12           # direction component below this is treated as axis-parallel
_ORTHO_TOL = 1e-10         # tolerance for "ray direction orthogonal to axis"


def trace_ray(grid: VoxelGrid3, ray: Ray):
    """Voxel traversal of a ray through the grid bounding box.

    Returns (indices, lengths): an (K, 3) int array of voxel indices ordered
    along the ray and the (K,) array of intersection lengths.  The lengths sum
    to the chord length of the ray inside the box.  A ray that misses the box
    returns empty arrays.
    """
    lo = -grid.extent
    hi = grid.extent
    dx = grid.voxel_size
    o = ray.base
    d = ray.direction

    t0, t1 = -np.inf, np.inf
    for k in range(3):
        if abs(d[k]) > _DIR_EPS:
            ta = (lo - o[k]) / d[k]
            tb = (hi - o[k]) / d[k]
            t0 = max(t0, min(ta, tb))
            t1 = min(t1, max(ta, tb))
        elif not lo <= o[k] <= hi:
            return np.empty((0, 3), dtype=np.intp), np.empty(0)
    if not t1 > t0:
        return np.empty((0, 3), dtype=np.intp), np.empty(0)

    # crossing parameters with every interior voxel face plane
    crossings = [np.array([t0, t1])]
    planes = lo + np.arange(1, grid.n) * dx
    for k in range(3):
        if abs(d[k]) > _DIR_EPS:
            tt = (planes - o[k]) / d[k]
            crossings.append(tt[(tt > t0) & (tt < t1)])
    t = np.unique(np.concatenate(crossings))
    seg = np.diff(t)
    mid = 0.5 * (t[:-1] + t[1:])

    idx = np.empty((mid.size, 3), dtype=np.intp)
    for k in range(3):
        idx[:, k] = np.clip(((o[k] + mid * d[k] - lo) / dx).astype(np.intp), 0, grid.n - 1)
    keep = seg > 0
    return idx[keep], seg[keep]


# ---------------------------------------------------------------------------
# acquisition configuration and dataset container
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class AcquisitionConfig:
    """Parallel-beam acquisition geometry around coordinate axes.

    Detector rows run along the rotation axis at the voxel-center planes
    (detector_h must equal the grid edge for simulation), columns run along
    zeta with ray spacing equal to the voxel size.  Angles sample [0, 2*pi)
    uniformly.  Gaussian noise has sigma = noise_pct * max|data| and is
    applied after binning, seeded deterministically.
    """

    n_angles: int
    detector_h: int
    detector_w: int
    axes: tuple = (1, 2, 3)
    bin_factor: int = 1
    noise_pct: float = 0.0
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "axes", tuple(self.axes))
        if not self.axes or any(a not in (1, 2, 3) for a in self.axes):
            raise ValueError(f"axes must be labels from (1, 2, 3), got {self.axes!r}")
        if len(set(self.axes)) != len(self.axes):
            raise ValueError(f"duplicate rotation axes in {self.axes!r}")
        if self.n_angles < 1:
            raise ValueError("need at least one projection angle")
        if self.detector_h < 1 or self.detector_w < 1:
            raise ValueError("detector dimensions must be >= 1")
        if self.bin_factor < 1:
            raise ValueError("bin_factor must be >= 1")
        if self.detector_h % self.bin_factor or self.detector_w % self.bin_factor:
            raise ValueError(
                f"bin_factor {self.bin_factor} must divide detector dims "
                f"{self.detector_h} x {self.detector_w}")
        if self.noise_pct < 0:
            raise ValueError("noise_pct must be >= 0")

    @classmethod
    def for_grid(cls, grid: VoxelGrid3, n_angles: int, axes=(1, 2, 3),
                 bin_factor: int = 1, noise_pct: float = 0.0, seed: int = 0,
                 aspect: float = 4.0 / 3.0) -> "AcquisitionConfig":
        """Default geometry for a grid: h = n rows, w ~ aspect * h columns,
        rounded up so the bin factor divides both."""
        h = grid.n
        if h % bin_factor:
            raise ValueError(f"bin_factor {bin_factor} must divide grid n = {h}")
        w = math.ceil(aspect * h)
        w += (-w) % bin_factor
        return cls(n_angles=n_angles, detector_h=h, detector_w=w, axes=axes,
                   bin_factor=bin_factor, noise_pct=noise_pct, seed=seed)

    @property
    def n_axes(self) -> int:
        return len(self.axes)

    @property
    def thetas(self) -> np.ndarray:
        return 2.0 * np.pi * np.arange(self.n_angles) / self.n_angles


@dataclass
class TrtDataSet:
    """Measured data indexed [axis][angle][row][col][component] after binning."""

    config: AcquisitionConfig
    grid: VoxelGrid3
    data: np.ndarray

    def __post_init__(self):
        self.data = np.asarray(self.data, dtype=float)
        b = self.config.bin_factor
        expected = (self.config.n_axes, self.config.n_angles,
                    self.config.detector_h // b, self.config.detector_w // b, 3)
        if self.data.shape != expected:
            raise ValueError(f"dataset shape {self.data.shape}, expected {expected}")
        if not np.all(np.isfinite(self.data)):
            raise ValueError("dataset contains non-finite values")

    @property
    def h(self) -> int:
        return self.data.shape[2]

    @property
    def w(self) -> int:
        return self.data.shape[3]

    @property
    def pitch(self) -> float:
        """Detector column spacing after binning (equals recon voxel size)."""
        return self.grid.voxel_size * self.config.bin_factor

    @property
    def p_coords(self) -> np.ndarray:
        """Signed column offsets along zeta, centered on the rotation axis."""
        return (np.arange(self.w) - (self.w - 1) / 2.0) * self.pitch

    @property
    def thetas(self) -> np.ndarray:
        return self.config.thetas

    @property
    def recon_grid(self) -> VoxelGrid3:
        """Grid matched to the binned detector rows."""
        return VoxelGrid3(self.h, self.grid.extent)

    def has_axis(self, axis: int) -> bool:
        return axis in self.config.axes

    def component(self, axis: int, comp: int) -> np.ndarray:
        """(n_angles, h, w) view of one measured component for one axis."""
        if not self.has_axis(axis):
            raise ValueError(f"dataset has no axis e{axis} (axes: {self.config.axes})")
        return self.data[self.config.axes.index(axis), :, :, :, comp]


# ---------------------------------------------------------------------------
# per-ray measurements
# ---------------------------------------------------------------------------

def _contract_measurements(sums6: np.ndarray, frame: AxisFrame) -> np.ndarray:
    """Turn per-plane integrated tensor components (S, 6) into the three
    measurements (S, 3).  Elementwise only, so batching cannot change bits."""
    xi = frame.xi
    axis = frame.axis
    out = np.empty(sums6.shape[:-1] + (3,))
    out[..., COMP_AXIAL] = sums6[..., {1: 0, 2: 3, 3: 5}[axis]]
    g = eta_cross_f_eta(sums6, axis)
    out[..., COMP_J1] = g[..., 0] * xi[0] + g[..., 1] * xi[1] + g[..., 2] * xi[2]
    out[..., COMP_J2] = inplane_quadratic(adjugate2(sums6, axis), axis, xi)
    return out


def measurement_coeffs(frame: AxisFrame) -> np.ndarray:
    """(3, 6) matrix C with measurements = C @ components.  The exact linear
    map applied per voxel by the forward model; used by the adjoint."""
    eye = np.eye(6)
    return _contract_measurements(eye, frame).T.copy()


def forward_trt_ray(field: SymTensorField3, frame: AxisFrame, ray: Ray):
    """(axial, J1, J2) line-integral measurements of one ray.

    The ray direction must lie in the plane orthogonal to the frame axis.
    """
    if abs(ray.direction[frame.axis - 1]) > _ORTHO_TOL:
        raise ValueError("ray direction must be orthogonal to the rotation axis")
    idx, seg = trace_ray(field.grid, ray)
    if seg.size == 0:
        return 0.0, 0.0, 0.0
    vals = field.values[idx[:, 0], idx[:, 1], idx[:, 2], :]
    sums6 = np.einsum("kc,k->c", vals, seg)
    m = _contract_measurements(sums6[np.newaxis, :], frame)[0]
    return float(m[COMP_AXIAL]), float(m[COMP_J1]), float(m[COMP_J2])


def _inplane_trace(grid: VoxelGrid3, frame: AxisFrame, ray: Ray):
    """Trace a ray confined to a plane orthogonal to the frame axis and
    return its in-plane voxel indices (ia, ib) plus segment lengths."""
    base = ray.base.copy()
    base[frame.axis - 1] = 0.0       # in-plane geometry is independent of s
    idx, seg = trace_ray(grid, Ray(direction=ray.direction, base=base))
    a, b = INPLANE_AXES[frame.axis]
    return idx[:, a - 1], idx[:, b - 1], seg


def lrt_plane(slab: np.ndarray, grid: VoxelGrid3, frame: AxisFrame, ray: Ray) -> float:
    """Planar longitudinal ray transform of a vector or tensor slab.

    slab is (n, n, 3) for vector fields (summand <g, xi>) or (n, n, 6) for
    symmetric tensors (summand <g xi, xi>), indexed by the cyclic in-plane
    axes of the frame.  The ray must lie in the slab's plane.
    """
    if abs(ray.direction[frame.axis - 1]) > _ORTHO_TOL:
        raise ValueError("ray must lie in the slab's plane")
    ia, ib, seg = _inplane_trace(grid, frame, ray)
    if seg.size == 0:
        return 0.0
    sums = np.einsum("kc,k->c", slab[ia, ib, :], seg)
    if slab.shape[-1] == 3:
        xi = frame.xi
        return float(sums[0] * xi[0] + sums[1] * xi[1] + sums[2] * xi[2])
    if slab.shape[-1] == 6:
        return float(inplane_quadratic(sums, frame.axis, frame.xi))
    raise ValueError("slab must have 3 (vector) or 6 (tensor) components")


def xray_plane(slab: np.ndarray, grid: VoxelGrid3, frame: AxisFrame, ray: Ray) -> float:
    """Planar scalar X-ray transform of a (n, n) slab."""
    if abs(ray.direction[frame.axis - 1]) > _ORTHO_TOL:
        raise ValueError("ray must lie in the slab's plane")
    ia, ib, seg = _inplane_trace(grid, frame, ray)
    if seg.size == 0:
        return 0.0
    return float(np.dot(seg, slab[ia, ib]))


# ---------------------------------------------------------------------------
# full acquisition
# ---------------------------------------------------------------------------

def _gather_planes(values: np.ndarray, axis: int, ia: np.ndarray, ib: np.ndarray) -> np.ndarray:
    """Gather field values along an in-plane ray for every plane of an axis,
    shaped (n_planes, K, ncomp)."""
    if axis == 1:
        return values[:, ia, ib, :]
    if axis == 2:
        return np.moveaxis(values[ib, :, ia, :], 0, 1)
    return np.moveaxis(values[ia, ib, :, :], 0, 1)


def simulate_acquisition(field: SymTensorField3, cfg: AcquisitionConfig) -> TrtDataSet:
    """Simulate the full rotational acquisition of a tensor field.

    For every axis, angle and detector pixel this produces exactly the values
    of ``forward_trt_ray`` for the corresponding ray, then mean-pools over
    bin_factor x bin_factor pixel blocks, then adds seeded Gaussian noise
    with sigma = noise_pct * max|data|.  Bit-reproducible for a fixed seed.
    """
    grid = field.grid
    if cfg.detector_h != grid.n:
        raise ValueError(
            f"detector_h = {cfg.detector_h} must equal the grid edge n = {grid.n} "
            "(rows are the voxel-center planes)")
    pcols = (np.arange(cfg.detector_w) - (cfg.detector_w - 1) / 2.0) * grid.voxel_size
    raw = np.zeros((cfg.n_axes, cfg.n_angles, cfg.detector_h, cfg.detector_w, 3))

    for a, axis in enumerate(cfg.axes):
        for j, theta in enumerate(cfg.thetas):
            frame = AxisFrame(axis, theta)
            for c, p in enumerate(pcols):
                ray = frame.ray(0.0, p)
                ia, ib, seg = _inplane_trace(grid, frame, ray)
                if seg.size == 0:
                    continue
                vals = _gather_planes(field.values, axis, ia, ib)
                sums6 = np.einsum("skc,k->sc", vals, seg)
                raw[a, j, :, c, :] = _contract_measurements(sums6, frame)

    b = cfg.bin_factor
    if b > 1:
        raw = raw.reshape(cfg.n_axes, cfg.n_angles, cfg.detector_h // b, b,
                          cfg.detector_w // b, b, 3).mean(axis=(3, 5))
    if cfg.noise_pct > 0:
        scale = np.abs(raw).max()
        if scale > 0:
            rng = np.random.default_rng(cfg.seed)
            raw = raw + cfg.noise_pct * scale * rng.standard_normal(raw.shape)
    return TrtDataSet(config=cfg, grid=grid, data=raw)
