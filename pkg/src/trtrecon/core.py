"""Geometric and algebraic primitives: voxel grids, symmetric rank-2 tensors,
rays, rotation frames, planar adjugate, field slicing.

Conventions used throughout the package:

* Symmetric 3x3 tensors are stored as 6 components in the fixed order
  (11, 12, 13, 22, 23, 33).
* A tensor field on an n^3 grid is an ndarray of shape (n, n, n, 6) indexed
  [i1, i2, i3, comp], where i_k runs along the x_k coordinate.  The canonical
  flat layout (component fastest, then x1, then x2, then x3) is produced by
  ``SymTensorField3.to_flat`` and is what the file format stores.
* Rotation axes are restricted to the coordinate axes e1, e2, e3 (labelled
  1, 2, 3).  For axis label k the in-plane axes are the other two in cyclic
  order: 1 -> (2, 3), 2 -> (3, 1), 3 -> (1, 2).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

COMPONENT_NAMES = ("11", "12", "13", "22", "23", "33")

# (i, j) -> flat component index, 1-based axes, order-insensitive
COMPONENT_INDEX = {
    (1, 1): 0, (1, 2): 1, (2, 1): 1, (1, 3): 2, (3, 1): 2,
    (2, 2): 3, (2, 3): 4, (3, 2): 4, (3, 3): 5,
}

# axis label -> (a, b) cyclic in-plane axis labels
INPLANE_AXES = {1: (2, 3), 2: (3, 1), 3: (1, 2)}

_UNIT = {1: np.array([1.0, 0.0, 0.0]),
         2: np.array([0.0, 1.0, 0.0]),
         3: np.array([0.0, 0.0, 1.0])}


def unit_vector(axis: int) -> np.ndarray:
    """Exact basis vector for axis label 1, 2 or 3."""
    try:
        return _UNIT[axis].copy()
    except KeyError:
        raise ValueError(f"axis label must be 1, 2 or 3, got {axis!r}")


@dataclass(frozen=True)
class VoxelGrid3:
    """Cubic voxel lattice over the cube [-extent, extent]^3.

    Voxel centers sit at -extent + (i + 0.5) * voxel_size along each axis.
    """

    n: int
    extent: float = 1.0

    def __post_init__(self):
        if self.n < 2:
            raise ValueError(f"grid needs n >= 2 voxels per edge, got {self.n}")
        if not self.extent > 0:
            raise ValueError(f"grid extent must be positive, got {self.extent}")

    @property
    def voxel_size(self) -> float:
        return 2.0 * self.extent / self.n

    @property
    def centers(self) -> np.ndarray:
        return -self.extent + (np.arange(self.n) + 0.5) * self.voxel_size

    @property
    def shape(self) -> tuple:
        return (self.n, self.n, self.n)

    def meshgrid(self):
        """(X1, X2, X3) coordinate arrays of shape (n, n, n)."""
        c = self.centers
        return np.meshgrid(c, c, c, indexing="ij")

    def padded(self, factor: int) -> "VoxelGrid3":
        """Grid enlarged by an integer factor at the same voxel size."""
        if factor < 1:
            raise ValueError("pad factor must be >= 1")
        return VoxelGrid3(self.n * factor, self.extent * factor)

    def pad_offset(self, factor: int) -> int:
        """Index offset of this grid's first voxel inside ``padded(factor)``."""
        return (self.n * factor - self.n) // 2


# ---------------------------------------------------------------------------
# symmetric-tensor component algebra
#
# All helpers accept stacked component arrays of shape (..., 6) so they can be
# applied per voxel over whole fields.  For exact basis-vector axes these are
# pure component selections and negations, which keeps the planar-transform
# identities bit-exact against the per-ray forward model.
# ---------------------------------------------------------------------------

def sym_to_matrix(t6: np.ndarray) -> np.ndarray:
    """(..., 6) components -> (..., 3, 3) dense symmetric matrices."""
    t6 = np.asarray(t6)
    m = np.empty(t6.shape[:-1] + (3, 3), dtype=t6.dtype)
    m[..., 0, 0] = t6[..., 0]
    m[..., 0, 1] = m[..., 1, 0] = t6[..., 1]
    m[..., 0, 2] = m[..., 2, 0] = t6[..., 2]
    m[..., 1, 1] = t6[..., 3]
    m[..., 1, 2] = m[..., 2, 1] = t6[..., 4]
    m[..., 2, 2] = t6[..., 5]
    return m


def matrix_to_sym(m: np.ndarray) -> np.ndarray:
    """(..., 3, 3) symmetric matrices -> (..., 6) components."""
    m = np.asarray(m)
    return np.stack(
        [m[..., 0, 0], m[..., 0, 1], m[..., 0, 2],
         m[..., 1, 1], m[..., 1, 2], m[..., 2, 2]], axis=-1)


def sym_apply(t6: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Matrix-vector product f @ v for component-packed tensors, (..., 3)."""
    t6 = np.asarray(t6)
    v = np.asarray(v)
    return np.stack([
        t6[..., 0] * v[0] + t6[..., 1] * v[1] + t6[..., 2] * v[2],
        t6[..., 1] * v[0] + t6[..., 3] * v[1] + t6[..., 4] * v[2],
        t6[..., 2] * v[0] + t6[..., 4] * v[1] + t6[..., 5] * v[2],
    ], axis=-1)


def sym_contract(t6: np.ndarray, a: np.ndarray, b: np.ndarray):
    """Bilinear form <f a, b> for component-packed tensors."""
    t6 = np.asarray(t6)
    return (t6[..., 0] * (a[0] * b[0])
            + t6[..., 1] * (a[0] * b[1] + a[1] * b[0])
            + t6[..., 2] * (a[0] * b[2] + a[2] * b[0])
            + t6[..., 3] * (a[1] * b[1])
            + t6[..., 4] * (a[1] * b[2] + a[2] * b[1])
            + t6[..., 5] * (a[2] * b[2]))


def project_transverse(t6: np.ndarray, xi: np.ndarray) -> np.ndarray:
    """Project onto the subspace of tensors annihilating the unit vector xi.

    Returns Pi t Pi with Pi = I - xi xi^T, expanded componentwise:
    (Pi t Pi)_ij = t_ij - xi_i (t xi)_j - xi_j (t xi)_i + xi_i xi_j <xi, t xi>.
    """
    xi = np.asarray(xi, dtype=float)
    nrm = float(np.dot(xi, xi))
    if abs(nrm - 1.0) > 1e-12:
        raise ValueError(f"projection direction must be unit length, |xi|^2 = {nrm!r}")
    t6 = np.asarray(t6)
    w = sym_apply(t6, xi)                      # (..., 3) = t xi
    q = sym_contract(t6, xi, xi)               # <xi, t xi>
    out = np.empty_like(t6)
    for idx, (i, j) in enumerate(((0, 0), (0, 1), (0, 2), (1, 1), (1, 2), (2, 2))):
        out[..., idx] = (t6[..., idx]
                         - xi[i] * w[..., j] - xi[j] * w[..., i]
                         + xi[i] * xi[j] * q)
    return out


def adjugate2(t6: np.ndarray, axis: int) -> np.ndarray:
    """2D adjugate of the tensor block in the plane orthogonal to a grid axis.

    Within the plane the two diagonal entries swap and the off-diagonal entry
    is negated; every component involving the axis direction is zeroed.
    Applying it twice restores the in-plane block.
    """
    a, b = INPLANE_AXES[axis]
    i_aa = COMPONENT_INDEX[(a, a)]
    i_ab = COMPONENT_INDEX[(a, b)]
    i_bb = COMPONENT_INDEX[(b, b)]
    t6 = np.asarray(t6)
    out = np.zeros_like(t6)
    out[..., i_aa] = t6[..., i_bb]
    out[..., i_ab] = -t6[..., i_ab]
    out[..., i_bb] = t6[..., i_aa]
    return out


def eta_cross_f_eta(t6: np.ndarray, axis: int) -> np.ndarray:
    """Vector field eta x (f eta) for an exact coordinate axis eta, (..., 3).

    Pure component selection, e.g. axis 1: f e1 = (f11, f12, f13) and
    e1 x v = (0, -v3, v2), so the result is (0, -f13, f12).
    """
    t6 = np.asarray(t6)
    z = np.zeros(t6.shape[:-1], dtype=t6.dtype)
    if axis == 1:
        comps = (z, -t6[..., 2], t6[..., 1])
    elif axis == 2:
        comps = (t6[..., 4], z, -t6[..., 1])
    elif axis == 3:
        comps = (-t6[..., 4], t6[..., 2], z)
    else:
        raise ValueError(f"axis label must be 1, 2 or 3, got {axis!r}")
    return np.stack(comps, axis=-1)


def inplane_quadratic(t6: np.ndarray, axis: int, xi: np.ndarray):
    """<t xi, xi> restricted to the plane orthogonal to ``axis``.

    Summation order is fixed as (aa, ab, bb) so that the two routes of the
    planar-transform identity produce bit-identical values.
    """
    a, b = INPLANE_AXES[axis]
    xa, xb = xi[a - 1], xi[b - 1]
    t6 = np.asarray(t6)
    return (t6[..., COMPONENT_INDEX[(a, a)]] * (xa * xa)
            + t6[..., COMPONENT_INDEX[(a, b)]] * (2.0 * (xa * xb))
            + t6[..., COMPONENT_INDEX[(b, b)]] * (xb * xb))


# ---------------------------------------------------------------------------
# field container, rays, frames
# ---------------------------------------------------------------------------

@dataclass
class SymTensorField3:
    """Symmetric tensor field sampled at the voxel centers of a cubic grid.

    values has shape (n, n, n, 6), indexed [i1, i2, i3, comp].
    """

    grid: VoxelGrid3
    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        expected = self.grid.shape + (6,)
        if self.values.shape != expected:
            raise ValueError(
                f"field values shape {self.values.shape} does not match grid {expected}")

    @classmethod
    def zeros(cls, grid: VoxelGrid3) -> "SymTensorField3":
        return cls(grid, np.zeros(grid.shape + (6,)))

    def component(self, i: int, j: int | None = None) -> np.ndarray:
        """Component array by pair (i, j) or flat index, view into values."""
        idx = COMPONENT_INDEX[(i, j)] if j is not None else i
        return self.values[..., idx]

    def to_flat(self) -> np.ndarray:
        """Canonical flat layout: component fastest, then x1, then x2, then x3."""
        return np.ascontiguousarray(self.values.transpose(2, 1, 0, 3)).ravel()

    @classmethod
    def from_flat(cls, grid: VoxelGrid3, flat: np.ndarray) -> "SymTensorField3":
        flat = np.asarray(flat, dtype=float)
        if flat.size != grid.n ** 3 * 6:
            raise ValueError(
                f"flat field has {flat.size} values, expected {grid.n ** 3 * 6}")
        vals = flat.reshape(grid.n, grid.n, grid.n, 6).transpose(2, 1, 0, 3)
        return cls(grid, np.ascontiguousarray(vals))


@dataclass(frozen=True)
class Ray:
    """Oriented line {base + t * direction} with unit direction and
    <direction, base> = 0 (base is the point of the line closest to the origin).
    """

    direction: np.ndarray
    base: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "direction", np.asarray(self.direction, dtype=float))
        object.__setattr__(self, "base", np.asarray(self.base, dtype=float))
        if abs(np.dot(self.direction, self.direction) - 1.0) > 1e-12:
            raise ValueError("ray direction must be unit length")
        if abs(np.dot(self.direction, self.base)) > 1e-12:
            raise ValueError("ray base must be orthogonal to its direction")


@dataclass(frozen=True)
class AxisFrame:
    """Rotation frame about a coordinate axis eta at tomographic angle theta.

    With (u, v) the cyclic in-plane axes of eta:

        xi   = cos(theta) u + sin(theta) v     (ray direction)
        zeta = xi x eta = sin(theta) u - cos(theta) v

    (eta, zeta, xi) is right-handed, det[eta zeta xi] = +1.  Detector columns
    run along zeta, rows along eta.
    """

    axis: int
    theta: float

    def __post_init__(self):
        if self.axis not in (1, 2, 3):
            raise ValueError(f"axis label must be 1, 2 or 3, got {self.axis!r}")

    @property
    def eta(self) -> np.ndarray:
        return unit_vector(self.axis)

    @property
    def xi(self) -> np.ndarray:
        a, b = INPLANE_AXES[self.axis]
        out = np.zeros(3)
        out[a - 1] = np.cos(self.theta)
        out[b - 1] = np.sin(self.theta)
        return out

    @property
    def zeta(self) -> np.ndarray:
        return np.cross(self.xi, self.eta)

    def ray(self, s: float, p: float) -> Ray:
        """Ray at plane offset s along eta and signed offset p along zeta."""
        return Ray(direction=self.xi, base=s * self.eta + p * self.zeta)


def slice_field(f: SymTensorField3, axis: int, s_index: int) -> np.ndarray:
    """Slab of the field on the plane <x, eta> = s, shape (n, n, 6).

    The slab is indexed [ia, ib, comp] with (a, b) the cyclic in-plane axes.
    """
    n = f.grid.n
    if not 0 <= s_index < n:
        raise ValueError(f"plane index {s_index} out of range [0, {n})")
    if axis == 1:
        return f.values[s_index, :, :, :]
    if axis == 2:
        return f.values[:, s_index, :, :].transpose(1, 0, 2)
    if axis == 3:
        return f.values[:, :, s_index, :]
    raise ValueError(f"axis label must be 1, 2 or 3, got {axis!r}")


def stack_slices(slabs, axis: int, grid: VoxelGrid3) -> SymTensorField3:
    """Reassemble a field from its ``slice_field`` slabs (inverse operation)."""
    n = grid.n
    if len(slabs) != n:
        raise ValueError(f"need {n} slabs, got {len(slabs)}")
    out = np.empty(grid.shape + (6,))
    for s, slab in enumerate(slabs):
        if axis == 1:
            out[s, :, :, :] = slab
        elif axis == 2:
            out[:, s, :, :] = np.transpose(slab, (1, 0, 2))
        elif axis == 3:
            out[:, :, s, :] = slab
        else:
            raise ValueError(f"axis label must be 1, 2 or 3, got {axis!r}")
    return SymTensorField3(grid, out)
