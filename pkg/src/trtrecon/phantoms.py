"""Test fields: the smooth (Gaussian) and sharp (box) phantoms, symmetrised
displacement gradients, and the null-space demonstrator fields for one-axis
and two-axis acquisition.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from scipy.integrate import cumulative_trapezoid

from .core import COMPONENT_INDEX, SymTensorField3, VoxelGrid3
from .spectral import SpectralField, angular_freqs, idft3


@dataclass(frozen=True)
class GaussianBump:
    """b(x) = alpha * exp(-rate * |x - center|^2)."""

    alpha: float
    center: tuple
    rate: float = 50.0

    def __call__(self, x1, x2, x3):
        a1, a2, a3 = self.center
        r2 = (x1 - a1) ** 2 + (x2 - a2) ** 2 + (x3 - a3) ** 2
        return self.alpha * np.exp(-self.rate * r2)


# Smooth phantom: per-component Gaussian bumps (amplitude, center).  The two
# overlapping f22 entries at (0.5, 0.5, 0.5) are kept as listed and cancel.
SMOOTH_TABLE = {
    "11": ((-1, (-0.5, -0.5, -0.5)), (1, (-0.5, 0.5, -0.5)), (-1, (-0.5, 0.5, 0.5))),
    "12": ((1, (0.5, -0.5, 0.5)), (-1, (0.5, 0.5, -0.5))),
    "13": ((1, (-0.5, -0.5, -0.5)), (-1, (-0.5, -0.5, 0.5)), (1, (-0.5, 0.5, 0.5))),
    "22": ((-1, (0.5, -0.5, -0.5)), (1, (0.5, 0.5, 0.5)), (-1, (0.5, 0.5, 0.5))),
    "23": ((1, (-0.5, -0.5, 0.5)), (-1, (-0.5, 0.5, -0.5))),
    "33": ((1, (0.5, -0.5, -0.5)), (-1, (0.5, -0.5, 0.5)), (1, (0.5, 0.5, 0.5))),
}


@dataclass(frozen=True)
class BoxSpec:
    """Axis-aligned box I1 x I2 x I3 given as (low, high) pairs."""

    i1: tuple
    i2: tuple
    i3: tuple

    def __post_init__(self):
        for lo, hi in (self.i1, self.i2, self.i3):
            if not lo < hi:
                raise ValueError(f"empty box interval ({lo}, {hi})")

    def contains(self, x1, x2, x3):
        """Indicator at points; boundary points count as inside."""
        return ((self.i1[0] <= x1) & (x1 <= self.i1[1])
                & (self.i2[0] <= x2) & (x2 <= self.i2[1])
                & (self.i3[0] <= x3) & (x3 <= self.i3[1]))


# Sharp phantom boxes.  The third interval of the first row is read as
# [-0.8, 0.8] (comma-for-decimal-point typo in the source table).
SHARP_TABLE = {
    "11": BoxSpec((-0.4, 0.4), (-0.6, 0.2), (-0.8, 0.8)),
    "12": BoxSpec((-0.4, 0.4), (-0.2, 0.6), (-0.8, 0.8)),
    "13": BoxSpec((-0.8, 0.8), (-0.4, 0.4), (-0.6, 0.2)),
    "22": BoxSpec((-0.8, 0.8), (-0.4, 0.4), (-0.2, 0.6)),
    "23": BoxSpec((-0.6, 0.2), (-0.8, 0.8), (-0.4, 0.4)),
    "33": BoxSpec((-0.2, 0.6), (-0.8, 0.8), (-0.4, 0.4)),
}

_COMP_ORDER = ("11", "12", "13", "22", "23", "33")


def smooth_phantom(grid: VoxelGrid3) -> SymTensorField3:
    """Smooth test field: sums of Gaussian bumps per component, evaluated at
    voxel centers.  Deterministic."""
    x1, x2, x3 = grid.meshgrid()
    vals = np.zeros(grid.shape + (6,))
    for ci, name in enumerate(_COMP_ORDER):
        for alpha, center in SMOOTH_TABLE[name]:
            vals[..., ci] += GaussianBump(alpha, center)(x1, x2, x3)
    return SymTensorField3(grid, vals)


def sharp_phantom(grid: VoxelGrid3) -> SymTensorField3:
    """Sharp test field: each component is the indicator of its box, sampled
    at voxel centers (centers on the boundary count as inside)."""
    x1, x2, x3 = grid.meshgrid()
    vals = np.zeros(grid.shape + (6,))
    for ci, name in enumerate(_COMP_ORDER):
        vals[..., ci] = SHARP_TABLE[name].contains(x1, x2, x3).astype(float)
    return SymTensorField3(grid, vals)


# ---------------------------------------------------------------------------
# analytic Gaussian with partial derivatives
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Gaussian3:
    """alpha * exp(-rate |x - center|^2) with analytic partials up to order 2."""

    alpha: float = 1.0
    center: tuple = (0.0, 0.0, 0.0)
    rate: float = 50.0

    def _dev(self, coords):
        return [coords[k] - self.center[k] for k in range(3)]

    def value(self, coords):
        d = self._dev(coords)
        return self.alpha * np.exp(-self.rate * (d[0] ** 2 + d[1] ** 2 + d[2] ** 2))

    def d(self, i, coords):
        """First partial along axis label i."""
        return -2.0 * self.rate * self._dev(coords)[i - 1] * self.value(coords)

    def dd(self, i, j, coords):
        """Second partial along axis labels i, j."""
        dev = self._dev(coords)
        g = self.value(coords)
        out = 4.0 * self.rate**2 * dev[i - 1] * dev[j - 1] * g
        if i == j:
            out = out - 2.0 * self.rate * g
        return out


@dataclass(frozen=True)
class GaussianDisplacement:
    """Displacement field whose components are single Gaussian bumps."""

    bumps: tuple = (Gaussian3(0.04, (0.2, -0.1, 0.1), 12.0),
                    Gaussian3(-0.05, (-0.15, 0.2, -0.1), 12.0),
                    Gaussian3(0.03, (0.1, 0.15, 0.2), 12.0))

    def value(self, coords):
        return np.stack([b.value(coords) for b in self.bumps], axis=-1)

    def jacobian(self, coords):
        """J[..., i, j] = du_i / dx_j."""
        rows = [np.stack([b.d(j, coords) for j in (1, 2, 3)], axis=-1)
                for b in self.bumps]
        return np.stack(rows, axis=-2)


def potential_field(grid: VoxelGrid3, u) -> SymTensorField3:
    """Symmetrised displacement gradient f_ij = du_i/dx_j + du_j/dx_i.

    u is either an object exposing ``jacobian(coords)`` (derivatives taken
    analytically) or an (n, n, n, 3) sample array (central differences in the
    interior, one-sided at the boundary).
    """
    if hasattr(u, "jacobian"):
        jac = u.jacobian(grid.meshgrid())
    else:
        u = np.asarray(u, dtype=float)
        if u.shape != grid.shape + (3,):
            raise ValueError(f"sampled displacement must be {grid.shape + (3,)}")
        dx = grid.voxel_size
        jac = np.stack(
            [np.stack(np.gradient(u[..., i], dx), axis=-1) for i in range(3)],
            axis=-2)
    vals = np.empty(grid.shape + (6,))
    for ci, (i, j) in enumerate(((1, 1), (1, 2), (1, 3), (2, 2), (2, 3), (3, 3))):
        vals[..., ci] = jac[..., i - 1, j - 1] + jac[..., j - 1, i - 1]
    return SymTensorField3(grid, vals)


def _warn_if_boundary_support(grid, sample, what, tol=1e-6):
    interior = np.abs(sample).max()
    if interior == 0:
        return
    faces = np.concatenate([
        np.abs(np.take(sample, [0, grid.n - 1], axis=k)).ravel() for k in range(3)])
    if faces.max() > tol * interior:
        warnings.warn(
            f"{what} does not decay at the grid boundary "
            f"(face/interior ratio {faces.max() / interior:.2e}); "
            "integration constants are anchored there", stacklevel=3)


def one_axis_null_field(grid: VoxelGrid3, u2=None, amplitude: float = 1.0,
                        rate: float = 8.0) -> SymTensorField3:
    """Potential field invisible to acquisition about e1.

    The displacement is u = (0, u2, u3) with u3 the cumulative integral of
    -du2/dx2 along x3 from the lower face, which forces f11 = 0 exactly and
    du2/dx2 + du3/dx3 = 0.

    The default generator takes u2 = d/dx3 of a Gaussian stream bump, so the
    integral closes to u3 = -d/dx2 of the same bump and the whole field is
    evaluated from analytic derivatives.  Passing a ``Gaussian3`` for u2 uses
    its analytic x2-derivative and a trapezoid integral; a plain (n, n, n)
    sample array is differentiated and integrated numerically.
    """
    coords = grid.meshgrid()
    dx = grid.voxel_size
    if u2 is None:
        w = Gaussian3(1.0, (0.0, 0.0, 0.0), rate)
        u2_s = w.d(3, coords)
        u3_s = -w.d(2, coords)
        vals = np.zeros(grid.shape + (6,))
        vals[..., COMPONENT_INDEX[(1, 2)]] = w.dd(1, 3, coords)
        vals[..., COMPONENT_INDEX[(1, 3)]] = -w.dd(1, 2, coords)
        vals[..., COMPONENT_INDEX[(2, 2)]] = 2.0 * w.dd(2, 3, coords)
        vals[..., COMPONENT_INDEX[(2, 3)]] = w.dd(3, 3, coords) - w.dd(2, 2, coords)
        vals[..., COMPONENT_INDEX[(3, 3)]] = -2.0 * w.dd(2, 3, coords)
        field = SymTensorField3(grid, vals)
    else:
        if isinstance(u2, Gaussian3):
            u2_s = u2.value(coords)
            du2_dx2 = u2.d(2, coords)
        else:
            u2_s = np.asarray(u2, dtype=float)
            if u2_s.shape != grid.shape:
                raise ValueError(f"sampled u2 must have shape {grid.shape}")
            du2_dx2 = np.gradient(u2_s, dx, axis=1)
        u3_s = -cumulative_trapezoid(du2_dx2, dx=dx, axis=2, initial=0.0)
        u = np.stack([np.zeros(grid.shape), u2_s, u3_s], axis=-1)
        field = potential_field(grid, u)
    _warn_if_boundary_support(grid, u2_s, "one-axis null generator u2")
    _warn_if_boundary_support(grid, u3_s, "derived displacement u3")
    peak = np.abs(field.values).max()
    if peak > 0:
        field.values *= amplitude / peak
    return field


def two_axis_null_field(grid: VoxelGrid3, seed_hat=None, amplitude: float = 1.0,
                        freq_fraction: float = 0.3, width_ratio: float = 7.0
                        ) -> SymTensorField3:
    """Field invisible to acquisition about both e1 and e2 but not e3.

    Constructed in the frequency domain from an arbitrary seed for the 33
    component:

        F33 = g,  F23 = -y3/(2 y2) g,  F13 = -y3/(2 y1) g,
        F12 = y3^2/(2 y1 y2) g,  F11 = F22 = 0.

    The seed must vanish on the frequency planes y1 = 0 and y2 = 0.  The
    default seed is a pair of Gaussian blobs mirrored through the origin
    (real and even, hence a real spatial field), centred at
    freq_fraction * Nyquist on each axis with width centre/width_ratio.
    """
    n = grid.n
    f = angular_freqs(n, grid.voxel_size)
    y1 = f[:, None, None]
    y2 = f[None, :, None]
    y3 = f[None, None, :]

    if seed_hat is None:
        c = freq_fraction * np.pi / grid.voxel_size
        sig = c / width_ratio
        ghat = np.zeros(grid.shape)
        for s1, s2, s3 in ((c, c, c), (-c, -c, -c)):
            ghat = ghat + np.exp(
                -((y1 - s1) ** 2 + (y2 - s2) ** 2 + (y3 - s3) ** 2) / (2.0 * sig**2))
        ghat = ghat.astype(complex)
    else:
        ghat = np.asarray(seed_hat, dtype=complex)
        if ghat.shape != grid.shape:
            raise ValueError(f"seed spectrum must have shape {grid.shape}")
        herm = SpectralField(grid, ghat).hermitian_residual()
        if herm > 1e-8 * max(np.abs(ghat).max(), 1e-300):
            raise ValueError("seed spectrum is not Hermitian-symmetric (field would be complex)")

    scale = np.abs(ghat).max()
    if scale == 0:
        return SymTensorField3.zeros(grid)
    on_planes = (y1 == 0) | (y2 == 0)
    if np.abs(np.where(on_planes, ghat, 0)).max() > 1e-9 * scale:
        raise ValueError(
            "seed spectrum has support on the excluded frequency planes y1=0 / y2=0")
    ghat = np.where(on_planes, 0, ghat)

    inv1 = np.where(y1 != 0, 1.0 / np.where(y1 != 0, y1, 1.0), 0.0)
    inv2 = np.where(y2 != 0, 1.0 / np.where(y2 != 0, y2, 1.0), 0.0)
    spectra = {
        (3, 3): ghat,
        (2, 3): -0.5 * y3 * inv2 * ghat,
        (1, 3): -0.5 * y3 * inv1 * ghat,
        (1, 2): 0.5 * y3**2 * inv1 * inv2 * ghat,
    }
    vals = np.zeros(grid.shape + (6,))
    for (i, j), spec in spectra.items():
        spatial = idft3(SpectralField(grid, spec))
        resid = np.abs(spatial.imag).max()
        if resid > 1e-10 * max(np.abs(spatial.real).max(), 1e-300):
            raise ValueError(f"component {i}{j} came out complex (imag residue {resid:.2e})")
        vals[..., COMPONENT_INDEX[(i, j)]] = spatial.real
    field = SymTensorField3(grid, vals)
    peak = np.abs(field.values).max()
    if peak > 0:
        field.values *= amplitude / peak
    return field
