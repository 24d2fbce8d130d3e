"""Inversion pipelines.

Diagonal components come from plane-by-plane scalar filtered back-projection
of the axial data.  Off-diagonals are solved per frequency from the three
tangential-component fields

    lambda_i(y) = <F(y) e_i, Pi_i y>,

assembled from the differentiated J1 data; the alternative diagonal route
uses the cubic-ramp fields mu_i(y) = <F(y) Pi_i y, Pi_i y> from the J2 data.

Normalisation conventions (derived for unitary DFTs, angles uniform over the
full circle, and back-projection as the plain mean over angles):

* scalar FBP carries a factor 1/2, compensating the double coverage of every
  line over [0, 2*pi);
* lambda assembly multiplies by -(i/2) |Pi_i y|.  The minus sign pairs with
  detector columns running along zeta = xi x eta;
* mu assembly multiplies by (1/2) |Pi_i y|^3.

The assembled spectra then satisfy the per-frequency systems directly in DFT
units; no further scale calibration appears anywhere.

Accuracy measures baked into the spectral route:

* back-projections are evaluated on an enlarged grid (pad_factor, default 2)
  before transforming; the back-projected fields decay slowly and
  transforming them on the tight domain aliases the truncated tails across
  the whole band;
* the known multiplicative response of the data processing (the Hamming
  window of the p-derivative and the squared-sinc of linear interpolation)
  is divided out, with the gain clamped;
* frequency content the per-bin systems cannot determine (the coordinate
  planes, where the system matrices lose rank) is repaired in the spatial
  domain by anchoring: such content is constant along a grid axis, and the
  true field vanishes at the domain faces, so subtracting the low-face
  slices restores it from the well-determined content.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field as dc_field

import numpy as np
from scipy.integrate import cumulative_trapezoid

from .backprojection import backproject_axis
from .core import COMPONENT_INDEX, SymTensorField3, VoxelGrid3
from .projector import COMP_AXIAL, COMP_J1, COMP_J2, TrtDataSet
from .spectral import (
    SpectralField,
    dft3,
    hamming_derivative,
    idft3,
    ramp_filter_sinogram,
    transverse_freq_magnitude,
)

# Compensates each line being measured twice over a full circle of angles.
FULL_CIRCLE_HALF = 0.5

# Relative threshold (fraction of the Nyquist frequency) below which a
# frequency coordinate counts as singular for the closed-form solves.
TAU_SING_REL = 1e-9

# Smallest data-processing response that is divided out during spectral
# assembly.  Gains are clamped to 1/RESPONSE_FLOOR: the response only drops
# below this near the top of the band, where smooth fields carry no content
# and uncapped gains would amplify the broadband assembly error instead.
RESPONSE_FLOOR = 0.5


@dataclass
class LambdaTriple:
    lam1: SpectralField
    lam2: SpectralField
    lam3: SpectralField

    def __iter__(self):
        return iter((self.lam1, self.lam2, self.lam3))

    @property
    def grid(self) -> VoxelGrid3:
        return self.lam1.grid


@dataclass
class MuTriple:
    mu1: SpectralField
    mu2: SpectralField
    mu3: SpectralField

    def __iter__(self):
        return iter((self.mu1, self.mu2, self.mu3))

    @property
    def grid(self) -> VoxelGrid3:
        return self.mu1.grid


# ---------------------------------------------------------------------------
# diagonals by scalar FBP
# ---------------------------------------------------------------------------

def fbp_diagonal_axis(data: TrtDataSet, axis: int) -> np.ndarray:
    """Scalar FBP of one axis' axial component: ramp filter the rows in p,
    back-project slice by slice, halve.  Recovers f_{axis,axis}."""
    sino = data.component(axis, COMP_AXIAL)
    filtered = ramp_filter_sinogram(sino, data.pitch, axis=-1)
    vol = backproject_axis(filtered, axis, data.recon_grid)
    return FULL_CIRCLE_HALF * vol


def recover_diagonals_fbp(data: TrtDataSet):
    """(f11, f22, f33) voxel arrays on the reconstruction grid."""
    for axis in (1, 2, 3):
        if not data.has_axis(axis):
            raise ValueError(f"diagonal recovery needs axis e{axis} data")
    return tuple(fbp_diagonal_axis(data, axis) for axis in (1, 2, 3))


# ---------------------------------------------------------------------------
# spectral assembly
# ---------------------------------------------------------------------------

def _zero_nyquist_planes(values: np.ndarray) -> np.ndarray:
    """Zero the Nyquist planes of an even-sized lattice.  The Nyquist alias
    sign does not flip under k -> -k, so the odd spectral factors cannot
    treat those planes consistently with a real field; they sit above every
    band used for accuracy statements."""
    n = values.shape[0]
    if n % 2 == 0:
        values[n // 2, :, :] = 0.0
        values[:, n // 2, :] = 0.0
        values[:, :, n // 2] = 0.0
    return values


def _processing_response(kappa: np.ndarray, data: TrtDataSet,
                         windowed: bool) -> np.ndarray:
    """Multiplicative response of the data processing at transverse frequency
    kappa: the squared sinc of linear interpolation in p, times (for the
    differentiated J1 route) the Hamming window in its centred arrangement on
    the detector lattice."""
    pitch = data.pitch
    resp = np.sinc(kappa * pitch / (2.0 * np.pi)) ** 2
    if windowed:
        n_p = data.w
        dk = 2.0 * np.pi / (n_p * pitch)
        pos = np.clip(kappa / dk + n_p // 2, 0, n_p - 1)
        resp = resp * (0.54 - 0.46 * np.cos(2.0 * np.pi * pos / (n_p - 1)))
    return resp


def _assemble_axis(data: TrtDataSet, axis: int, pad_factor: int, component: int,
                   windowed: bool, prefactor: complex, power: int) -> SpectralField:
    rows = data.component(axis, component)
    if windowed:
        rows = hamming_derivative(rows, data.pitch, axis=-1)
    vol = backproject_axis(rows, axis, data.recon_grid, pad_factor=pad_factor)
    padded = data.recon_grid.padded(pad_factor)
    spec = dft3(vol, padded)
    r = transverse_freq_magnitude(padded, axis)
    gain = 1.0 / np.maximum(_processing_response(r, data, windowed), RESPONSE_FLOOR)
    values = prefactor * r**power * gain * spec.values
    return SpectralField(padded, _zero_nyquist_planes(values))


def assemble_lambda(data: TrtDataSet, axis: int, pad_factor: int = 2) -> SpectralField:
    """Tangential-component spectrum lambda_i from the J1 data of one axis:
    differentiate along p (Hamming-regularised), back-project slice by slice
    on the padded grid, transform, multiply by -(i/2)|Pi_i y|, and divide
    out the clamped processing response."""
    return _assemble_axis(data, axis, pad_factor, COMP_J1,
                          windowed=True, prefactor=-0.5j, power=1)


def assemble_mu(data: TrtDataSet, axis: int, pad_factor: int = 2) -> SpectralField:
    """Cubic-ramp spectrum mu_i from the J2 data of one axis (no derivative):
    back-project, transform, multiply by (1/2)|Pi_i y|^3, and divide out the
    clamped interpolation response."""
    return _assemble_axis(data, axis, pad_factor, COMP_J2,
                          windowed=False, prefactor=0.5, power=3)


def assemble_lambda_triple(data: TrtDataSet, pad_factor: int = 2) -> LambdaTriple:
    return LambdaTriple(*(assemble_lambda(data, ax, pad_factor) for ax in (1, 2, 3)))


def assemble_mu_triple(data: TrtDataSet, pad_factor: int = 2) -> MuTriple:
    return MuTriple(*(assemble_mu(data, ax, pad_factor) for ax in (1, 2, 3)))


# ---------------------------------------------------------------------------
# per-frequency solvers
# ---------------------------------------------------------------------------

def _freq_mesh(grid: VoxelGrid3):
    f = 2.0 * np.pi * np.fft.fftfreq(grid.n, d=grid.voxel_size)
    return (f[:, None, None], f[None, :, None], f[None, None, :])


def _tau(grid: VoxelGrid3) -> float:
    return TAU_SING_REL * np.pi / grid.voxel_size


def _lstsq_minnorm(mats: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    """Minimum-norm least-squares solutions of stacked 3x3 real systems with
    complex right-hand sides, via pseudo-inverse."""
    pinv = np.linalg.pinv(mats)
    return np.einsum("bij,bj->bi", pinv, rhs)


def solve_lambda_bins(y1, y2, y3, l1, l2, l3, tau: float):
    """Per-frequency solve of the off-diagonal system

        [[y2, y3, 0], [y1, 0, y3], [0, y1, y2]] (F12, F13, F23)^T = lambda.

    Closed forms where all |y_k| > tau; minimum-norm least squares on the
    singular set.  Inputs are broadcast arrays; returns (F12, F13, F23).
    """
    y1, y2, y3 = np.broadcast_arrays(y1, y2, y3)
    l1, l2, l3 = (np.asarray(v, dtype=complex) for v in
                  np.broadcast_arrays(l1, l2, l3))
    shape = y1.shape
    f12 = np.zeros(shape, dtype=complex)
    f13 = np.zeros(shape, dtype=complex)
    f23 = np.zeros(shape, dtype=complex)

    ns = (np.abs(y1) > tau) & (np.abs(y2) > tau) & (np.abs(y3) > tau)
    a1, a2, a3 = y1[ns], y2[ns], y3[ns]
    b1, b2, b3 = l1[ns], l2[ns], l3[ns]
    f12[ns] = b1 / (2 * a2) + b2 / (2 * a1) - b3 * a3 / (2 * a1 * a2)
    f13[ns] = b1 / (2 * a3) + b3 / (2 * a1) - b2 * a2 / (2 * a1 * a3)
    f23[ns] = b2 / (2 * a3) + b3 / (2 * a2) - b1 * a1 / (2 * a2 * a3)

    sing = ~ns
    if np.any(sing):
        s1, s2, s3 = y1[sing], y2[sing], y3[sing]
        z = np.zeros_like(s1)
        mats = np.stack([
            np.stack([s2, s3, z], axis=-1),
            np.stack([s1, z, s3], axis=-1),
            np.stack([z, s1, s2], axis=-1),
        ], axis=-2)
        rhs = np.stack([l1[sing], l2[sing], l3[sing]], axis=-1)
        sol = _lstsq_minnorm(mats, rhs)
        f12[sing], f13[sing], f23[sing] = sol[:, 0], sol[:, 1], sol[:, 2]
    return f12, f13, f23


def solve_nu_bins(y1, y2, y3, nu1, nu2, nu3, tau: float):
    """Per-frequency solve of the diagonal system

        [[0, y2^2, y3^2], [y1^2, 0, y3^2], [y1^2, y2^2, 0]] (F11, F22, F33)^T = nu.

    Closed forms off the coordinate planes; minimum-norm least squares on
    them.  Returns (F11, F22, F33).
    """
    y1, y2, y3 = np.broadcast_arrays(y1, y2, y3)
    nu1, nu2, nu3 = (np.asarray(v, dtype=complex) for v in
                     np.broadcast_arrays(nu1, nu2, nu3))
    shape = y1.shape
    f11 = np.zeros(shape, dtype=complex)
    f22 = np.zeros(shape, dtype=complex)
    f33 = np.zeros(shape, dtype=complex)

    ns = (np.abs(y1) > tau) & (np.abs(y2) > tau) & (np.abs(y3) > tau)
    a1, a2, a3 = y1[ns], y2[ns], y3[ns]
    b1, b2, b3 = nu1[ns], nu2[ns], nu3[ns]
    f11[ns] = (b2 + b3 - b1) / (2 * a1**2)
    f22[ns] = (b1 + b3 - b2) / (2 * a2**2)
    f33[ns] = (b2 + b1 - b3) / (2 * a3**2)

    sing = ~ns
    if np.any(sing):
        s1, s2, s3 = y1[sing] ** 2, y2[sing] ** 2, y3[sing] ** 2
        z = np.zeros_like(s1)
        mats = np.stack([
            np.stack([z, s2, s3], axis=-1),
            np.stack([s1, z, s3], axis=-1),
            np.stack([s1, s2, z], axis=-1),
        ], axis=-2)
        rhs = np.stack([nu1[sing], nu2[sing], nu3[sing]], axis=-1)
        sol = _lstsq_minnorm(mats, rhs)
        f11[sing], f22[sing], f33[sing] = sol[:, 0], sol[:, 1], sol[:, 2]
    return f11, f22, f33


def solve_offdiagonals(lam: LambdaTriple):
    """(F12, F13, F23) spectra from the three tangential-component fields.

    Closed forms hold wherever no frequency coordinate vanishes; on the
    singular planes the systems are rank-deficient and solved in the
    minimum-norm least-squares sense (the content they cannot determine is
    recovered later by spatial anchoring)."""
    grid = lam.grid
    y1, y2, y3 = _freq_mesh(grid)
    f12, f13, f23 = solve_lambda_bins(
        y1, y2, y3, lam.lam1.values, lam.lam2.values, lam.lam3.values, _tau(grid))
    for arr in (f12, f13, f23):
        _zero_nyquist_planes(arr)
    return (SpectralField(grid, f12), SpectralField(grid, f13), SpectralField(grid, f23))


def recover_diagonals_alternative(lam: LambdaTriple, mu: MuTriple):
    """(F11, F22, F33) spectra recovered from the J2 route.

    Off the coordinate planes this is the direct substitution

        F11 = (mu2 + mu3 - mu1 + y2 l2 + y3 l3 - 3 y1 l1) / (2 y1^2)

    and cyclic counterparts.  On the planes the rearranged diagonal system is
    solved in the minimum-norm least-squares sense with right-hand sides
    nu_i = mu_i - 2 y_j y_k F_jk, off-diagonals taken from the lambda solve.
    """
    grid = mu.grid
    if lam.grid != grid:
        raise ValueError("lambda and mu triples live on different lattices")
    y1, y2, y3 = _freq_mesh(grid)
    tau = _tau(grid)
    l1, l2, l3 = lam.lam1.values, lam.lam2.values, lam.lam3.values
    m1, m2, m3 = mu.mu1.values, mu.mu2.values, mu.mu3.values
    shape = np.broadcast_shapes(y1.shape, y2.shape, y3.shape)
    f11 = np.zeros(shape, dtype=complex)
    f22 = np.zeros(shape, dtype=complex)
    f33 = np.zeros(shape, dtype=complex)
    ns = (np.abs(y1) > tau) & (np.abs(y2) > tau) & (np.abs(y3) > tau)
    a1, a2, a3 = (np.broadcast_to(y, shape)[ns] for y in (y1, y2, y3))
    c1, c2, c3 = m1[ns], m2[ns], m3[ns]
    d1, d2, d3 = l1[ns], l2[ns], l3[ns]
    f11[ns] = (c2 + c3 - c1 + a2 * d2 + a3 * d3 - 3 * a1 * d1) / (2 * a1**2)
    f22[ns] = (c1 + c3 - c2 + a1 * d1 + a3 * d3 - 3 * a2 * d2) / (2 * a2**2)
    f33[ns] = (c2 + c1 - c3 + a2 * d2 + a1 * d1 - 3 * a3 * d3) / (2 * a3**2)
    sing = ~ns
    if np.any(sing):
        off12, off13, off23 = solve_offdiagonals(lam)
        nu1 = (m1 - 2.0 * y2 * y3 * off23.values)[sing]
        nu2 = (m2 - 2.0 * y1 * y3 * off13.values)[sing]
        nu3 = (m3 - 2.0 * y1 * y2 * off12.values)[sing]
        s1, s2, s3 = (np.broadcast_to(y, shape)[sing] ** 2 for y in (y1, y2, y3))
        z = np.zeros_like(s1)
        mats = np.stack([
            np.stack([z, s2, s3], axis=-1),
            np.stack([s1, z, s3], axis=-1),
            np.stack([s1, s2, z], axis=-1),
        ], axis=-2)
        rhs = np.stack([nu1, nu2, nu3], axis=-1)
        sol = _lstsq_minnorm(mats, rhs)
        f11[sing], f22[sing], f33[sing] = sol[:, 0], sol[:, 1], sol[:, 2]
    for arr in (f11, f22, f33):
        _zero_nyquist_planes(arr)
    return (SpectralField(grid, f11), SpectralField(grid, f22), SpectralField(grid, f33))


# ---------------------------------------------------------------------------
# full pipelines
# ---------------------------------------------------------------------------

def _crop_padded(arr: np.ndarray, grid: VoxelGrid3, pad_factor: int) -> np.ndarray:
    off = grid.pad_offset(pad_factor)
    sl = slice(off, off + grid.n)
    return np.ascontiguousarray(arr[sl, sl, sl])


def anchor_low_faces(comp: np.ndarray, axes=(0, 1, 2)) -> np.ndarray:
    """Pin the content that is constant along grid axes by subtracting the
    low-face slices, in sequence.

    The per-frequency solves leave the coordinate-plane bins (content
    constant along the corresponding axis) underdetermined.  The true field
    vanishes near the domain faces, so forcing the reconstruction to zero on
    the low faces restores exactly that content from the well-determined
    remainder."""
    out = comp
    for ax in axes:
        sl = [slice(None)] * out.ndim
        sl[ax] = slice(0, 1)
        out = out - out[tuple(sl)]
    return out


def _spectrum_to_component(spec: SpectralField, grid: VoxelGrid3, pad_factor: int):
    """Inverse transform, real part, crop to the reconstruction grid.
    Returns (component, relative imaginary residue)."""
    spatial = idft3(spec)
    norm = np.linalg.norm(spatial)
    resid = np.linalg.norm(spatial.imag) / norm if norm > 0 else 0.0
    return _crop_padded(spatial.real, grid, pad_factor), float(resid)


def spectra_to_components(specs, grid: VoxelGrid3, pad_factor: int,
                          anchor: bool = True, what: str = "component"):
    """Shared tail of the spectral routes: inverse transform, crop, anchor."""
    out = []
    for k, spec in enumerate(specs):
        comp, resid = _spectrum_to_component(spec, grid, pad_factor)
        if resid > 1e-6:
            warnings.warn(f"{what} {k}: imaginary residue {resid:.2e}")
        out.append(anchor_low_faces(comp) if anchor else comp)
    return out


def reconstruct_three_axis(data: TrtDataSet, pad_factor: int = 2) -> SymTensorField3:
    """Full reconstruction from three-axis data: diagonals by scalar FBP,
    off-diagonals through the per-frequency tangential solve."""
    d11, d22, d33 = recover_diagonals_fbp(data)
    lam = assemble_lambda_triple(data, pad_factor)
    specs = solve_offdiagonals(lam)
    grid = data.recon_grid
    off = spectra_to_components(specs, grid, pad_factor, what="off-diagonal")
    vals = np.empty(grid.shape + (6,))
    for (i, j), comp in (((1, 1), d11), ((2, 2), d22), ((3, 3), d33),
                         ((1, 2), off[0]), ((1, 3), off[1]), ((2, 3), off[2])):
        vals[..., COMPONENT_INDEX[(i, j)]] = comp
    return SymTensorField3(grid, vals)


def _integrate_detrended(arr: np.ndarray, dx: float, axis: int) -> np.ndarray:
    """Cumulative trapezoid integral from the low face, with the linear drift
    removed so the result also vanishes at the high face.

    Both anchors are justified by decay: the displacements being integrated
    vanish near the domain boundary, so any high-face residue is accumulated
    reconstruction error, best attributed uniformly along the path."""
    u = cumulative_trapezoid(arr, dx=dx, axis=axis, initial=0.0)
    n = u.shape[axis]
    end = np.take(u, [n - 1], axis=axis)
    ramp = (np.arange(n) / (n - 1)).reshape([-1 if k == axis else 1 for k in range(u.ndim)])
    return u - end * ramp


@dataclass
class TwoAxisPotentialResult:
    displacement: np.ndarray            # (n, n, n, 3)
    field: SymTensorField3
    warnings: list = dc_field(default_factory=list)


def reconstruct_two_axis_potential(data: TrtDataSet, pad_factor: int = 2
                                   ) -> TwoAxisPotentialResult:
    """Reconstruct a potential (symmetrised-gradient) field and its
    displacement from axes e1 and e2 only.

    f11 and f22 come from scalar FBP; u1 and u2 follow by cumulative
    integration (anchored by decay at both faces); f12 from their
    derivatives; F13 from the axis-1 tangential spectrum via
    y3 F13 = lambda_1 - y2 F12, with the y3 = 0 plane resolved by anchoring
    f13 at the low x3 face; u3 by integrating f13 - du1/dx3 along x1,
    averaged with the mirror route through the axis-2 tangential spectrum
    (y3 F23 = lambda_2 - y1 F12, integrated along x2); the remaining
    components from u3's derivatives.
    """
    notes = []
    for axis in (1, 2):
        if not data.has_axis(axis):
            raise ValueError(f"two-axis potential reconstruction needs axis e{axis}")
    if data.has_axis(3):
        notes.append("axis e3 data present; only axes e1 and e2 are used")

    grid = data.recon_grid
    dx = grid.voxel_size
    f11 = fbp_diagonal_axis(data, 1)
    f22 = fbp_diagonal_axis(data, 2)

    # f_ii = 2 du_i/dx_i; integrals anchored at the low-coordinate faces
    u1 = 0.5 * _integrate_detrended(f11, dx, axis=0)
    u2 = 0.5 * _integrate_detrended(f22, dx, axis=1)
    f12 = np.gradient(u1, dx, axis=1) + np.gradient(u2, dx, axis=0)

    padded = grid.padded(pad_factor)
    off = grid.pad_offset(pad_factor)
    f12_padded = np.zeros(padded.shape)
    sl = slice(off, off + grid.n)
    f12_padded[sl, sl, sl] = f12
    spec12 = dft3(f12_padded, padded)
    y1, y2, y3 = _freq_mesh(padded)
    tau = _tau(padded)
    safe_y3 = np.where(np.abs(y3) > tau, y3, 1.0)

    def offdiag_from_lambda(axis, ycoef):
        # y3 F_a3 = lambda_axis - y_other F12, F_a3 undetermined on y3 = 0
        lam = assemble_lambda(data, axis, pad_factor)
        spec = np.where(np.abs(y3) > tau,
                        (lam.values - ycoef * spec12.values) / safe_y3, 0.0)
        _zero_nyquist_planes(spec)
        comp, resid = _spectrum_to_component(SpectralField(padded, spec),
                                             grid, pad_factor)
        if resid > 1e-6:
            notes.append(f"f{axis}3 spectrum imaginary residue {resid:.2e}")
        return anchor_low_faces(comp, axes=(2,))

    f13 = offdiag_from_lambda(1, y2)
    # u3 is overdetermined; integrating both gradient components and
    # averaging suppresses the accumulated drift of either path
    u3_a = _integrate_detrended(f13 - np.gradient(u1, dx, axis=2), dx, axis=0)
    u3_b = _integrate_detrended(
        offdiag_from_lambda(2, y1) - np.gradient(u2, dx, axis=2), dx, axis=1)
    u3 = 0.5 * (u3_a + u3_b)
    f33 = 2.0 * np.gradient(u3, dx, axis=2)
    f23 = np.gradient(u2, dx, axis=2) + np.gradient(u3, dx, axis=1)

    boundary = max(np.abs(u1[-1]).max(), np.abs(u2[:, -1]).max(), np.abs(u3[-1]).max())
    interior = max(np.abs(u1).max(), np.abs(u2).max(), np.abs(u3).max())
    if interior > 0 and boundary > 1e-2 * interior:
        notes.append(
            f"displacement does not decay at the high faces "
            f"(ratio {boundary / interior:.2e}); integration anchors may bias it")

    vals = np.empty(grid.shape + (6,))
    for (i, j), comp in (((1, 1), f11), ((1, 2), f12), ((1, 3), f13),
                         ((2, 2), f22), ((2, 3), f23), ((3, 3), f33)):
        vals[..., COMPONENT_INDEX[(i, j)]] = comp
    u = np.stack([u1, u2, u3], axis=-1)
    return TwoAxisPotentialResult(u, SymTensorField3(grid, vals), notes)


# Conditioning cutoff of the alternative diagonal route: the substitution
# divides by 2 y_i^2, so assembly error is amplified by (|y| / y_i)^2 near
# the i-th coordinate plane.  Bins with |y_i| < COND_FRACTION * |y| are
# treated as undetermined by this route and excluded (their constant-along-
# axis part is restored by anchoring).
COND_FRACTION = 0.5


def _determined_mask(grid: VoxelGrid3, axis: int, cond_fraction: float) -> np.ndarray:
    y1, y2, y3 = _freq_mesh(grid)
    r2 = y1**2 + y2**2 + y3**2
    yk = (y1, y2, y3)[axis - 1]
    return np.broadcast_to(yk**2 >= cond_fraction**2 * r2, grid.shape)


def project_determined_diagonals(comps, grid: VoxelGrid3, pad_factor: int = 2,
                                 cond_fraction: float = COND_FRACTION):
    """Project (f11, f22, f33) voxel arrays onto the frequency region where
    the alternative diagonal route is determined.  Apply to a reference
    triple before comparing it against the stabilised alternative fields."""
    padded = grid.padded(pad_factor)
    off = grid.pad_offset(pad_factor)
    sl = slice(off, off + grid.n)
    out = []
    for axis, comp in zip((1, 2, 3), comps):
        padv = np.zeros(padded.shape)
        padv[sl, sl, sl] = comp
        spec = dft3(padv, padded).values
        spec[~_determined_mask(padded, axis, cond_fraction)] = 0.0
        proj, _ = _spectrum_to_component(SpectralField(padded, spec), grid, pad_factor)
        out.append(anchor_low_faces(proj))
    return tuple(out)


def recover_diagonals_alternative_fields(data: TrtDataSet, pad_factor: int = 2,
                                         cond_fraction: float = COND_FRACTION):
    """Voxel-space diagonals via the J2 route: assemble, solve per frequency,
    restrict to the determined region, transform, anchor.

    Compare against ``project_determined_diagonals`` of the FBP diagonals;
    the discrepancy acts as a data-consistency figure."""
    lam = assemble_lambda_triple(data, pad_factor)
    mu = assemble_mu_triple(data, pad_factor)
    specs = recover_diagonals_alternative(lam, mu)
    padded = specs[0].grid
    masked = []
    for axis, spec in zip((1, 2, 3), specs):
        vals = np.where(_determined_mask(padded, axis, cond_fraction), spec.values, 0.0)
        masked.append(SpectralField(padded, vals))
    return tuple(spectra_to_components(masked, data.recon_grid, pad_factor,
                                       what="alt diagonal"))


def consistency_residual(diag_fbp, diag_alt) -> dict:
    """Relative L2 discrepancy between the two diagonal routes, per component
    and aggregate.  Denominator is the larger of the two norms, so a zeroed
    input scores 1 against a nonzero reference."""
    report = {}
    names = ("f11", "f22", "f33")
    num2 = 0.0
    den2 = 0.0
    for name, a, b in zip(names, diag_fbp, diag_alt):
        a = np.asarray(a, dtype=float)
        b = np.asarray(b, dtype=float)
        diff = float(np.linalg.norm(a - b))
        ref = max(float(np.linalg.norm(a)), float(np.linalg.norm(b)))
        report[name] = diff / ref if ref > 0 else 0.0
        num2 += diff**2
        den2 += ref**2
    report["aggregate"] = float(np.sqrt(num2 / den2)) if den2 > 0 else 0.0
    return report
