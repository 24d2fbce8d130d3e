"""Discrete Fourier machinery: 3D transforms on grid data, transverse ramp
multipliers, the band-limited ramp filter for sinogram rows, and the
Hamming-regularised derivative along the detector offset coordinate.

All transforms are unitary ("ortho" normalisation).  Frequencies are angular:
DFT index k maps to 2*pi*k_alias / (n * voxel_size) with the signed alias in
[-n/2, n/2).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import VoxelGrid3


def angular_freqs(n: int, step: float) -> np.ndarray:
    """Signed angular frequencies of an n-point DFT with sample spacing step."""
    return 2.0 * np.pi * np.fft.fftfreq(n, d=step)


@dataclass
class SpectralField:
    """Complex scalar component on the 3D DFT lattice of a cubic grid."""

    grid: VoxelGrid3
    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=complex)
        if self.values.shape != self.grid.shape:
            raise ValueError(
                f"spectral values shape {self.values.shape} does not match grid "
                f"{self.grid.shape}")

    def freqs(self) -> np.ndarray:
        return angular_freqs(self.grid.n, self.grid.voxel_size)

    def freq_mesh(self):
        """Broadcastable (Y1, Y2, Y3) angular frequency arrays."""
        f = self.freqs()
        return (f[:, None, None], f[None, :, None], f[None, None, :])

    def hermitian_residual(self) -> float:
        """max |F(-k) - conj(F(k))|, zero for transforms of real data."""
        flipped = self.values[
            np.ix_(*(np.r_[0, self.grid.n - 1:0:-1] for _ in range(3)))]
        return float(np.abs(flipped - np.conj(self.values)).max())


def dft3(values: np.ndarray, grid: VoxelGrid3) -> SpectralField:
    """Unitary 3D DFT of one scalar component sampled on the grid."""
    values = np.asarray(values)
    if values.shape != grid.shape:
        raise ValueError(f"component shape {values.shape} does not match grid {grid.shape}")
    return SpectralField(grid, np.fft.fftn(values, norm="ortho"))


def idft3(spec: SpectralField) -> np.ndarray:
    """Unitary inverse 3D DFT; complex output (real part is the field for
    Hermitian-symmetric spectra)."""
    return np.fft.ifftn(spec.values, norm="ortho")


def transverse_freq_magnitude(grid: VoxelGrid3, axis: int) -> np.ndarray:
    """|Pi_eta y| on the DFT lattice: magnitude of the frequency component
    orthogonal to the given grid axis, shape (n, n, n)."""
    f = angular_freqs(grid.n, grid.voxel_size)
    zero = np.zeros_like(f)
    comps = [zero, zero, zero]
    for k in range(3):
        if k != axis - 1:
            comps[k] = f
    return np.sqrt(comps[0][:, None, None] ** 2
                   + comps[1][None, :, None] ** 2
                   + comps[2][None, None, :] ** 2)


def ramp_multiplier(spec: SpectralField, axis: int, power: int) -> SpectralField:
    """Multiply each bin by |Pi_eta y|^power (power 1 or 3).

    Bins on the axial frequency line (both transverse components zero),
    including the zero-frequency bin, map to zero.
    """
    if power not in (1, 3):
        raise ValueError(f"ramp power must be 1 or 3, got {power!r}")
    r = transverse_freq_magnitude(spec.grid, axis)
    return SpectralField(spec.grid, spec.values * r**power)


def ramp_filter_sinogram(rows: np.ndarray, step: float, axis: int = -1,
                         pad_factor: int = 2) -> np.ndarray:
    """Band-limited ramp filter (|frequency| multiplier) applied to uniformly
    sampled rows, zero-padded to pad_factor times the length to suppress
    circular wrap-around.  Linear in the data."""
    if pad_factor < 2:
        raise ValueError("ramp filter requires zero padding of at least 2x")
    rows = np.asarray(rows, dtype=float)
    n = rows.shape[axis]
    m = pad_factor * n
    k = np.abs(angular_freqs(m, step))
    spec = np.fft.fft(rows, n=m, axis=axis)
    spec *= np.moveaxis(k.reshape((-1,) + (1,) * (rows.ndim - 1)), 0, axis)
    out = np.fft.ifft(spec, axis=axis).real
    return np.take(out, np.arange(n), axis=axis)


def hamming_window(n: int) -> np.ndarray:
    """w(m) = 0.54 - 0.46 cos(2 pi m / (n - 1)) for m = 0 .. n-1."""
    if n < 2:
        raise ValueError("window length must be >= 2")
    m = np.arange(n)
    return 0.54 - 0.46 * np.cos(2.0 * np.pi * m / (n - 1))


def _window_in_freq_order(n: int) -> np.ndarray:
    """Hamming window arranged over DFT bins in centered frequency order, so
    the peak sits at zero frequency and attenuation grows toward Nyquist."""
    w = hamming_window(n)
    alias = np.rint(np.fft.fftfreq(n) * n).astype(int)
    return w[alias + n // 2]


def hamming_derivative(rows: np.ndarray, step: float, axis: int = -1) -> np.ndarray:
    """Regularised d/dp: DFT, multiply by (i * frequency * window), inverse
    DFT, real part.  The Nyquist bin of even lengths is zeroed to keep the
    multiplier conjugate-symmetric."""
    rows = np.asarray(rows, dtype=float)
    n = rows.shape[axis]
    if n < 2:
        raise ValueError("signal too short to differentiate")
    mult = 1j * angular_freqs(n, step) * _window_in_freq_order(n)
    if n % 2 == 0:
        mult[n // 2] = 0.0
    spec = np.fft.fft(rows, axis=axis)
    spec *= np.moveaxis(mult.reshape((-1,) + (1,) * (rows.ndim - 1)), 0, axis)
    return np.fft.ifft(spec, axis=axis).real
