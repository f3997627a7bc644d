"""Radix-2 FFT, real-input packing, time windows and block power spectra.

Convention: forward transform ``X[j] = sum_k x[k] exp(-2j*pi*j*k/K)`` with
no normalisation; power is ``|X|**2 / 512``.

All transforms operate along the last axis, so a stack of blocks can be
transformed in one call.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

from .errors import EmptyInput, MismatchedShape, NotPowerOfTwo
from .signal_io import BLOCK_SIZE, Block


def _check_pow2(n: int) -> int:
    if n < 1 or n & (n - 1):
        raise NotPowerOfTwo(f"length {n} is not a power of two")
    return n.bit_length() - 1


@lru_cache(maxsize=None)
def _bit_reversal(n: int) -> np.ndarray:
    bits = _check_pow2(n)
    idx = np.arange(n)
    rev = np.zeros(n, dtype=np.intp)
    for b in range(bits):
        rev |= ((idx >> b) & 1) << (bits - 1 - b)
    rev.flags.writeable = False
    return rev


@lru_cache(maxsize=None)
def _twiddles(n: int) -> np.ndarray:
    w = np.exp(-2j * np.pi * np.arange(n // 2) / n)
    w.flags.writeable = False
    return w


def fft_radix2(x) -> np.ndarray:
    """Iterative decimation-in-time Cooley-Tukey FFT.

    Parameters
    ----------
    x : array_like
        Complex (or real) data; the last axis must have power-of-two length.

    Returns
    -------
    ndarray of complex128, same shape as ``x``.
    """
    x = np.asarray(x, dtype=complex)
    n = x.shape[-1]
    _check_pow2(n)
    lead = x.shape[:-1]
    a = x[..., _bit_reversal(n)]
    w = _twiddles(n)
    m = 2
    while m <= n:
        half = m // 2
        tw = w[:: n // m]
        a = a.reshape(lead + (n // m, m))
        even = a[..., :half]
        odd = a[..., half:] * tw
        a = np.concatenate((even + odd, even - odd), axis=-1)
        m *= 2
    return a.reshape(lead + (n,))


def ifft_radix2(X) -> np.ndarray:
    """Inverse transform via conjugate, forward FFT, conjugate, divide by K."""
    X = np.asarray(X, dtype=complex)
    return np.conj(fft_radix2(np.conj(X))) / X.shape[-1]


def real_fft_packed(data) -> np.ndarray:
    """Spectrum bins ``0..K`` of ``2K`` real samples using one length-K FFT.

    Even samples go to the real part and odd samples to the imaginary part
    of a complex sequence; the two half-length spectra are separated with
    the conjugate-symmetry relation and recombined with one butterfly.
    """
    x = np.asarray(data, dtype=float)
    n = x.shape[-1]
    _check_pow2(n)
    if n < 2:
        raise NotPowerOfTwo("real packing needs at least 2 samples")
    k = n // 2
    z = x[..., 0::2] + 1j * x[..., 1::2]
    Z = fft_radix2(z)
    j = np.arange(k + 1)
    Zj = Z[..., j % k]
    Zc = np.conj(Z[..., (k - j) % k])
    even = 0.5 * (Zj + Zc)
    odd = -0.5j * (Zj - Zc)
    return even + np.exp(-1j * np.pi * j / k) * odd


# --------------------------------------------------------------------------
# windows

class WindowKind(str, enum.Enum):
    RECTANGULAR = "rect"
    HANNING = "hanning"
    WELCH = "welch"
    PARZEN = "parzen"

    @classmethod
    def parse(cls, value) -> "WindowKind":
        if isinstance(value, cls):
            return value
        aliases = {"rectangular": "rect", "hann": "hanning"}
        return cls(aliases.get(str(value).lower(), str(value).lower()))


@lru_cache(maxsize=None)
def window_weights(kind: WindowKind, length: int = BLOCK_SIZE) -> np.ndarray:
    """Weights of a symmetric window over indices ``0..length-1``."""
    kind = WindowKind.parse(kind)
    L = length
    n = np.arange(L, dtype=float)
    if kind is WindowKind.RECTANGULAR:
        w = np.ones(L)
    elif kind is WindowKind.HANNING:
        w = 0.5 * (1.0 - np.cos(2 * np.pi * n / (L - 1)))
    elif kind is WindowKind.WELCH:
        c = (L - 1) / 2.0
        w = 1.0 - ((n - c) / c) ** 2
    else:
        # piecewise cubic (de la Vallee Poussin), half-width L/2
        r = np.abs(n - (L - 1) / 2.0)
        a = r / (L / 2.0)
        w = np.where(r <= (L - 1) / 4.0, 1 - 6 * a**2 + 6 * a**3, 2 * (1 - a) ** 3)
    w.flags.writeable = False
    return w


def apply_window(block: Block, kind=WindowKind.RECTANGULAR) -> Block:
    kind = WindowKind.parse(kind)
    if kind is WindowKind.RECTANGULAR:
        return block
    return Block(block.data * window_weights(kind, BLOCK_SIZE), block.start_index, block.rate)


# --------------------------------------------------------------------------
# power spectra

@dataclass(frozen=True)
class PowerSpectrum:
    """One-sided power spectrum of a 512-sample block (257 bins)."""

    bins: np.ndarray
    bin_width: float

    def __post_init__(self):
        object.__setattr__(self, "bins", np.asarray(self.bins, dtype=float))

    @property
    def frequencies(self) -> np.ndarray:
        return np.arange(self.bins.size) * self.bin_width

    @property
    def nyquist(self) -> float:
        return (self.bins.size - 1) * self.bin_width


def power_spectrum(block: Block, kind=WindowKind.RECTANGULAR) -> PowerSpectrum:
    X = real_fft_packed(apply_window(block, kind).data)
    return PowerSpectrum(np.abs(X) ** 2 / BLOCK_SIZE, block.rate / BLOCK_SIZE)


def power_spectra(blocks: Iterable[Block], kind=WindowKind.RECTANGULAR) -> list[PowerSpectrum]:
    """Batched :func:`power_spectrum`: one stacked FFT for all blocks."""
    blocks = list(blocks)
    if not blocks:
        return []
    w = window_weights(WindowKind.parse(kind), BLOCK_SIZE)
    stack = np.stack([b.data for b in blocks]) * w
    power = np.abs(real_fft_packed(stack)) ** 2 / BLOCK_SIZE
    return [PowerSpectrum(p, b.rate / BLOCK_SIZE) for p, b in zip(power, blocks)]


def average_spectra(frames: Sequence[PowerSpectrum]) -> PowerSpectrum:
    """Element-wise mean of spectra sharing bin count and bin width."""
    frames = list(frames)
    if not frames:
        raise EmptyInput("no spectra to average")
    first = frames[0]
    for f in frames[1:]:
        if f.bins.shape != first.bins.shape or f.bin_width != first.bin_width:
            raise MismatchedShape("spectra differ in bin count or bin width")
    return PowerSpectrum(np.mean([f.bins for f in frames], axis=0), first.bin_width)
