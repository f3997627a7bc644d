"""Band energies and unit-norm pattern vectors.

The 200-5000 Hz range is tiled exactly: twelve channels from 200 to
3000 Hz and three from 3000 to 5000 Hz. Energy below 200 Hz is dropped.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .errors import EmptyChannel, SpectrumTooNarrow, ZeroVector
from .signal_io import DEFAULT_STRIDE, Signal, block_stream
from .spectrum import PowerSpectrum, WindowKind, average_spectra, power_spectra

logger = logging.getLogger(__name__)

N_CHANNELS = 15
LOW_CHANNELS = 12
DEFAULT_GAMMA = 0.9e-4


@dataclass(frozen=True)
class BandPlan:
    edges: np.ndarray

    def __post_init__(self):
        edges = np.asarray(self.edges, dtype=float)
        if edges.ndim != 1 or edges.size < 2 or np.any(np.diff(edges) <= 0):
            raise ValueError("band edges must be strictly ascending")
        object.__setattr__(self, "edges", edges)

    @property
    def n_channels(self) -> int:
        return self.edges.size - 1

    def channel_of(self, freq):
        """Channel index of each frequency, or -1 outside ``[edges[0], edges[-1])``."""
        freq = np.asarray(freq, dtype=float)
        idx = np.searchsorted(self.edges, freq, side="right") - 1
        return np.where((freq >= self.edges[0]) & (freq < self.edges[-1]), idx, -1)


def default_band_plan() -> BandPlan:
    low = (2400.0 + 2800.0 * np.arange(13)) / 12
    high = (9000.0 + 2000.0 * np.arange(1, 4)) / 3
    return BandPlan(np.concatenate((low, high)))


def band_energies(spectrum: PowerSpectrum, plan: BandPlan | None = None) -> np.ndarray:
    """Mean power of the bins whose centre falls in each channel."""
    plan = plan or default_band_plan()
    if not spectrum.bin_width > 0:
        raise ValueError("bin width must be positive")
    if spectrum.nyquist < plan.edges[-1]:
        raise SpectrumTooNarrow(
            f"Nyquist {spectrum.nyquist} Hz is below the top band edge {plan.edges[-1]} Hz"
        )
    chan = plan.channel_of(spectrum.frequencies)
    inside = chan >= 0
    counts = np.bincount(chan[inside], minlength=plan.n_channels)
    if np.any(counts == 0):
        raise EmptyChannel(f"channels {np.flatnonzero(counts == 0).tolist()} contain no bins")
    sums = np.bincount(chan[inside], weights=spectrum.bins[inside], minlength=plan.n_channels)
    return sums / counts


def normalize_unit(v) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    norm = np.linalg.norm(v)
    if norm == 0:
        raise ZeroVector("cannot normalise the zero vector")
    return v / norm


def gamma_floor(pattern, gamma: float = DEFAULT_GAMMA) -> bool:
    """True iff every component is at least ``gamma`` (inclusive)."""
    if not gamma > 0:
        raise ValueError(f"gamma must be positive, got {gamma}")
    return bool(np.all(np.asarray(pattern) >= gamma))


def segment_spectrum(signal: Signal, segment=None, window=WindowKind.RECTANGULAR,
                     stride: int = DEFAULT_STRIDE) -> PowerSpectrum:
    """Average power spectrum over all blocks of ``signal[start:stop]``."""
    if segment is not None:
        signal = signal.segment(*segment)
    blocks = block_stream(signal, stride)
    return average_spectra(power_spectra(blocks, window))


def extract_pattern(signal: Signal, segment=None, window=WindowKind.RECTANGULAR,
                    stride: int = DEFAULT_STRIDE, plan: BandPlan | None = None) -> np.ndarray:
    """Full pipeline: blocks, window, power spectra, average, bands, normalise.

    Parameters
    ----------
    signal : Signal
    segment : (start, stop), optional
        Sample range to analyse; the whole signal by default.
    window : WindowKind or str
    stride : int
        Hop between consecutive 512-sample blocks.

    Returns
    -------
    ndarray, shape (15,)
        Nonnegative pattern with unit Euclidean norm.
    """
    spectrum = segment_spectrum(signal, segment, window, stride)
    return normalize_unit(band_energies(spectrum, plan))


def low_band(pattern) -> np.ndarray:
    """Components of the channels below 3 kHz."""
    return np.asarray(pattern)[..., :LOW_CHANNELS]
