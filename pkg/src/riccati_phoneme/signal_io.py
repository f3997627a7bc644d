"""Audio ingestion, synthetic vowel generation and block slicing.

Signals are kept as float64 arrays scaled to [-1, 1]. WAV support is
deliberately narrow: mono, 16-bit little-endian PCM.
"""

from __future__ import annotations

import json
import wave
from dataclasses import dataclass
from pathlib import Path
from typing import Iterator, Sequence

import numpy as np

from .errors import (
    InvalidSpec,
    MalformedHeader,
    ManifestError,
    RateTooLow,
    SignalTooShort,
    UnsupportedFormat,
)

BLOCK_SIZE = 512
MIN_RATE = 10_000
DEFAULT_RATE = 16_000
DEFAULT_STRIDE = 256
DEFAULT_NOISE_FLOOR = 0.01
PEAK_LEVEL = 0.9


@dataclass(frozen=True)
class Signal:
    """A sampled waveform.

    Parameters
    ----------
    samples : ndarray
        Real amplitudes in [-1, 1].
    rate : int
        Sample rate in Hz. Must be at least 10 kHz so the 5 kHz analysis
        ceiling stays below Nyquist.
    """

    samples: np.ndarray
    rate: int

    def __post_init__(self):
        samples = np.asarray(self.samples, dtype=float)
        if samples.ndim != 1:
            raise ValueError("samples must be one-dimensional")
        if not np.all(np.isfinite(samples)):
            raise ValueError("samples contain NaN or Inf")
        if self.rate < MIN_RATE:
            raise RateTooLow(f"rate {self.rate} Hz < {MIN_RATE} Hz")
        object.__setattr__(self, "samples", samples)

    def __len__(self):
        return len(self.samples)

    @property
    def duration(self) -> float:
        return len(self.samples) / self.rate

    def segment(self, start: int, stop: int | None = None) -> "Signal":
        return Signal(self.samples[start:stop], self.rate)


@dataclass(frozen=True)
class VowelSpec:
    """Parameters of a stationary harmonic vowel.

    ``harmonic_amps[h]`` is the amplitude of the sinusoid at ``(h + 1) * f0``.
    """

    f0: float
    harmonic_amps: Sequence[float]
    noise_floor: float = DEFAULT_NOISE_FLOOR
    duration: float = 0.25

    def validate(self, rate: int) -> None:
        amps = np.asarray(self.harmonic_amps, dtype=float)
        if not self.f0 > 0:
            raise InvalidSpec(f"f0 must be positive, got {self.f0}")
        if amps.ndim != 1 or amps.size == 0:
            raise InvalidSpec("harmonic_amps must be a nonempty sequence")
        if np.any(amps < 0) or self.noise_floor < 0:
            raise InvalidSpec("amplitudes must be nonnegative")
        if not self.duration > 0:
            raise InvalidSpec(f"duration must be positive, got {self.duration}")
        if self.f0 * amps.size >= rate / 2:
            raise InvalidSpec(
                f"highest harmonic {self.f0 * amps.size} Hz is not below Nyquist {rate / 2} Hz"
            )


@dataclass(frozen=True)
class Block:
    """One analysis window of exactly ``BLOCK_SIZE`` samples."""

    data: np.ndarray
    start_index: int = 0
    rate: int = DEFAULT_RATE

    def __post_init__(self):
        data = np.asarray(self.data, dtype=float)
        if data.shape != (BLOCK_SIZE,):
            raise ValueError(f"a block holds exactly {BLOCK_SIZE} samples, got shape {data.shape}")
        object.__setattr__(self, "data", data)


# --------------------------------------------------------------------------
# WAV

def read_wav(path) -> Signal:
    """Read a mono 16-bit PCM WAV file into a :class:`Signal`."""
    path = Path(path)
    with open(path, "rb") as fh:
        head = fh.read(12)
    if len(head) < 12 or head[:4] != b"RIFF" or head[8:12] != b"WAVE":
        raise MalformedHeader(f"{path}: not a RIFF/WAVE file")
    try:
        with wave.open(str(path), "rb") as wf:
            channels = wf.getnchannels()
            width = wf.getsampwidth()
            rate = wf.getframerate()
            raw = wf.readframes(wf.getnframes())
    except wave.Error as exc:
        if "unknown format" in str(exc):
            raise UnsupportedFormat(f"{path}: {exc}") from exc
        raise MalformedHeader(f"{path}: {exc}") from exc
    except EOFError as exc:
        raise MalformedHeader(f"{path}: truncated file") from exc
    if channels != 1:
        raise UnsupportedFormat(f"{path}: {channels} channels, only mono is supported")
    if width != 2:
        raise UnsupportedFormat(f"{path}: {8 * width}-bit samples, only 16-bit is supported")
    if rate < MIN_RATE:
        raise RateTooLow(f"{path}: rate {rate} Hz < {MIN_RATE} Hz")
    pcm = np.frombuffer(raw, dtype="<i2")
    return Signal(pcm.astype(float) / 32768.0, rate)


def write_wav(path, signal: Signal) -> None:
    """Write ``signal`` as mono 16-bit PCM, clipping to the int16 range."""
    pcm = np.clip(np.round(signal.samples * 32768.0), -32768, 32767).astype("<i2")
    with wave.open(str(path), "wb") as wf:
        wf.setnchannels(1)
        wf.setsampwidth(2)
        wf.setframerate(int(signal.rate))
        wf.writeframes(pcm.tobytes())


# --------------------------------------------------------------------------
# synthesis

def synth_vowel(spec: VowelSpec, rate: int = DEFAULT_RATE, seed: int = 0) -> Signal:
    """Additive harmonic vowel plus uniform white noise.

    Phases and noise both come from ``seed``, so equal arguments give a
    bit-identical signal. The result is peak-normalised to 0.9 unless it
    is identically zero.
    """
    spec.validate(rate)
    amps = np.asarray(spec.harmonic_amps, dtype=float)
    n = int(round(spec.duration * rate))
    rng = np.random.default_rng(seed)
    phases = rng.uniform(0.0, 2 * np.pi, size=amps.size)
    noise = rng.uniform(-1.0, 1.0, size=n)

    t = np.arange(n) / rate
    harmonics = np.arange(1, amps.size + 1)
    x = np.zeros(n)
    for h, a, phi in zip(harmonics, amps, phases):
        if a > 0:
            x += a * np.sin(2 * np.pi * h * spec.f0 * t + phi)
    x += spec.noise_floor * noise

    peak = np.max(np.abs(x)) if n else 0.0
    if peak > 0:
        x *= PEAK_LEVEL / peak
    return Signal(x, rate)


def formant_harmonics(f0, formants, weights=None, bandwidth=120.0, fmax=5000.0, floor=0.05):
    """Harmonic amplitudes shaped by a sum of resonance peaks.

    Each harmonic ``h * f0 <= fmax`` gets the envelope value at its
    frequency. ``weights`` scales each resonance (default ``0.7**k``);
    ``floor`` keeps every harmonic audible so no band energy collapses
    towards zero.
    """
    formants = np.asarray(formants, dtype=float)
    if weights is None:
        weights = 0.7 ** np.arange(formants.size)
    n_harm = int(np.floor(fmax / f0))
    f = float(f0) * np.arange(1, n_harm + 1)
    envelope = np.zeros_like(f)
    for fc, w in zip(formants, weights):
        envelope += w / np.sqrt(1.0 + ((f - fc) / (bandwidth / 2.0)) ** 2)
    return (envelope / envelope.max() + floor).tolist()


# One dominant resonance per vowel, each in its own analysis channel and
# clear of channel edges, so the classes are well separated as patterns.
# /u/ is left out, as in the small human corpus this stands in for.
DEFAULT_VOWELS = {
    "a": dict(f0=200.0, formants=(1000.0, 2400.0), weights=(1.0, 0.4)),
    "e": dict(f0=280.0, formants=(560.0, 1960.0, 2240.0), weights=(0.3, 1.0, 0.3)),
    "i": dict(f0=380.0, formants=(380.0, 2660.0, 3420.0), weights=(0.3, 1.0, 0.5)),
    "o": dict(f0=520.0, formants=(520.0, 1040.0, 2600.0), weights=(1.0, 0.3, 0.1)),
}


@dataclass(frozen=True)
class ManifestEntry:
    label: str
    spec: VowelSpec
    seed: int

    def to_json(self) -> dict:
        return {
            "label": self.label,
            "f0": self.spec.f0,
            "harmonic_amps": list(self.spec.harmonic_amps),
            "noise_floor": self.spec.noise_floor,
            "duration": self.spec.duration,
            "seed": self.seed,
        }


def vowel_specs(noise_floor: float = DEFAULT_NOISE_FLOOR, duration: float = 0.25) -> dict[str, VowelSpec]:
    return {
        label: VowelSpec(
            f0=v["f0"],
            harmonic_amps=formant_harmonics(v["f0"], v["formants"], v["weights"]),
            noise_floor=noise_floor,
            duration=duration,
        )
        for label, v in DEFAULT_VOWELS.items()
    }


def default_corpus(per_class: int = 40, seed: int = 0, noise_floor: float = DEFAULT_NOISE_FLOOR,
                   duration: float = 0.25) -> list[ManifestEntry]:
    """Interleaved utterances of the four default vowels.

    Utterance ``j`` of every class uses seed ``seed * 100_003 + j * 17 + class``;
    different ``seed`` values yield disjoint held-out sets of the same specs.
    """
    specs = vowel_specs(noise_floor, duration)
    entries = []
    for j in range(per_class):
        for c, (label, spec) in enumerate(specs.items()):
            entries.append(ManifestEntry(label, spec, seed * 100_003 + j * 17 + c))
    return entries


_MANIFEST_KEYS = ("label", "f0", "harmonic_amps", "noise_floor", "duration", "seed")


def parse_manifest_line(line: str, lineno: int | None = None) -> ManifestEntry:
    try:
        obj = json.loads(line)
    except json.JSONDecodeError as exc:
        raise ManifestError(f"invalid JSON ({exc.msg})", lineno) from exc
    if not isinstance(obj, dict):
        raise ManifestError("expected a JSON object", lineno)
    missing = [k for k in _MANIFEST_KEYS if k not in obj]
    if missing:
        raise ManifestError(f"missing keys {missing}", lineno)
    try:
        spec = VowelSpec(
            f0=float(obj["f0"]),
            harmonic_amps=[float(a) for a in obj["harmonic_amps"]],
            noise_floor=float(obj["noise_floor"]),
            duration=float(obj["duration"]),
        )
        return ManifestEntry(str(obj["label"]), spec, int(obj["seed"]))
    except (TypeError, ValueError) as exc:
        raise ManifestError(f"bad field value ({exc})", lineno) from exc


def read_manifest(path) -> list[ManifestEntry]:
    """Parse a JSON-lines synthesis manifest; blank lines are skipped."""
    entries = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            if line.strip():
                entries.append(parse_manifest_line(line, lineno))
    return entries


def write_manifest(path, entries: Sequence[ManifestEntry]) -> None:
    with open(path, "w") as fh:
        for e in entries:
            fh.write(json.dumps(e.to_json()) + "\n")


# --------------------------------------------------------------------------
# blocks

def block_starts(n_samples: int, stride: int) -> range:
    if stride < 1:
        raise ValueError(f"stride must be >= 1, got {stride}")
    if n_samples < BLOCK_SIZE:
        raise SignalTooShort(f"{n_samples} samples < one block of {BLOCK_SIZE}")
    return range(0, n_samples - BLOCK_SIZE + 1, stride)


def block_stream(signal: Signal, stride: int = DEFAULT_STRIDE) -> Iterator[Block]:
    """Yield every full 512-sample window starting at multiples of ``stride``.

    Raises ``SignalTooShort`` eagerly, before the first block is produced.
    """
    starts = block_starts(len(signal), stride)
    return (Block(signal.samples[s:s + BLOCK_SIZE], s, signal.rate) for s in starts)
