"""Radix-2 FFT, real-input packing and windowed power spectra.

Run: python3 demos/01_spectrum.py
"""
import numpy as np

from riccati_phoneme import Block, WindowKind, fft_radix2, power_spectrum, real_fft_packed

rng = np.random.default_rng(0)

# The transform agrees with numpy's reference FFT to round-off.
x = rng.normal(size=512) + 1j * rng.normal(size=512)
print("complex FFT error vs numpy:", np.abs(fft_radix2(x) - np.fft.fft(x)).max())

# A real block of 512 samples packs into one 256-point complex transform
# and unpacks to bins 0..256.
real = rng.normal(size=512)
packed = real_fft_packed(real)
print("packed bins:", packed.shape, "error vs rfft:", np.abs(packed - np.fft.rfft(real)).max())

# Leakage: a 1010 Hz tone at 16 kHz sits between bins 32 and 33.
t = np.arange(512) / 16000
block = Block(np.sin(2 * np.pi * 1010 * t), rate=16000)
for kind in WindowKind:
    ps = power_spectrum(block, kind)
    peak = int(np.argmax(ps.bins))
    far = ps.bins[peak + 20] / ps.bins[peak]
    print(f"{kind.value:8s} peak at {ps.frequencies[peak]:7.1f} Hz, "
          f"power 20 bins away relative to peak: {far:.1e}")
