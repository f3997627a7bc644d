"""From a synthetic vowel to a 15-channel pattern vector.

Run: python3 demos/02_features.py
"""
import numpy as np

from riccati_phoneme import default_band_plan, extract_pattern, synth_vowel
from riccati_phoneme.features import DEFAULT_GAMMA, low_band
from riccati_phoneme.signal_io import vowel_specs

plan = default_band_plan()
print("channel edges (Hz):", np.round(plan.edges).astype(int).tolist())

specs = vowel_specs()
patterns = {}
for label, spec in specs.items():
    sig = synth_vowel(spec, rate=16000, seed=1)
    rect = extract_pattern(sig, window="rect")
    hann = extract_pattern(sig, window="hanning")
    patterns[label] = rect
    print(f"/{label}/ f0={spec.f0:.0f} Hz  strongest channel {int(np.argmax(rect)):2d}  "
          f"min component {rect.min():.1e} (floor {DEFAULT_GAMMA:g})  "
          f"rect vs Hanning below 3 kHz: {np.linalg.norm(low_band(rect) - low_band(hann)):.3f}")

print("\npairwise distances between vowel patterns:")
labels = list(patterns)
for a in labels:
    print(" ".join(f"{np.linalg.norm(patterns[a] - patterns[b]):5.2f}" for b in labels), f" /{a}/")
