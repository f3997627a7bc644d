"""Numerical checks of the weight dynamics.

Run: python3 demos/04_theorems.py
"""
import numpy as np

from riccati_phoneme import NetworkConfig, build_partition, default_corpus, extract_pattern, synth_vowel
from riccati_phoneme.verify import (
    PerturbationSpec,
    check_gamma_criterion,
    check_theorem1,
    check_theorem5,
    stability_grid,
)

corpus = [(extract_pattern(synth_vowel(e.spec, 16000, e.seed)), e.label)
          for e in default_corpus(per_class=20)]
x_hat = corpus[0][0]

# Convergence to sqrt(alpha/beta) * x_hat at rate sqrt(alpha*beta).
rep = check_theorem1(x_hat, NetworkConfig(), steps=150)
print(f"150 Euler steps: final error {rep.final_error:.2e}, fitted rate {rep.fitted_rate:.3f} "
      f"(Euler predicts log(0.9)/0.1 = {np.log(0.9) / 0.1:.3f})")

# Bounded input perturbations give bounded weight deviations.
gamma = float(x_hat.min())
for kind in ("sinusoidal", "smoothed-noise"):
    r = check_theorem5(x_hat, PerturbationSpec(kind, amplitude=gamma / 16, seed=0), NetworkConfig())
    print(f"{kind:15s} sup deviation {r.sup_deviation:.2e} <= C*delta = "
          f"{r.C_theoretical * r.delta_used:.2e}: {r.bound_satisfied}")

grid = stability_grid(x_hat, alphas=(0.5, 1, 2), betas=(0.5, 1, 2))
print(f"stability grid: {sum(r.bound_satisfied for r in grid)}/{len(grid)} runs within the bound")

# Real class spreads dwarf gamma/8, so the separation condition fails.
print(check_gamma_criterion(build_partition(corpus), 0.9e-4))
