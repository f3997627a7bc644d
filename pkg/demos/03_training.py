"""Competitive learning and Voronoi recognition on the four-vowel corpus.

Run: python3 demos/03_training.py
"""
import numpy as np

from riccati_phoneme import (
    NetworkConfig,
    build_partition,
    default_corpus,
    extract_pattern,
    init_network,
    presentation_order,
    recognize,
    recognize_via_network,
    synth_vowel,
    train,
)


def patterns(seed, per_class=40):
    return [(extract_pattern(synth_vowel(e.spec, 16000, e.seed)), e.label)
            for e in default_corpus(per_class=per_class, seed=seed)]


train_set, heldout = patterns(0), patterns(1)

config = NetworkConfig(alpha=1.0, beta=1.0, n_neurons=8)
# Each class is presented as one sustained run, the regime the
# convergence result describes.
net = train(init_network(config), presentation_order(train_set, "grouped", epochs=10))
print("neuron labels:", net.labels)

partition = build_partition(train_set)
print(f"atoms: {partition.labels}, delta = {partition.delta:.3f}, "
      f"radii = {np.round(partition.radii, 4).tolist()}")

for name, data in (("training", train_set), ("held-out", heldout)):
    direct = np.mean([recognize(partition, x).label == y for x, y in data])
    via_net = np.mean([recognize_via_network(net, partition, x).label == y for x, y in data])
    print(f"{name:9s} accuracy: partition {direct:.1%}, network {via_net:.1%}")

# An input unlike any vowel falls outside every atom.
flat = np.full(15, 15 ** -0.5)
print("flat spectrum:", recognize(partition, flat))
