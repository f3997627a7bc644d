"""Voronoi partition of labeled patterns and nearest-central recognition."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

import numpy as np

from .errors import EmptyAtom, EmptyInput, SingleClass, UnassignableNeuron
from .riccati_net import Network, winner


def pairwise_distances(X: np.ndarray) -> np.ndarray:
    X = np.asarray(X, dtype=float)
    return np.linalg.norm(X[:, None, :] - X[None, :, :], axis=-1)


def central_vector(members) -> tuple[np.ndarray, float]:
    """Medoid of ``members`` and the largest member distance from it.

    The medoid is the member with the smallest summed Euclidean distance to
    all members; ties go to the lowest index.
    """
    X = np.atleast_2d(np.asarray(members, dtype=float))
    if X.shape[0] == 0 or X.size == 0:
        raise EmptyAtom("an atom needs at least one member")
    D = pairwise_distances(X)
    k = int(np.argmin(D.sum(axis=1)))
    return X[k].copy(), float(D[k].max())


@dataclass(frozen=True)
class PhonemeAtom:
    label: str
    members: np.ndarray
    central: np.ndarray
    radius: float

    def to_dict(self) -> dict:
        return {
            "label": self.label,
            "central": self.central.tolist(),
            "radius": self.radius,
            "members": self.members.tolist(),
        }


@dataclass(frozen=True)
class RecognitionResult:
    """Outcome of recognising one pattern.

    ``atom_index`` names the matched atom when ``recognized`` is true and
    the nearest atom otherwise; ``label`` is ``None`` when unrecognised.
    """

    recognized: bool
    rho: float
    atom_index: int
    label: Optional[str] = None

    def to_dict(self) -> dict:
        return {
            "recognized": self.recognized,
            "label": self.label,
            "rho": self.rho,
            "atom_index": self.atom_index,
        }


@dataclass(frozen=True)
class SeparationReport:
    delta: float
    gamma: float
    threshold: float
    max_radius: float
    ok: bool
    overlap: bool

    @property
    def verdict(self) -> str:
        return "satisfied" if self.ok else "violated"


@dataclass(frozen=True)
class VoronoiPartition:
    atoms: tuple
    delta: float

    @property
    def labels(self) -> list:
        return [a.label for a in self.atoms]

    @property
    def centrals(self) -> np.ndarray:
        return np.array([a.central for a in self.atoms])

    @property
    def radii(self) -> np.ndarray:
        return np.array([a.radius for a in self.atoms])

    def to_dict(self) -> dict:
        return {"atoms": [a.to_dict() for a in self.atoms], "delta": self.delta}

    @classmethod
    def from_dict(cls, obj: dict) -> "VoronoiPartition":
        atoms = tuple(
            PhonemeAtom(
                a["label"],
                np.array(a["members"], dtype=float),
                np.array(a["central"], dtype=float),
                float(a["radius"]),
            )
            for a in obj["atoms"]
        )
        return cls(atoms, float(obj["delta"]))


def build_partition(labeled: Iterable[tuple[Sequence[float], str]]) -> VoronoiPartition:
    """One atom per label (in order of first appearance) and the minimum
    separation ``delta`` between their central vectors."""
    groups: dict[str, list] = {}
    for x, label in labeled:
        groups.setdefault(label, []).append(np.asarray(x, dtype=float))
    if not groups:
        raise EmptyInput("no labeled patterns")
    if len(groups) < 2:
        raise SingleClass("the separation delta needs at least two classes")
    atoms = []
    for label, members in groups.items():
        central, radius = central_vector(members)
        atoms.append(PhonemeAtom(label, np.array(members), central, radius))
    D = pairwise_distances([a.central for a in atoms])
    delta = float(D[np.triu_indices(len(atoms), k=1)].min())
    return VoronoiPartition(tuple(atoms), delta)


def check_separation(partition: VoronoiPartition, gamma: float) -> SeparationReport:
    """Compare the atoms' fluctuation scale against the ``gamma / 8`` budget.

    The largest atom radius stands in for the perturbation bound. ``overlap``
    flags a radius reaching the inter-central separation, where training
    data of different classes superpose.
    """
    if not gamma > 0:
        raise ValueError(f"gamma must be positive, got {gamma}")
    threshold = gamma / 8.0
    max_radius = float(partition.radii.max())
    return SeparationReport(
        delta=partition.delta,
        gamma=gamma,
        threshold=threshold,
        max_radius=max_radius,
        ok=max_radius < threshold,
        overlap=max_radius >= partition.delta,
    )


def _nearest_central(partition: VoronoiPartition, v) -> tuple[int, float]:
    d = np.linalg.norm(partition.centrals - np.asarray(v, dtype=float), axis=1)
    k = int(np.argmin(d))
    return k, float(d[k])


def recognize(partition: VoronoiPartition, x) -> RecognitionResult:
    k, rho = _nearest_central(partition, x)
    atom = partition.atoms[k]
    if rho <= atom.radius:
        return RecognitionResult(True, rho, k, atom.label)
    return RecognitionResult(False, rho, k)


def assign_neuron(partition: VoronoiPartition, weights) -> int:
    """Atom whose central lies within ``delta / 2`` of ``weights``."""
    k, d = _nearest_central(partition, weights)
    if d > partition.delta / 2:
        raise UnassignableNeuron(
            f"weights are {d:.3g} from the nearest central, beyond delta/2={partition.delta / 2:.3g}"
        )
    return k


def recognize_via_network(network: Network, partition: VoronoiPartition, x) -> RecognitionResult:
    """Recognition through the winning neuron.

    Weights are first divided by ``sqrt(alpha/beta)`` so that a converged
    neuron sits on the unit sphere next to its central vector. The winner's
    atom is the one whose cell holds those weights, and the pattern is
    accepted iff its distance to the weights is within the atom radius.
    """
    weights = network.weights / network.config.scale
    i, rho = winner(weights, x)
    k = assign_neuron(partition, weights[i])
    atom = partition.atoms[k]
    if rho <= atom.radius:
        return RecognitionResult(True, rho, k, atom.label)
    return RecognitionResult(False, rho, k)
