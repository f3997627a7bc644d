"""Winner-take-all competitive network with Riccati weight dynamics.

Each neuron ``i`` holds a weight vector ``m_i``. Learning integrates

    dm/dt = alpha * x - beta * m * <m, x>

with explicit Euler steps, applied to the winning neuron only. For a
constant unit input ``x`` the flow converges to ``sqrt(alpha/beta) * x``
at rate ``sqrt(alpha * beta)``.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field
from typing import Callable, Iterable, Optional, Sequence, Union

import numpy as np

from .errors import DimensionMismatch, Divergence, EmptyNetwork, GammaViolation
from .features import DEFAULT_GAMMA, N_CHANNELS, gamma_floor

InputFn = Callable[[float], np.ndarray]


@dataclass(frozen=True)
class NetworkConfig:
    alpha: float = 1.0
    beta: float = 1.0
    gamma: float = DEFAULT_GAMMA
    dt: float = 0.1
    n_neurons: int = 8

    def __post_init__(self):
        for name in ("alpha", "beta", "gamma", "dt"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive, got {getattr(self, name)}")
        if self.n_neurons < 1:
            raise ValueError(f"n_neurons must be >= 1, got {self.n_neurons}")

    @property
    def scale(self) -> float:
        """Norm of the fixed point for a unit input, ``sqrt(alpha/beta)``."""
        return float(np.sqrt(self.alpha / self.beta))


@dataclass
class Network:
    config: NetworkConfig
    weights: np.ndarray
    labels: list = field(default_factory=list)

    def __post_init__(self):
        self.weights = np.array(self.weights, dtype=float, ndmin=2)
        if self.weights.shape[0] != self.config.n_neurons:
            raise ValueError(
                f"{self.weights.shape[0]} weight rows for n_neurons={self.config.n_neurons}"
            )
        if not self.labels:
            self.labels = [None] * self.config.n_neurons
        if len(self.labels) != self.config.n_neurons:
            raise ValueError("one label slot per neuron required")

    def __len__(self):
        return self.weights.shape[0]

    def copy(self) -> "Network":
        return Network(self.config, self.weights.copy(), list(self.labels))

    def to_dict(self) -> dict:
        return {
            "config": asdict(self.config),
            "neurons": [
                {"m": m.tolist(), "label": label} for m, label in zip(self.weights, self.labels)
            ],
        }

    @classmethod
    def from_dict(cls, obj: dict) -> "Network":
        config = NetworkConfig(**obj["config"])
        neurons = obj["neurons"]
        return cls(config, [n["m"] for n in neurons], [n.get("label") for n in neurons])


def init_network(config: NetworkConfig, dim: int = N_CHANNELS, jitter: float = 0.0,
                 seed: Optional[int] = None) -> Network:
    """Every neuron starts at the uniform unit vector, optionally jittered.

    The jitter is drawn uniformly from ``[-jitter, jitter]``; it must stay
    below ``1/sqrt(dim)`` so all components remain positive.
    """
    base = np.full((config.n_neurons, dim), 1.0 / np.sqrt(dim))
    if jitter:
        if jitter >= 1.0 / np.sqrt(dim):
            raise ValueError("jitter would make weight components nonpositive")
        rng = np.random.default_rng(seed)
        base = base + rng.uniform(-jitter, jitter, size=base.shape)
    return Network(config, base)


def _check_dims(m, x):
    if np.shape(m) != np.shape(x):
        raise DimensionMismatch(f"weights {np.shape(m)} vs input {np.shape(x)}")


def riccati_rhs(m, x, alpha: float, beta: float) -> np.ndarray:
    m = np.asarray(m, dtype=float)
    x = np.asarray(x, dtype=float)
    _check_dims(m, x)
    return alpha * x - beta * m * np.dot(m, x)


def fixed_point(x_hat, alpha: float, beta: float) -> np.ndarray:
    return np.sqrt(alpha / beta) * np.asarray(x_hat, dtype=float)


def output(m, x) -> float:
    """Neuron response, the inner product ``<m, x>``."""
    _check_dims(np.asarray(m), np.asarray(x))
    return float(np.dot(m, x))


def integrate(m0, inputs: Union[InputFn, np.ndarray], steps: int,
              config: NetworkConfig) -> np.ndarray:
    """Explicit Euler trajectory of the Riccati flow.

    Parameters
    ----------
    m0 : array_like
        Initial weights, all components positive.
    inputs : callable or array_like
        Either ``t -> x(t)`` or a constant input vector.
    steps : int
        Number of Euler steps.
    config : NetworkConfig
        Supplies ``alpha``, ``beta`` and ``dt``.

    Returns
    -------
    ndarray, shape (steps + 1, dim)
        The trajectory, ``m0`` included.
    """
    if steps < 1:
        raise ValueError(f"steps must be >= 1, got {steps}")
    m = np.array(m0, dtype=float)
    if np.any(m <= 0):
        raise ValueError("initial weights must be strictly positive")
    x_of_t = inputs if callable(inputs) else (lambda t, _x=np.asarray(inputs, float): _x)
    a, b, dt = config.alpha, config.beta, config.dt
    traj = np.empty((steps + 1, m.size))
    traj[0] = m
    with np.errstate(over="ignore", invalid="ignore"):
        for k in range(steps):
            x = x_of_t(k * dt)
            _check_dims(m, x)
            m = m + dt * (a * x - b * m * np.dot(m, x))
            if not np.all(np.isfinite(m)):
                raise Divergence(f"non-finite weights at step {k + 1}; reduce dt={dt}")
            traj[k + 1] = m
    return traj


def winner(network: Union[Network, np.ndarray], x) -> tuple[int, float]:
    """Index of the neuron nearest to ``x`` and its distance.

    Ties go to the lowest index (``argmin`` returns the first minimum).
    """
    weights = network.weights if isinstance(network, Network) else np.atleast_2d(network)
    if weights.size == 0:
        raise EmptyNetwork("network has no neurons")
    x = np.asarray(x, dtype=float)
    if weights.shape[1] != x.size:
        raise DimensionMismatch(f"weights of dim {weights.shape[1]} vs input of dim {x.size}")
    dist = np.linalg.norm(weights - x, axis=1)
    i = int(np.argmin(dist))
    return i, float(dist[i])


def train(network: Network, stream: Iterable[tuple[Sequence[float], str]]) -> Network:
    """One pass of winner-take-all learning over ``stream``.

    For each ``(pattern, label)`` only the winner advances one Euler step
    with that pattern as input, and takes the label. Returns a new network;
    the argument is not modified.
    """
    net = network.copy()
    cfg = net.config
    if np.any(net.weights <= 0):
        raise ValueError("weights must be initialised strictly positive")
    for n, (x, label) in enumerate(stream):
        x = np.asarray(x, dtype=float)
        if not gamma_floor(x, cfg.gamma):
            raise GammaViolation(
                f"pattern {n} ({label!r}) has min component {x.min():.3g} < gamma={cfg.gamma}"
            )
        i, _ = winner(net, x)
        m = net.weights[i]
        m = m + cfg.dt * (cfg.alpha * x - cfg.beta * m * np.dot(m, x))
        if not np.all(np.isfinite(m)):
            raise Divergence(f"non-finite weights after pattern {n}; reduce dt={cfg.dt}")
        net.weights[i] = m
        net.labels[i] = label
    return net


def presentation_order(labeled: Sequence[tuple], order: str = "grouped",
                       epochs: int = 1) -> list:
    """Arrange labeled patterns into a training stream.

    ``"grouped"`` presents each class as one sustained run: classes in
    order of first appearance, and each class's patterns cycled ``epochs``
    times before the next class starts. ``"given"`` keeps the input order
    and repeats the whole stream ``epochs`` times.
    """
    labeled = list(labeled)
    if order == "given":
        return labeled * epochs
    if order != "grouped":
        raise ValueError(f"unknown order {order!r}")
    runs: dict = {}
    for item in labeled:
        runs.setdefault(item[1], []).append(item)
    return [item for run in runs.values() for item in run * epochs]
