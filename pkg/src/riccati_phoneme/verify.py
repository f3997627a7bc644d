"""Numerical checks of the convergence and stability statements.

Every check returns a plain dataclass report that serialises with
:func:`dataclasses.asdict`; nothing here asserts, callers decide.
"""

from __future__ import annotations

import itertools
import logging
import math
from dataclasses import asdict, dataclass, field
from typing import Callable, Iterable, Optional, Sequence

import numpy as np

from .errors import PreconditionViolated
from .features import extract_pattern, low_band
from .partition import VoronoiPartition, check_separation
from .riccati_net import NetworkConfig, fixed_point, integrate
from .signal_io import DEFAULT_STRIDE, Signal
from .spectrum import WindowKind

logger = logging.getLogger(__name__)

# log-error window used for the rate fit
FIT_LOW, FIT_HIGH = 1e-6, 1e-1


def uniform_start(dim: int) -> np.ndarray:
    return np.full(dim, 1.0 / np.sqrt(dim))


@dataclass
class ConvergenceReport:
    final_error: float
    fitted_rate: float
    rate_relative_error: float
    steps: int
    dt: float
    errors: list = field(default_factory=list, repr=False)


def fit_log_rate(times, errors, low: float = FIT_LOW, high: float = FIT_HIGH) -> float:
    """Least-squares slope of ``log(error)`` against time, restricted to
    errors inside ``[low, high]``. NaN when fewer than two points qualify."""
    times = np.asarray(times, dtype=float)
    errors = np.asarray(errors, dtype=float)
    keep = (errors >= low) & (errors <= high)
    if keep.sum() < 2:
        return float("nan")
    slope, _ = np.polyfit(times[keep], np.log(errors[keep]), 1)
    return float(slope)


def check_theorem1(x_hat, config: NetworkConfig, steps: int = 150, m0=None,
                   strict: bool = False) -> ConvergenceReport:
    """Constant-input convergence to ``sqrt(alpha/beta) * x_hat``.

    The fitted rate is negative for a decaying error and is compared
    with ``-sqrt(alpha * beta)``.
    """
    x_hat = np.asarray(x_hat, dtype=float)
    if steps < 2:
        raise ValueError("need at least two steps")
    if abs(np.linalg.norm(x_hat) - 1.0) > 1e-9:
        raise ValueError("x_hat must have unit norm")
    if x_hat.min() < config.gamma:
        msg = f"x_hat min component {x_hat.min():.3g} < gamma={config.gamma}"
        if strict:
            raise PreconditionViolated(msg)
        logger.warning(msg)
    m0 = uniform_start(x_hat.size) if m0 is None else np.asarray(m0, dtype=float)
    target = fixed_point(x_hat, config.alpha, config.beta)
    traj = integrate(m0, x_hat, steps, config)
    err = np.linalg.norm(traj - target, axis=1)
    t = np.arange(steps + 1) * config.dt
    rate = fit_log_rate(t, err)
    expected = math.sqrt(config.alpha * config.beta)
    return ConvergenceReport(
        final_error=float(err[-1]),
        fitted_rate=rate,
        rate_relative_error=abs(-rate - expected) / expected,
        steps=steps,
        dt=config.dt,
        errors=err.tolist(),
    )


# --------------------------------------------------------------------------
# perturbations

@dataclass(frozen=True)
class PerturbationSpec:
    """Continuous perturbation ``y(t)`` with ``||y(t)||_2 <= amplitude``.

    ``kind`` is ``"sinusoidal"`` (one sinusoid per component) or
    ``"smoothed-noise"`` (a random low-order Fourier series).
    """

    kind: str = "sinusoidal"
    amplitude: float = 0.0
    seed: int = 0
    n_terms: int = 4
    base_frequency: float = 0.5


PERTURBATION_KINDS = ("sinusoidal", "smoothed-noise")


def make_perturbation(spec: PerturbationSpec, dim: int) -> Callable[[float], np.ndarray]:
    """Build ``t -> y(t)``.

    Each component is bounded by the sum of its coefficient magnitudes
    ``s_i``; coefficients are rescaled so that ``||s||_2`` equals the
    amplitude, which bounds ``||y(t)||_2`` for every ``t``.
    """
    rng = np.random.default_rng(spec.seed)
    if spec.kind == "sinusoidal":
        a = rng.normal(size=dim)
        a *= spec.amplitude / np.linalg.norm(a)
        omega = rng.uniform(0.5, 3.0, size=dim)
        phi = rng.uniform(0.0, 2 * np.pi, size=dim)
        return lambda t: a * np.sin(omega * t + phi)
    if spec.kind == "smoothed-noise":
        k = np.arange(1, spec.n_terms + 1)
        b = rng.normal(size=(dim, spec.n_terms)) / k
        c = rng.normal(size=(dim, spec.n_terms)) / k
        s = np.abs(b).sum(axis=1) + np.abs(c).sum(axis=1)
        scale = spec.amplitude / np.linalg.norm(s)
        b, c = b * scale, c * scale
        w = spec.base_frequency * k
        return lambda t: b @ np.cos(w * t) + c @ np.sin(w * t)
    raise ValueError(f"unknown perturbation kind {spec.kind!r}")


@dataclass
class StabilityReport:
    delta_used: float
    gamma: float
    C_theoretical: float
    sup_deviation: float
    T: float
    horizon: float
    bound_satisfied: bool
    precondition_ok: bool
    kind: str = ""
    seed: int = 0
    alpha: float = 1.0
    beta: float = 1.0


def settle_time(m0, x_hat, tol: float, config: NetworkConfig, max_steps: int = 1_000_000) -> int:
    """Steps until the unperturbed flow is within ``tol`` of its fixed point."""
    target = fixed_point(x_hat, config.alpha, config.beta)
    a, b, dt = config.alpha, config.beta, config.dt
    m = np.array(m0, dtype=float)
    for k in range(max_steps + 1):
        if np.linalg.norm(m - target) < tol:
            return k
        m = m + dt * (a * x_hat - b * m * np.dot(m, x_hat))
    raise RuntimeError(f"no settling within {max_steps} steps")


def check_theorem5(x_hat, pert: PerturbationSpec, config: NetworkConfig,
                   horizon: Optional[float] = None, gamma: Optional[float] = None,
                   m0=None, strict: bool = False) -> StabilityReport:
    """Deviation of the perturbed flow from the unperturbed one.

    Parameters
    ----------
    x_hat : array_like
        Unit phoneme vector.
    pert : PerturbationSpec
        Its ``amplitude`` is the perturbation bound delta.
    config : NetworkConfig
        ``alpha``, ``beta``, ``dt``; ``config.gamma`` is not used.
    horizon : float, optional
        Final time. Defaults to ten settle times, but at least
        ``10 / sqrt(alpha * beta)``.
    gamma : float, optional
        Input floor; defaults to the smallest component of ``x_hat``.
    m0 : array_like, optional
        Shared initial weights; the uniform unit vector by default.
    strict : bool
        Raise :class:`PreconditionViolated` instead of flagging the report
        when ``delta >= gamma / 8`` or ``x_hat`` dips below ``gamma``.
    """
    x_hat = np.asarray(x_hat, dtype=float)
    gamma = float(x_hat.min()) if gamma is None else float(gamma)
    delta = float(pert.amplitude)
    m0 = uniform_start(x_hat.size) if m0 is None else np.asarray(m0, dtype=float)
    precondition_ok = bool(delta < gamma / 8 and x_hat.min() >= gamma and np.all(m0 > 0))

    C = 16.0 / gamma * config.scale
    rate = math.sqrt(config.alpha * config.beta)
    tol = delta if delta > 0 else 1e-12
    k_settle = settle_time(m0, x_hat, tol, config)
    T = k_settle * config.dt
    if horizon is None:
        horizon = max(10 * T, 10 / rate)
    steps = max(int(math.ceil(horizon / config.dt)), k_settle + 1)

    y = make_perturbation(pert, x_hat.size)
    m_ref = integrate(m0, x_hat, steps, config)
    m_pert = integrate(m0, lambda t: x_hat + y(t), steps, config)
    v = m_pert[k_settle:] - m_ref[k_settle:]
    sup = float(np.abs(v).max())

    report = StabilityReport(
        delta_used=delta,
        gamma=gamma,
        C_theoretical=C,
        sup_deviation=sup,
        T=T,
        horizon=steps * config.dt,
        bound_satisfied=sup <= C * delta,
        precondition_ok=precondition_ok,
        kind=pert.kind,
        seed=pert.seed,
        alpha=config.alpha,
        beta=config.beta,
    )
    if not precondition_ok:
        msg = (f"outside the theorem's hypotheses: delta={delta:.3g}, gamma/8={gamma / 8:.3g}, "
               f"min x_hat={x_hat.min():.3g}")
        if strict:
            raise PreconditionViolated(msg, report)
        logger.warning(msg)
    return report


def stability_grid(x_hat, alphas=(0.5, 1.0, 2.0), betas=(0.5, 1.0, 2.0),
                   delta_fractions=(1 / 16, 1 / 10), kinds=PERTURBATION_KINDS,
                   seeds=(0, 1, 2), dt: float = 0.1, gamma: Optional[float] = None
                   ) -> list[StabilityReport]:
    """Run :func:`check_theorem5` over a parameter grid, sorted by run key."""
    x_hat = np.asarray(x_hat, dtype=float)
    gamma = float(x_hat.min()) if gamma is None else gamma
    reports = []
    for a, b, frac, kind, seed in itertools.product(alphas, betas, delta_fractions, kinds, seeds):
        config = NetworkConfig(alpha=a, beta=b, gamma=gamma, dt=dt)
        pert = PerturbationSpec(kind=kind, amplitude=gamma * frac, seed=seed)
        reports.append(check_theorem5(x_hat, pert, config, gamma=gamma))
    return reports


# --------------------------------------------------------------------------
# corpus-level checks

@dataclass
class GammaCriterionReport:
    gamma: float
    threshold: float
    perturbation_scale: float
    delta: float
    verdict: str
    overlap: bool


def check_gamma_criterion(partition: VoronoiPartition, gamma: float) -> GammaCriterionReport:
    """Largest atom radius against the ``gamma / 8`` stability budget."""
    sep = check_separation(partition, gamma)
    return GammaCriterionReport(
        gamma=gamma,
        threshold=sep.threshold,
        perturbation_scale=sep.max_radius,
        delta=sep.delta,
        verdict=sep.verdict,
        overlap=sep.overlap,
    )


@dataclass
class WindowPairReport:
    windows: tuple
    max_distance: float
    mean_distance: float
    distances: list = field(repr=False)


def window_sensitivity(corpus: Sequence[tuple[Signal, str]],
                       windows: Iterable = (WindowKind.RECTANGULAR, WindowKind.HANNING),
                       stride: int = DEFAULT_STRIDE) -> list[WindowPairReport]:
    """Distances between patterns of the same signal under different windows.

    Only the channels below 3 kHz are compared. One report per unordered
    window pair (a window paired with itself included), in input order.
    """
    corpus = list(corpus)
    if not corpus:
        raise ValueError("empty corpus")
    windows = [WindowKind.parse(w) for w in windows]
    patterns = {
        w: np.array([low_band(extract_pattern(sig, window=w, stride=stride)) for sig, _ in corpus])
        for w in dict.fromkeys(windows)
    }
    out = []
    for w1, w2 in itertools.combinations_with_replacement(dict.fromkeys(windows), 2):
        d = np.linalg.norm(patterns[w1] - patterns[w2], axis=1)
        out.append(WindowPairReport((w1.value, w2.value), float(d.max()), float(d.mean()), d.tolist()))
    return out


def to_jsonable(report) -> dict:
    return asdict(report)
