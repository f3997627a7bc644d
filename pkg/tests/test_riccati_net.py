import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from riccati_phoneme.errors import DimensionMismatch, Divergence, EmptyNetwork, GammaViolation
from riccati_phoneme.features import normalize_unit
from riccati_phoneme.riccati_net import (
    Network,
    NetworkConfig,
    fixed_point,
    init_network,
    integrate,
    output,
    presentation_order,
    riccati_rhs,
    train,
    winner,
)

unit_positive = st.lists(st.floats(0.01, 1.0), min_size=15, max_size=15).map(normalize_unit)
RAMP = normalize_unit(np.arange(1.0, 16.0))


def test_rhs_vanishes_at_fixed_point():
    x = RAMP
    for a, b in [(1, 1), (4, 1), (0.5, 2)]:
        assert np.max(np.abs(riccati_rhs(fixed_point(x, a, b), x, a, b))) < 1e-14


def test_rhs_zero_weights():
    assert np.array_equal(riccati_rhs(np.zeros(15), RAMP, 2.0, 3.0), 2.0 * RAMP)


def test_rhs_componentwise_oracle(rng):
    for _ in range(20):
        m, x = rng.normal(size=15), rng.normal(size=15)
        a, b = rng.uniform(0.1, 3, size=2)
        s = sum(m[j] * x[j] for j in range(15))
        ref = np.array([a * x[i] - b * m[i] * s for i in range(15)])
        assert np.max(np.abs(riccati_rhs(m, x, a, b) - ref)) < 1e-14


def test_rhs_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        riccati_rhs(np.ones(15), np.ones(14), 1, 1)
    with pytest.raises(DimensionMismatch):
        output(np.ones(3), np.ones(4))


@settings(max_examples=100, deadline=None)
@given(unit_positive, st.floats(0.1, 5), st.floats(0.1, 5))
def test_fixed_point_residual(x, a, b):
    assert np.max(np.abs(riccati_rhs(fixed_point(x, a, b), x, a, b))) < 1e-14 * max(1, a)


def test_fixed_point_values():
    assert np.array_equal(fixed_point(RAMP, 2.0, 2.0), RAMP)
    e1 = np.eye(15)[0]
    assert np.allclose(fixed_point(e1, 4.0, 1.0), 2 * e1)


def test_integrate_converges_in_150_steps():
    traj = integrate(np.full(15, 1 / np.sqrt(15)), RAMP, 150, NetworkConfig())
    assert traj.shape == (151, 15)
    assert np.linalg.norm(traj[-1] - RAMP) < 5e-7


def test_integrate_equilibrium_stays_put():
    cfg = NetworkConfig(alpha=2.0, beta=0.5)
    m = fixed_point(RAMP, 2.0, 0.5)
    traj = integrate(m, RAMP, 100, cfg)
    assert np.max(np.abs(traj - m)) < 1e-12


def test_integrate_matches_fine_step_reference():
    m0 = np.linspace(0.1, 0.5, 15)
    coarse = integrate(m0, RAMP, 150, NetworkConfig(dt=0.1))
    fine = integrate(m0, RAMP, 15000, NetworkConfig(dt=0.001))
    assert np.linalg.norm(coarse[-1] - fine[-1]) < 1e-5


def test_integrate_time_varying_input():
    seen = []

    def x_of_t(t):
        seen.append(t)
        return RAMP

    integrate(np.ones(15), x_of_t, 3, NetworkConfig(dt=0.5))
    assert seen == [0.0, 0.5, 1.0]


def test_integrate_divergence():
    with pytest.raises(Divergence):
        integrate(np.full(15, 10.0), RAMP, 200, NetworkConfig(dt=50.0))


def test_integrate_rejects_nonpositive_start():
    with pytest.raises(ValueError):
        integrate(np.zeros(15), RAMP, 1, NetworkConfig())


def test_exponential_approach_rate():
    for a, b in [(1, 1), (0.5, 2), (2, 2), (0.5, 0.5)]:
        cfg = NetworkConfig(alpha=a, beta=b, dt=0.01)
        steps = int(12 / np.sqrt(a * b) / cfg.dt)
        traj = integrate(np.full(15, 1 / np.sqrt(15)), RAMP, steps, cfg)
        err = np.linalg.norm(traj - fixed_point(RAMP, a, b), axis=1)
        t = np.arange(steps + 1) * cfg.dt
        keep = (err > 1e-6) & (err < 1e-1)
        slope = np.polyfit(t[keep], np.log(err[keep]), 1)[0]
        assert abs(-slope - np.sqrt(a * b)) / np.sqrt(a * b) < 0.1


@pytest.mark.parametrize("a", [0.5, 1.0, 2.0])
@pytest.mark.parametrize("b", [0.5, 1.0, 2.0])
@pytest.mark.parametrize("dt", [0.01, 0.1])
def test_positivity_preserved(a, b, dt):
    x = normalize_unit(np.r_[np.full(14, 0.01), 1.0])
    traj = integrate(np.full(15, 1 / np.sqrt(15)), x, 400, NetworkConfig(alpha=a, beta=b, dt=dt))
    assert np.all(traj > 0)


def test_winner_exact_match_and_ties():
    e = np.eye(15)
    net = np.array([e[0], e[1]])
    assert winner(net, e[0]) == (0, 0.0)
    mid = normalize_unit(e[0] + e[1])
    i, rho = winner(net, mid)
    assert i == 0
    assert rho == pytest.approx(np.linalg.norm(mid - e[1]))


def test_winner_brute_force(rng):
    for _ in range(50):
        W = rng.normal(size=(7, 15))
        x = rng.normal(size=15)
        d = [np.sqrt(sum((W[i, j] - x[j]) ** 2 for j in range(15))) for i in range(7)]
        best = min(range(7), key=lambda i: (d[i], i))
        i, rho = winner(W, x)
        assert i == best and rho == pytest.approx(d[best], rel=1e-12)


def test_winner_empty():
    with pytest.raises(EmptyNetwork):
        winner(np.zeros((0, 15)), np.ones(15))


def test_output():
    assert output(RAMP, RAMP) == pytest.approx(1.0)
    e = np.eye(15)
    assert output(e[0], e[1]) == 0.0


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_winner_output_duality(seed):
    r = np.random.default_rng(seed)
    W = np.array([normalize_unit(r.normal(size=15)) for _ in range(6)])
    x = normalize_unit(r.normal(size=15))
    eta = W @ x
    assert winner(W, x)[0] == int(np.argmax(eta))
    assert np.allclose(np.linalg.norm(W - x, axis=1) ** 2, 2 - 2 * eta)


def test_train_empty_stream_is_identity():
    net = init_network(NetworkConfig(n_neurons=3), jitter=1e-3, seed=0)
    out = train(net, [])
    assert np.array_equal(out.weights, net.weights) and out.labels == [None] * 3


def test_train_single_phoneme_converges():
    net = init_network(NetworkConfig(n_neurons=1))
    out = train(net, [(RAMP, "a")] * 150)
    assert np.linalg.norm(out.weights[0] - RAMP) < 5e-7
    assert out.labels == ["a"]


def test_train_does_not_mutate_input():
    net = init_network(NetworkConfig(n_neurons=2))
    before = net.weights.copy()
    train(net, [(RAMP, "a")])
    assert np.array_equal(net.weights, before)


def _separated_classes():
    # four classes, each concentrated on its own channel, small jitter
    r = np.random.default_rng(0)
    base = np.full(15, 0.02)
    out = []
    for k, label in enumerate("abcd"):
        for _ in range(10):
            v = base + r.uniform(0, 0.02, 15)
            v[3 * k] = 1.0
            out.append((normalize_unit(v), label))
    return out


def test_train_four_separated_classes():
    data = _separated_classes()
    net = train(init_network(NetworkConfig(n_neurons=8)), presentation_order(data, epochs=20))
    labeled = [l for l in net.labels if l is not None]
    assert sorted(labeled) == list("abcd")
    for label in "abcd":
        members = np.array([x for x, l in data if l == label])
        i = net.labels.index(label)
        assert np.linalg.norm(net.weights[i] - members.mean(axis=0)) < 0.05


def test_train_interleaved_separated_classes():
    # interleaved order also works when every class is far from the rest
    data = _separated_classes()
    net = train(init_network(NetworkConfig(n_neurons=8)), presentation_order(data, "given", 20))
    assert sorted(l for l in net.labels if l) == list("abcd")


def test_train_gamma_violation():
    x = RAMP.copy()
    x[0] = 0.0
    with pytest.raises(GammaViolation):
        train(init_network(NetworkConfig(n_neurons=2)), [(x, "a")])


def test_train_is_deterministic():
    data = _separated_classes()
    cfg = NetworkConfig(n_neurons=6)
    a = train(init_network(cfg, jitter=1e-3, seed=4), data * 3)
    b = train(init_network(cfg, jitter=1e-3, seed=4), data * 3)
    assert a.weights.tobytes() == b.weights.tobytes() and a.labels == b.labels


def test_network_json_round_trip():
    net = train(init_network(NetworkConfig(n_neurons=4)), _separated_classes())
    back = Network.from_dict(net.to_dict())
    assert np.array_equal(back.weights, net.weights)
    assert back.labels == net.labels and back.config == net.config


def test_presentation_order():
    data = [(1, "x"), (2, "y"), (3, "x"), (4, "z"), (5, "y")]
    assert [v for v, _ in presentation_order(data)] == [1, 3, 2, 5, 4]
    assert [v for v, _ in presentation_order(data, epochs=2)] == [1, 3, 1, 3, 2, 5, 2, 5, 4, 4]
    assert [v for v, _ in presentation_order(data, "given", 2)] == [1, 2, 3, 4, 5] * 2
    with pytest.raises(ValueError):
        presentation_order(data, "random")


def test_config_validation():
    with pytest.raises(ValueError):
        NetworkConfig(alpha=0)
    with pytest.raises(ValueError):
        NetworkConfig(n_neurons=0)
    with pytest.raises(ValueError):
        init_network(NetworkConfig(), jitter=0.5)
