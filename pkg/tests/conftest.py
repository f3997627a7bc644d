import numpy as np
import pytest

from riccati_phoneme import default_corpus, extract_pattern, synth_vowel
from riccati_phoneme.signal_io import DEFAULT_RATE

_ACCEPTANCE = []


def naive_dft(x):
    """O(K^2) DFT along the last axis; exponents reduced mod K for accuracy."""
    x = np.asarray(x, dtype=complex)
    n = x.shape[-1]
    jk = np.outer(np.arange(n), np.arange(n)) % n
    W = np.exp(-2j * np.pi * jk / n)
    return x @ W.T


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def corpus_patterns(per_class, seed=0, window="rect"):
    return [
        (extract_pattern(synth_vowel(e.spec, DEFAULT_RATE, e.seed), window=window), e.label)
        for e in default_corpus(per_class=per_class, seed=seed)
    ]


@pytest.fixture(scope="session")
def train_patterns():
    return corpus_patterns(40, seed=0)


@pytest.fixture(scope="session")
def heldout_patterns():
    return corpus_patterns(40, seed=1)


@pytest.fixture
def criterion():
    """Record one acceptance line; printed in the terminal summary."""

    def record(number, name, passed, detail=""):
        _ACCEPTANCE.append((number, name, bool(passed), detail))
        return passed

    return record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number, name, passed, detail in sorted(_ACCEPTANCE, key=lambda r: r[0]):
        status = "PASS" if passed else "FAIL"
        terminalreporter.write_line(f"[{status}] {number}. {name}: {detail}")
