import numpy as np
import pytest
from hypothesis import HealthCheck, settings, strategies as st

from transduce.chain import TransducerChain

settings.register_profile("transduce", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("transduce")


def random_chain(rng, n_stages=None, lossless=False, lossless_ends=False, max_stages=4, lo=0.1, hi=2.0):
    """Chain with rates in [lo, hi] and detunings ~ N(0, 1)."""
    n = (rng.integers(0, max_stages + 1) if n_stages is None else n_stages) + 2
    ke = rng.uniform(lo, hi, n)
    ke[1:-1] = 0.0
    ki = rng.uniform(lo, hi, n)
    if lossless:
        ki[1:-1] = 0.0
    if lossless_ends or lossless:
        ki[[0, -1]] = 0.0
    return TransducerChain.build(rng.normal(0.0, 1.0, n), ki, ke, rng.uniform(lo, hi, n - 1))


@st.composite
def chains(draw, max_stages=4, lossless=False):
    n = draw(st.integers(0, max_stages)) + 2
    rate = st.floats(0.05, 5.0)
    det = draw(st.lists(st.floats(-5, 5), min_size=n, max_size=n))
    ke = draw(st.lists(rate, min_size=2, max_size=2))
    ki = [0.0 if lossless else draw(st.floats(0.0, 5.0)) for _ in range(n)]
    if lossless:
        ki[0] = ki[-1] = 0.0
    kex = [ke[0]] + [0.0] * (n - 2) + [ke[1]]
    g = draw(st.lists(rate, min_size=n - 1, max_size=n - 1))
    return TransducerChain.build(det, ki, kex, g)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    from acceptance_log import RESULTS

    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for key in sorted(RESULTS):
            passed, detail = RESULTS[key]
            terminalreporter.write_line(f"criterion {key:>2}: {'PASS' if passed else 'FAIL'}  {detail}")
