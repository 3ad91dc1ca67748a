import sys

import numpy as np
import pytest
from hypothesis import settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from lpalg.pnorm import make_oracle

settings.register_profile("lpalg", deadline=None, derandomize=True, max_examples=30)
settings.load_profile("lpalg")

finite = st.floats(-3.0, 3.0, allow_nan=False, allow_infinity=False)


def complex_matrices(n_min=1, n_max=4):
    """Square complex matrices with modest entries."""

    def build(n):
        return st.tuples(arrays(np.float64, (n, n), elements=finite), arrays(np.float64, (n, n), elements=finite)).map(
            lambda t: t[0] + 1j * t[1]
        )

    return st.integers(n_min, n_max).flatmap(build)


def complex_vectors(n_min=1, n_max=6):
    def build(n):
        return st.tuples(arrays(np.float64, (n,), elements=finite), arrays(np.float64, (n,), elements=finite)).map(
            lambda t: t[0] + 1j * t[1]
        )

    return st.integers(n_min, n_max).flatmap(build)


exponents = st.floats(1.1, 8.0, allow_nan=False)


@pytest.fixture(scope="session")
def oracle():
    return make_oracle()


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def rand_complex(rng, n):
    return rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in mod.summary_lines():
        terminalreporter.write_line(line)
