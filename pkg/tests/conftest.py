import numpy as np
import pytest
from hypothesis import strategies as st

angles = st.floats(-2 * np.pi, 2 * np.pi, allow_nan=False, allow_infinity=False)
gammas = st.floats(0.0, np.pi / 2, allow_nan=False)
seeds = st.integers(0, 2**32 - 1)


def random_density(seed, dim=4, rank=None):
    rng = np.random.default_rng(seed)
    g = rng.normal(size=(dim, rank or dim)) + 1j * rng.normal(size=(dim, rank or dim))
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


def random_unit(seed):
    v = np.random.default_rng(seed).normal(size=3)
    return v / np.linalg.norm(v)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter, config):
    results = getattr(config, "_acceptance_results", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(results):
        ok, detail = results[n]
        terminalreporter.write_line(f"criterion {n:>2}: {'PASS' if ok else 'FAIL'}  {detail}")
