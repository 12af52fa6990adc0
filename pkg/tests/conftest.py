import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from knflow.groups import Representation, builtin_presentation
from knflow.matcore import GroupSpec

settings.register_profile(
    "default", max_examples=40, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")

J = np.array([[0.0, 1.0], [-1.0, 0.0]])

seeds = st.integers(min_value=0, max_value=2**32 - 1)
dims = st.integers(min_value=2, max_value=5)


def rep_of(name, mats, ambient="SL", field="complex"):
    mats = [np.asarray(m) for m in mats]
    return Representation(builtin_presentation(name), GroupSpec(ambient, mats[0].shape[0], field), tuple(mats))


def gaussian(rng, n, complex_=True):
    m = rng.normal(size=(n, n))
    if complex_:
        m = m + 1j * rng.normal(size=(n, n))
    return m


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
