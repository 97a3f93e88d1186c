import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from polyrenorm.seqvec import SparseVec

settings.register_profile(
    "repo", derandomize=True, max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("repo")


@st.composite
def sparse_vecs(draw, max_size=8, max_index=30, lo=0.01, hi=10.0, min_size=0):
    idx = draw(st.lists(st.integers(1, max_index), min_size=min_size, max_size=max_size, unique=True))
    vals = draw(st.lists(st.floats(lo, hi), min_size=len(idx), max_size=len(idx)))
    signs = draw(st.lists(st.sampled_from([-1.0, 1.0]), min_size=len(idx), max_size=len(idx)))
    return SparseVec(zip(idx, (s * v for s, v in zip(signs, vals))))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


# one line per acceptance criterion, echoed at the end of the run
ACCEPTANCE_LINES = {}


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for key in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[key])
