import numpy as np
import pytest
from hypothesis import strategies as st

from matmech.operator_core import IndexRange, make_banded
from matmech.rotor_model import PhysicalParams


@pytest.fixture
def unit():
    return PhysicalParams(1.0, 1.0, 1.0)


@pytest.fixture
def odd_params():
    return PhysicalParams(hbar=1.3, mass_mu=0.7, radius_r=2.1)


def naive_product(a, b):
    """Textbook triple loop; shares no code with the banded kernels."""
    n = a.shape[0]
    out = np.zeros((n, n), dtype=complex)
    for i in range(n):
        for j in range(n):
            acc = 0j
            for k in range(n):
                acc += a[i, k] * b[k, j]
            out[i, j] = acc
    return out


unit_disc = st.builds(
    lambda r, th: r * np.exp(1j * th),
    st.floats(0.0, 1.0),
    st.floats(0.0, 2 * np.pi),
)


@st.composite
def banded_operators(draw, rng=IndexRange(-6, 6), max_offset=2):
    offsets = draw(st.sets(st.integers(-max_offset, max_offset), min_size=1, max_size=2 * max_offset + 1))
    bands = {}
    for k in offsets:
        cnt = rng.row_count(k)
        bands[k] = draw(st.lists(unit_disc, min_size=cnt, max_size=cnt))
    return make_banded(rng, bands)


ACCEPTANCE_LINES = []


@pytest.fixture
def criterion():
    """Record a named check, then assert it; lines are echoed in the terminal summary."""

    def check(label, ok, detail=""):
        ACCEPTANCE_LINES.append(f"{'PASS' if ok else 'FAIL'}  {label}  {detail}".rstrip())
        assert ok, f"{label}: {detail}"

    return check


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
