import sys
from fractions import Fraction
from pathlib import Path

import pytest
from hypothesis import strategies as st

sys.path.insert(0, str(Path(__file__).parent))

from pqapprox import PQParams  # noqa: E402

PQ_GRID = [
    (Fraction(1), Fraction(1, 2)),
    (Fraction(3, 4), Fraction(1, 2)),
    (Fraction(9, 10), Fraction(2, 3)),
    (Fraction(1), Fraction(9, 10)),
    (Fraction(99, 100), Fraction(49, 50)),
]


@st.composite
def rational_pq(draw, max_den=20):
    den = draw(st.integers(2, max_den))
    pn = draw(st.integers(2, den))
    qn = draw(st.integers(1, pn - 1))
    return PQParams.exact(Fraction(pn, den), Fraction(qn, den))


@st.composite
def unit_rationals(draw, max_den=50):
    den = draw(st.integers(1, max_den))
    return Fraction(draw(st.integers(0, den)), den)


@pytest.fixture(params=PQ_GRID, ids=lambda pq: f"p={pq[0]},q={pq[1]}")
def exact_params(request):
    return PQParams.exact(*request.param)


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1])):
            terminalreporter.write_line(line)
