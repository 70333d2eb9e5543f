import sys
from fractions import Fraction
from pathlib import Path

import pytest
from hypothesis import strategies as st

sys.path.insert(0, str(Path(__file__).parent))

from lazyshuffle.core import LazySwap, Network, TranspositionSeq  # noqa: E402

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def acceptance_report():
    return ACCEPTANCE_LINES.append


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


probabilities = st.sampled_from(
    [Fraction(0), Fraction(1), Fraction(1, 2), Fraction(1, 3), Fraction(2, 3), Fraction(1, 4), Fraction(3, 7)]
)


@st.composite
def networks(draw, min_n=2, max_n=5, max_len=7):
    n = draw(st.integers(min_n, max_n))
    length = draw(st.integers(0, max_len))
    swaps = []
    for _ in range(length):
        a = draw(st.integers(1, n))
        b = draw(st.integers(1, n).filter(lambda v: v != a))
        swaps.append(LazySwap(a, b, draw(probabilities)))
    return Network(n, tuple(swaps))


@st.composite
def sequences(draw, min_n=2, max_n=6, max_len=10):
    n = draw(st.integers(min_n, max_n))
    length = draw(st.integers(0, max_len))
    pairs = []
    for _ in range(length):
        a = draw(st.integers(1, n))
        b = draw(st.integers(1, n).filter(lambda v: v != a))
        pairs.append((a, b))
    return TranspositionSeq(n, tuple(pairs))
