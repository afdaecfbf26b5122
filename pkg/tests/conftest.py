from fractions import Fraction

import pytest
from hypothesis import settings, strategies as st

from stepval.stepfn import PeriodicCell, make_step

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")

SQUARE = "periodic(2; [0,1)=1, [1,2)=0)"

rats = st.builds(Fraction, st.integers(-24, 24), st.sampled_from([1, 2, 3, 4]))
small_vals = st.builds(Fraction, st.integers(-6, 6), st.sampled_from([1, 2]))
lengths = st.builds(Fraction, st.integers(1, 8), st.sampled_from([1, 2, 4]))


@st.composite
def cells(draw):
    parts = draw(st.lists(st.tuples(lengths, small_vals), min_size=1, max_size=3))
    pieces, a = [], Fraction(0)
    for length, v in parts:
        pieces.append((a, v))
        a += length
    return PeriodicCell.from_pieces(a, pieces)


@st.composite
def stepfns(draw):
    left, right = draw(cells()), draw(cells())
    start = draw(rats)
    parts = draw(st.lists(st.tuples(lengths, small_vals), max_size=4))
    pieces, a = [], start
    for length, v in parts:
        pieces.append((a, v))
        a += length
    return make_step(left, pieces, a, right, core_start=start)


def probe_points(*fns, extra=()):
    """Rational points around every breakpoint plus a few tail periods."""
    pts = set(extra)
    lo = min(f.core_start for f in fns) - 12
    hi = max(f.core_end for f in fns) + 12
    k = lo
    while k < hi:
        pts.update({k, k + Fraction(1, 7), k + Fraction(5, 11)})
        k += Fraction(1, 2)
    return sorted(pts)


_ACCEPTANCE = []


@pytest.fixture
def acceptance_log():
    def log(line):
        _ACCEPTANCE.append(line)
        print(line)
    return log


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for line in sorted(_ACCEPTANCE, key=lambda s: int(s.split()[1].rstrip(":"))):
        terminalreporter.write_line(line)
