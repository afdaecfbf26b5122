from fractions import Fraction as F

import pytest
from hypothesis import given, strategies as st

from conftest import SQUARE, small_vals, stepfns
from stepval import stepfn as sf
from stepval.dsl import parse_fn
from stepval.ultra import (LEFT, RIGHT, DefinableSet, Determined, Undetermined, Verdict,
                           ball_preimage, membership, ultralimit)

SQ = parse_fn(SQUARE)
ONE = sf.make_constant(1)


def far_values(u, side):
    """Values seen on a fine grid one full period far out on the given side."""
    if side == "right":
        base, p = u.core_end + 1000 * u.right.period, u.right.period
    else:
        p = u.left.period
        base = u.core_start - 1000 * p - p
    n = int(p * 8)
    return {u(base + F(2 * j + 1, 16)) for j in range(n)}


def brute_verdict(u, c, eps, side):
    inside = [abs(v - c) < eps for v in far_values(u, side)]
    if all(inside):
        return Verdict.FORCED_IN
    if not any(inside):
        return Verdict.FORCED_OUT
    return Verdict.UNDETERMINED


class TestMembership:
    def test_examples(self):
        ray = DefinableSet(sf.translate(sf.restrict_right(ONE), 5))
        assert membership(ray, RIGHT) is Verdict.FORCED_IN
        assert membership(DefinableSet.from_intervals([(0, 1)]), RIGHT) is Verdict.FORCED_OUT
        odd = DefinableSet(sf.translate(SQ, 1))
        assert membership(odd, RIGHT) is Verdict.UNDETERMINED

    def test_left_side(self):
        ray = DefinableSet(sf.restrict_right(ONE))
        assert membership(ray, LEFT) is Verdict.FORCED_OUT
        assert membership(ray.complement(), LEFT) is Verdict.FORCED_IN

    def test_rejects_non_indicator(self):
        with pytest.raises(sf.StepFnError):
            DefinableSet(sf.make_constant(2))

    def test_null_sets_do_not_matter(self):
        s = DefinableSet.from_intervals([(0, F(1, 10**9))])
        assert membership(s, RIGHT) is Verdict.FORCED_OUT
        assert membership(s.complement(), RIGHT) is Verdict.FORCED_IN

    @given(stepfns(), stepfns())
    def test_filter_laws(self, u, v):
        s = DefinableSet(sf.compose(lambda a: F(int(a > 0)), u))
        t = DefinableSet(sf.compose(lambda a: F(int(a > 0)), v))
        flip = {Verdict.FORCED_IN: Verdict.FORCED_OUT, Verdict.FORCED_OUT: Verdict.FORCED_IN,
                Verdict.UNDETERMINED: Verdict.UNDETERMINED}
        for tag in (RIGHT, LEFT):
            vs = membership(s, tag)
            assert membership(s.complement(), tag) is flip[vs]
            if vs is Verdict.FORCED_IN and membership(t, tag) is Verdict.FORCED_IN:
                assert membership(s & t, tag) is Verdict.FORCED_IN
            if vs is Verdict.FORCED_IN:
                assert membership(s | t, tag) is Verdict.FORCED_IN
            if s <= t and vs is Verdict.FORCED_IN:
                assert membership(t, tag) is Verdict.FORCED_IN


class TestUltralimit:
    def test_examples(self):
        assert ultralimit(sf.make_constant(F(-2, 3))) == Determined(F(-2, 3))
        assert ultralimit(SQ, RIGHT) == Undetermined(frozenset({F(0), F(1)}))
        wild = parse_fn("step{periodic(3; [0,1)=7, [1,3)=-7), [[0,1)=4, [1,2)=-9, [2,5/2)=1], const(3)}")
        assert ultralimit(wild, RIGHT) == Determined(F(3))
        assert ultralimit(wild, LEFT) == Undetermined(frozenset({F(7), F(-7)}))

    @given(stepfns(), st.sampled_from(["right", "left"]))
    def test_candidates_are_far_values(self, u, side):
        r = ultralimit(u, RIGHT if side == "right" else LEFT)
        seen = far_values(u, side)
        if isinstance(r, Determined):
            assert seen == {r.value}
        else:
            assert set(r.candidates) == seen and len(seen) > 1

    @given(stepfns(), small_vals, st.builds(F, st.integers(1, 20), st.sampled_from([1, 3, 8])),
           st.sampled_from(["right", "left"]))
    def test_eps_ball_matches_finite_reduction(self, u, c, eps, side):
        tag = RIGHT if side == "right" else LEFT
        assert membership(ball_preimage(u, c, eps), tag) is brute_verdict(u, c, eps, side)

    @given(stepfns())
    def test_determined_limit_passes_every_eps(self, u):
        r = ultralimit(u, RIGHT)
        if isinstance(r, Determined):
            for eps in (F(1), F(1, 10), F(1, 10**6)):
                assert membership(ball_preimage(u, r.value, eps), RIGHT) is Verdict.FORCED_IN
