"""Forced consequences of right (or left) Lebesgue-ultrafilters.

An actual ultrafilter cannot be constructed, so a tag carries no choice
data.  What can be decided is whether a set's membership follows from the
axioms alone: a right Lebesgue-ultrafilter contains every ray ``(a, inf)``
and every co-null set, hence every set containing a ray up to a null set.
For an eventually periodic set this is a question about its right tail
cell only.  Anything else is reported as undetermined.

There is no bilateral tag.  An ultrafilter containing the complements of
all bounded intervals contains either ``(0, inf)`` or ``(-inf, 0)``, and
in the first case every ``(a, inf)`` as well, so it is already a right or a
left ultrafilter.

For a step function the ``for every eps > 0`` in the definition of an
ultralimit reduces to a finite check: once ``eps`` is smaller than the
gap between ``l`` and every other tail value, ``{|u - l| < eps}`` has the
same tail as ``{u = l}``.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

from stepval.stepfn import (PeriodicCell, StepFn, StepFnError, as_rational, compose,
                            eq_ae, make_constant, make_indicator, meet, join, sub)

__all__ = [
    "Side", "UltrafilterTag", "RIGHT", "LEFT", "Verdict", "DefinableSet",
    "membership", "Determined", "Undetermined", "ultralimit", "ball_preimage",
]


class Side(enum.Enum):
    RIGHT = "right"
    LEFT = "left"


@dataclass(frozen=True)
class UltrafilterTag:
    side: Side = Side.RIGHT
    id: str = "U"


RIGHT = UltrafilterTag(Side.RIGHT)
LEFT = UltrafilterTag(Side.LEFT)


class Verdict(enum.Enum):
    FORCED_IN = "ForcedIn"
    FORCED_OUT = "ForcedOut"
    UNDETERMINED = "Undetermined"


@dataclass(frozen=True)
class DefinableSet:
    """A set given by its 0/1 indicator."""

    indicator: StepFn

    def __post_init__(self):
        if not self.indicator.is_indicator():
            raise StepFnError("a definable set needs a 0/1-valued indicator")

    @classmethod
    def from_intervals(cls, intervals) -> DefinableSet:
        return cls(make_indicator(intervals))

    @classmethod
    def everything(cls) -> DefinableSet:
        return cls(make_constant(1))

    @classmethod
    def empty(cls) -> DefinableSet:
        return cls(make_constant(0))

    def complement(self) -> DefinableSet:
        return DefinableSet(sub(make_constant(1), self.indicator))

    def __and__(self, other: DefinableSet) -> DefinableSet:
        return DefinableSet(meet(self.indicator, other.indicator))

    def __or__(self, other: DefinableSet) -> DefinableSet:
        return DefinableSet(join(self.indicator, other.indicator))

    def __le__(self, other: DefinableSet) -> bool:
        return eq_ae(meet(self.indicator, other.indicator), self.indicator)


def _tail(u: StepFn, tag: UltrafilterTag) -> PeriodicCell:
    return u.right if tag.side is Side.RIGHT else u.left


def membership(s: DefinableSet | StepFn, tag: UltrafilterTag = RIGHT) -> Verdict:
    if isinstance(s, StepFn):
        s = DefinableSet(s)
    cell = _tail(s.indicator, tag)
    if cell.is_constant():
        return Verdict.FORCED_IN if cell.values[0] == 1 else Verdict.FORCED_OUT
    return Verdict.UNDETERMINED


@dataclass(frozen=True)
class Determined:
    value: Fraction


@dataclass(frozen=True)
class Undetermined:
    candidates: frozenset


def ultralimit(u: StepFn, tag: UltrafilterTag = RIGHT) -> Union[Determined, Undetermined]:
    """The ultralimit of ``u`` if every admissible ultrafilter agrees on it.

    Otherwise the candidates are the tail values, each of which is the limit
    along some ultrafilter of the given side.
    """
    cell = _tail(u, tag)
    if cell.is_constant():
        return Determined(cell.values[0])
    return Undetermined(frozenset(cell.values))


def ball_preimage(u: StepFn, center, eps) -> DefinableSet:
    """The set ``{x : |u(x) - center| < eps}``."""
    center, eps = as_rational(center), as_rational(eps)
    return DefinableSet(compose(lambda v: Fraction(int(abs(v - center) < eps)), u))
