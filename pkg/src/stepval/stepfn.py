"""Eventually periodic rational step functions.

A :class:`StepFn` is a piecewise constant function on the whole real line
made of three parts: a left periodic tail, a finite core, and a right
periodic tail.  Every piece is half-open ``[a, b)``, so two functions that
agree almost everywhere have the same pointwise values once written in
canonical form, and equality up to null sets is decidable.

All scalars are :class:`fractions.Fraction`.  Floats are rejected.
"""
from __future__ import annotations

import contextlib
import contextvars
import math
from bisect import bisect_right
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Sequence

Rational = Fraction

__all__ = [
    "Rational", "PeriodicCell", "StepFn", "StepFnError", "PeriodExplosionError",
    "DomainError", "Limits", "period_limits", "as_rational", "evaluate",
    "make_constant", "make_indicator", "make_periodic", "make_step",
    "add", "sub", "scale", "neg", "mul", "join", "meet", "absolute",
    "translate", "reflect", "compose", "eq_ae", "le_ae", "ess_sup_norm",
    "has_compact_support", "restrict_right", "restrict_left",
    "prolong_periodic", "pieces_between",
]


class StepFnError(ValueError):
    pass


class PeriodExplosionError(StepFnError):
    pass


class DomainError(StepFnError):
    """A value map is undefined at a value the function attains."""


@dataclass(frozen=True)
class Limits:
    numerator: int = 2**64
    denominator: int = 2**64
    cell_pieces: int = 1_000_000


_limits: contextvars.ContextVar[Limits] = contextvars.ContextVar("stepval_limits", default=Limits())


@contextlib.contextmanager
def period_limits(**overrides):
    """Temporarily change the period-explosion guard for the current context."""
    token = _limits.set(Limits(**{**_limits.get().__dict__, **overrides}))
    try:
        yield _limits.get()
    finally:
        _limits.reset(token)


def as_rational(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x.strip())
    raise TypeError(f"expected an exact rational, got {type(x).__name__}")


def _rational_lcm(p: Fraction, q: Fraction) -> Fraction:
    if p == q:
        return p
    den = math.lcm(p.denominator, q.denominator)
    result = Fraction(math.lcm(p.numerator * (den // p.denominator),
                               q.numerator * (den // q.denominator)), den)
    lim = _limits.get()
    if result.numerator > lim.numerator or result.denominator > lim.denominator:
        raise PeriodExplosionError(f"period explosion: lcm({p}, {q}) = {result} exceeds the configured cap")
    return result


def _merge_equal(breaks: Sequence[Fraction], values: Sequence[Fraction]):
    out_b, out_v = [], []
    for b, v in zip(breaks, values):
        if out_v and out_v[-1] == v:
            continue
        out_b.append(b)
        out_v.append(v)
    return tuple(out_b), tuple(out_v)


@dataclass(frozen=True)
class PeriodicCell:
    """One period ``[0, period)`` of a tail, as pieces ``[breaks[i], breaks[i+1])``.

    Adjacent pieces with equal values are merged on construction (not across
    the wrap-around), so a constant cell always has a single piece.
    """

    period: Fraction
    breaks: tuple
    values: tuple

    def __post_init__(self):
        period = as_rational(self.period)
        breaks = tuple(as_rational(b) for b in self.breaks)
        values = tuple(as_rational(v) for v in self.values)
        if period <= 0:
            raise StepFnError("period must be positive")
        if not breaks or breaks[0] != 0:
            raise StepFnError("cell breakpoints must start at 0")
        if len(breaks) != len(values):
            raise StepFnError("one value per cell piece is required")
        if any(a >= b for a, b in zip(breaks, breaks[1:])) or breaks[-1] >= period:
            raise StepFnError("cell breakpoints must be strictly increasing and below the period")
        breaks, values = _merge_equal(breaks, values)
        object.__setattr__(self, "period", period)
        object.__setattr__(self, "breaks", breaks)
        object.__setattr__(self, "values", values)

    @classmethod
    def constant(cls, c) -> PeriodicCell:
        return cls(Fraction(1), (Fraction(0),), (as_rational(c),))

    @classmethod
    def from_pieces(cls, period, pieces: Iterable[tuple]) -> PeriodicCell:
        pieces = list(pieces)
        return cls(period, tuple(b for b, _ in pieces), tuple(v for _, v in pieces))

    @property
    def pieces(self):
        return list(zip(self.breaks, self.values))

    def is_constant(self) -> bool:
        return len(self.values) == 1

    def __call__(self, y: Fraction) -> Fraction:
        y = y % self.period
        return self.values[bisect_right(self.breaks, y) - 1]

    def _lengths(self):
        ends = self.breaks[1:] + (self.period,)
        return [e - b for b, e in zip(self.breaks, ends)]

    def total(self) -> Fraction:
        return sum((v * w for v, w in zip(self.values, self._lengths())), Fraction(0))

    def mean(self) -> Fraction:
        return self.total() / self.period

    def primitive(self, y: Fraction) -> Fraction:
        """Integral of the periodic extension over ``[0, y)``, signed for ``y < 0``."""
        k, r = divmod(y, self.period)
        acc = k * self.total()
        for b, v, w in zip(self.breaks, self.values, self._lengths()):
            if b >= r:
                break
            acc += v * min(w, r - b)
        return acc

    def rotate(self, shift: Fraction) -> PeriodicCell:
        """The cell ``y -> self((y + shift) mod period)``."""
        p = self.period
        s = shift % p
        if s == 0:
            return self
        starts = sorted({(b - s) % p for b in self.breaks} | {Fraction(0)})
        return PeriodicCell(p, tuple(starts), tuple(self(b + s) for b in starts))

    def repeat(self, k: int) -> PeriodicCell:
        if k == 1:
            return self
        if k * len(self.breaks) > _limits.get().cell_pieces:
            raise PeriodExplosionError(f"period explosion: {k} repetitions of a {len(self.breaks)}-piece cell")
        p = self.period
        return PeriodicCell(k * p, tuple(b + j * p for j in range(k) for b in self.breaks),
                            self.values * k)

    def stretch_to(self, period: Fraction) -> PeriodicCell:
        k = period / self.period
        if k.denominator != 1:
            raise StepFnError(f"{period} is not a multiple of {self.period}")
        return self.repeat(int(k))

    def reflect(self) -> PeriodicCell:
        """The cell ``y -> self(-y mod period)`` up to a null set."""
        p = self.period
        ends = self.breaks[1:] + (p,)
        pieces = sorted((p - e, v) for e, v in zip(ends, self.values))
        return PeriodicCell.from_pieces(p, pieces)

    def minimal(self) -> PeriodicCell:
        """The same periodic function on its smallest period (constants get period 1)."""
        if self.is_constant():
            return self if self.period == 1 else PeriodicCell.constant(self.values[0])
        n = len(self.breaks)
        genuine = n - 1 if self.values[-1] == self.values[0] else n
        for k in range(genuine, 1, -1):
            if genuine % k:
                continue
            q = self.period / k
            if all(self(b + q) == v and self(b - q) == v for b, v in zip(self.breaks, self.values)):
                return PeriodicCell(q, tuple(b for b in self.breaks if b < q),
                                    self.values[:sum(1 for b in self.breaks if b < q)])
        return self

    def map_values(self, f: Callable[[Fraction], Fraction]) -> PeriodicCell:
        return PeriodicCell(self.period, self.breaks, tuple(f(v) for v in self.values))

    def unroll(self, anchor: Fraction, start: Fraction, end: Fraction) -> list:
        """Pieces of ``x -> self((x - anchor) mod period)`` restricted to ``[start, end)``."""
        if start >= end:
            return []
        p = self.period
        n_periods = (end - start) / p + 2
        if n_periods * len(self.breaks) > _limits.get().cell_pieces:
            raise PeriodExplosionError("period explosion: tail unrolled over too many periods")
        out = [(start, self(start - anchor))]
        k = (start - anchor) // p
        while True:
            origin = anchor + k * p
            if origin >= end:
                break
            for b, v in zip(self.breaks, self.values):
                x = origin + b
                if start < x < end and out[-1][1] != v:
                    out.append((x, v))
            k += 1
        return out


_ZERO_CELL = PeriodicCell.constant(0)


@dataclass(frozen=True)
class StepFn:
    """Eventually periodic step function.

    For ``x < core_start`` the value is ``left((x - core_start) mod p)``, on
    ``[core_start, core_end)`` it is read from ``core`` (a tuple of
    ``(breakpoint, value)`` pairs), and for ``x >= core_end`` it is
    ``right((x - core_end) mod p)``.
    """

    left: PeriodicCell
    core_start: Fraction
    core: tuple
    core_end: Fraction
    right: PeriodicCell

    def __post_init__(self):
        cs, ce = as_rational(self.core_start), as_rational(self.core_end)
        core = tuple((as_rational(b), as_rational(v)) for b, v in self.core)
        if cs > ce:
            raise StepFnError("core_start must not exceed core_end")
        if core:
            if core[0][0] != cs:
                raise StepFnError("first core breakpoint must equal core_start")
            bs = [b for b, _ in core] + [ce]
            if any(a >= b for a, b in zip(bs, bs[1:])):
                raise StepFnError("core breakpoints must be strictly increasing and below core_end")
        elif cs != ce:
            raise StepFnError("an empty core needs core_start == core_end")
        object.__setattr__(self, "core_start", cs)
        object.__setattr__(self, "core_end", ce)
        object.__setattr__(self, "core", core)

    def __call__(self, x) -> Fraction:
        return evaluate(self, x)

    def __str__(self) -> str:
        from stepval.dsl import format_fn
        return format_fn(self)

    def values(self) -> set:
        return set(self.left.values) | {v for _, v in self.core} | set(self.right.values)

    def is_indicator(self) -> bool:
        return self.values() <= {0, 1}

    def __add__(self, other):
        return add(self, other)

    def __sub__(self, other):
        return sub(self, other)

    def __neg__(self):
        return neg(self)

    def __or__(self, other):
        return join(self, other)

    def __and__(self, other):
        return meet(self, other)


def _normalize(left: PeriodicCell, cs: Fraction, pieces: list, ce: Fraction, right: PeriodicCell) -> StepFn:
    """Merge equal neighbours and absorb core pieces that continue a tail."""
    left, right = left.minimal(), right.minimal()
    core = [p for i, p in enumerate(pieces) if i == 0 or pieces[i - 1][1] != p[1]]
    while core:
        b, v = core[-1]
        length = ce - b
        p = right.period
        if length >= p:
            ok = right.is_constant() and right.values[0] == v
        else:
            ok = all(val == v for val, (s, e) in _cell_spans(right) if e > p - length)
        if not ok:
            break
        right = right.rotate(-length)
        ce = b
        core.pop()
    while core:
        b, v = core[0]
        end = core[1][0] if len(core) > 1 else ce
        length = end - b
        p = left.period
        if length >= p:
            ok = left.is_constant() and left.values[0] == v
        else:
            ok = all(val == v for val, (s, e) in _cell_spans(left) if s < length)
        if not ok:
            break
        left = left.rotate(length)
        cs = end
        core.pop(0)
    return StepFn(left, cs, tuple(core), ce, right)


def _cell_spans(cell: PeriodicCell):
    ends = cell.breaks[1:] + (cell.period,)
    return [(v, (b, e)) for b, v, e in zip(cell.breaks, cell.values, ends)]


def make_step(left: PeriodicCell, pieces: Sequence[tuple], core_end, right: PeriodicCell,
              core_start=None) -> StepFn:
    """Build a function from tails and core pieces; ``core_start`` defaults to the first breakpoint."""
    pieces = [(as_rational(b), as_rational(v)) for b, v in pieces]
    ce = as_rational(core_end)
    if core_start is None:
        cs = pieces[0][0] if pieces else ce
    else:
        cs = as_rational(core_start)
    StepFn(left, cs, tuple(pieces), ce, right)
    return _normalize(left, cs, pieces, ce, right)


def make_constant(c) -> StepFn:
    cell = PeriodicCell.constant(c)
    return StepFn(cell, Fraction(0), (), Fraction(0), cell)


def make_indicator(intervals: Iterable[tuple]) -> StepFn:
    """Indicator of a finite disjoint union of half-open intervals ``[a, b)``."""
    ivs = sorted((as_rational(a), as_rational(b)) for a, b in intervals)
    for a, b in ivs:
        if a >= b:
            raise StepFnError(f"empty interval [{a}, {b})")
    for (a1, b1), (a2, b2) in zip(ivs, ivs[1:]):
        if a2 < b1:
            raise StepFnError("intervals must be disjoint")
    if not ivs:
        return make_constant(0)
    pieces = []
    for a, b in ivs:
        if pieces and pieces[-1][0] == a:
            pieces.pop()
        pieces.append((a, Fraction(1)))
        pieces.append((b, Fraction(0)))
    end = pieces.pop()[0]
    return make_step(_ZERO_CELL, pieces, end, _ZERO_CELL)


def make_periodic(cell: PeriodicCell, anchor=0) -> StepFn:
    a = as_rational(anchor)
    cell = cell.minimal()
    return StepFn(cell, a, (), a, cell)


def evaluate(u: StepFn, x) -> Fraction:
    x = as_rational(x)
    if x < u.core_start:
        return u.left(x - u.core_start)
    if x >= u.core_end:
        return u.right(x - u.core_end)
    i = bisect_right([b for b, _ in u.core], x) - 1
    return u.core[i][1]


def pieces_between(u: StepFn, start, end) -> list:
    """Pieces of ``u`` on ``[start, end)`` as ``(breakpoint, value)`` pairs."""
    start, end = as_rational(start), as_rational(end)
    if start >= end:
        return []
    out = []

    def push(items):
        for b, v in items:
            if out and out[-1][1] == v:
                continue
            out.append((b, v))

    push(u.left.unroll(u.core_start, start, min(end, u.core_start)))
    lo, hi = max(start, u.core_start), min(end, u.core_end)
    if lo < hi:
        i = bisect_right([b for b, _ in u.core], lo) - 1
        push([(lo, u.core[i][1])] + [(b, v) for b, v in u.core[i + 1:] if b < hi])
    push(u.right.unroll(u.core_end, max(start, u.core_end), end))
    return out


def _merge_pieces(p1: list, p2: list, op) -> list:
    bs = sorted({b for b, _ in p1} | {b for b, _ in p2})
    out = []
    i = j = 0
    for b in bs:
        while i + 1 < len(p1) and p1[i + 1][0] <= b:
            i += 1
        while j + 1 < len(p2) and p2[j + 1][0] <= b:
            j += 1
        v = op(p1[i][1], p2[j][1])
        if not out or out[-1][1] != v:
            out.append((b, v))
    return out


def _combine_cells(c1: PeriodicCell, c2: PeriodicCell, op) -> PeriodicCell:
    period = _rational_lcm(c1.period, c2.period)
    a, b = c1.stretch_to(period), c2.stretch_to(period)
    return PeriodicCell.from_pieces(period, _merge_pieces(a.pieces, b.pieces, op))


def _aligned(u: StepFn, start: Fraction, end: Fraction):
    left = u.left.rotate(start - u.core_start)
    right = u.right.rotate(end - u.core_end)
    return left, pieces_between(u, start, end), right


def _combine(u: StepFn, v: StepFn, op) -> StepFn:
    start = min(u.core_start, v.core_start)
    end = max(u.core_end, v.core_end)
    lu, cu, ru = _aligned(u, start, end)
    lv, cv, rv = _aligned(v, start, end)
    left = _combine_cells(lu, lv, op)
    right = _combine_cells(ru, rv, op)
    core = _merge_pieces(cu, cv, op) if start < end else []
    return _normalize(left, start, core, end, right)


def _map(u: StepFn, f) -> StepFn:
    return _normalize(u.left.map_values(f), u.core_start,
                      [(b, f(v)) for b, v in u.core], u.core_end, u.right.map_values(f))


def add(u: StepFn, v: StepFn) -> StepFn:
    return _combine(u, v, lambda a, b: a + b)


def sub(u: StepFn, v: StepFn) -> StepFn:
    return _combine(u, v, lambda a, b: a - b)


def mul(u: StepFn, v: StepFn) -> StepFn:
    return _combine(u, v, lambda a, b: a * b)


def join(u: StepFn, v: StepFn) -> StepFn:
    return _combine(u, v, max)


def meet(u: StepFn, v: StepFn) -> StepFn:
    return _combine(u, v, min)


def scale(alpha, u: StepFn) -> StepFn:
    alpha = as_rational(alpha)
    return _map(u, lambda a: alpha * a)


def neg(u: StepFn) -> StepFn:
    return _map(u, lambda a: -a)


def absolute(u: StepFn) -> StepFn:
    return _map(u, abs)


def translate(u: StepFn, t) -> StepFn:
    """``x -> u(x - t)``: the graph moved right by ``t``."""
    t = as_rational(t)
    return StepFn(u.left, u.core_start + t, tuple((b + t, v) for b, v in u.core),
                  u.core_end + t, u.right)


def reflect(u: StepFn) -> StepFn:
    """``x -> u(-x)``, up to a null set."""
    ends = [b for b, _ in u.core[1:]] + [u.core_end]
    pieces = sorted((-e, v) for e, v in zip(ends, (v for _, v in u.core)))
    return StepFn(u.right.reflect(), -u.core_end, tuple(pieces), -u.core_start, u.left.reflect())


def compose(f: Callable[[Fraction], Fraction], u: StepFn) -> StepFn:
    """``f o u``; ``f`` is only ever called on the finitely many values of ``u``."""
    cache = {}

    def g(a):
        if a not in cache:
            try:
                y = f(a)
            except (ArithmeticError, ValueError, TypeError) as exc:
                raise DomainError(f"value map undefined at {a}: {exc}") from exc
            try:
                cache[a] = as_rational(y)
            except TypeError as exc:
                raise DomainError(f"value map returned a non-rational at {a}") from exc
        return cache[a]

    return _map(u, g)


def eq_ae(u: StepFn, v: StepFn) -> bool:
    return _is_zero(_combine(u, v, lambda a, b: Fraction(a != b)))


def le_ae(u: StepFn, v: StepFn) -> bool:
    return _is_zero(_combine(u, v, lambda a, b: Fraction(a > b)))


def _is_zero(w: StepFn) -> bool:
    return w.values() == {0}


def ess_sup_norm(u: StepFn) -> Fraction:
    return max(abs(v) for v in u.values())


def has_compact_support(u: StepFn) -> bool:
    return u.left.values == (0,) and u.right.values == (0,)


_RIGHT_HALF = StepFn(_ZERO_CELL, Fraction(0), (), Fraction(0), PeriodicCell.constant(1))
_LEFT_HALF = StepFn(PeriodicCell.constant(1), Fraction(0), (), Fraction(0), _ZERO_CELL)


def restrict_right(u: StepFn) -> StepFn:
    """``u`` times the indicator of ``(0, inf)``."""
    return mul(u, _RIGHT_HALF)


def restrict_left(u: StepFn) -> StepFn:
    """``u`` times the indicator of ``(-inf, 0)``."""
    return mul(u, _LEFT_HALF)


def prolong_periodic(u: StepFn, n) -> StepFn:
    """Repeat ``u|[0, n)`` with period ``n`` on ``(0, inf)``; zero on ``(-inf, 0]``.

    Requires ``u`` to vanish a.e. outside ``(0, n)``.  The result satisfies
    ``u + translate(result, n) == result`` almost everywhere.
    """
    n = as_rational(n)
    if n <= 0:
        raise StepFnError("prolongation length must be positive")
    window = make_indicator([(0, n)])
    if not has_compact_support(u) or not eq_ae(mul(u, window), u):
        raise StepFnError(f"support is not contained in (0, {n})")
    cell = PeriodicCell.from_pieces(n, pieces_between(u, 0, n))
    return _normalize(_ZERO_CELL, Fraction(0), [], Fraction(0), cell)
