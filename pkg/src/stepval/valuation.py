"""Banach limits and the valuations built from them.

On eventually periodic step functions the Cesàro average converges at
``+inf`` (resp. ``-inf``), so the Banach limit along any right (left)
Lebesgue-ultrafilter is that limit and does not depend on the ultrafilter.
Tags are kept anyway so that series over several ultrafilters stay
representable.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, NamedTuple, Optional, Union

from stepval.cesaro import cesaro_limit_left, cesaro_limit_right
from stepval.stepfn import (StepFn, as_rational, compose, ess_sup_norm, make_constant,
                            restrict_left, restrict_right)
from stepval.ultra import RIGHT, Side, UltrafilterTag

__all__ = [
    "ValueMap", "identity", "abs0", "clamp", "poly",
    "BanachLimit", "RightTail", "LeftTail", "SeriesTerm", "Series", "ValuationSpec",
    "Evaluation", "banach_limit", "evaluate", "geometric_series",
    "Guarantee", "is_valuation_certificate", "MissingCertificateError",
    "CertificateViolation",
]


class MissingCertificateError(ValueError):
    pass


class CertificateViolation(ValueError):
    pass


@dataclass(frozen=True)
class ValueMap:
    """A map ``f`` with ``f(0) == 0`` applied to function values.

    ``monotone``, ``continuous`` and ``lipschitz`` are asserted by the caller;
    only ``f(0) == 0`` is enforced.  ``bound_profile(m)`` must bound
    ``|f|`` on ``[-m, m]`` when given.
    """

    fn: Callable[[Fraction], Fraction]
    name: str = "f"
    monotone: bool = False
    continuous: bool = False
    lipschitz: Optional[Fraction] = None
    bound_profile: Optional[Callable[[Fraction], Fraction]] = field(default=None, compare=False)

    def __post_init__(self):
        if as_rational(self.fn(Fraction(0))) != 0:
            raise ValueError(f"value map {self.name} must fix 0")

    def __call__(self, x: Fraction) -> Fraction:
        return as_rational(self.fn(x))

    def spot_check_monotone(self, points) -> bool:
        pts = sorted(as_rational(p) for p in points)
        vals = [self(p) for p in pts]
        return all(a <= b for a, b in zip(vals, vals[1:]))


def identity() -> ValueMap:
    return ValueMap(lambda x: x, "id", monotone=True, continuous=True,
                    lipschitz=Fraction(1), bound_profile=lambda m: m)


def abs0() -> ValueMap:
    return ValueMap(abs, "abs0", continuous=True, lipschitz=Fraction(1),
                    bound_profile=lambda m: m)


def clamp(lo, hi) -> ValueMap:
    """``x -> clamp(x, lo, hi) - clamp(0, lo, hi)``, shifted so that 0 is fixed."""
    lo, hi = as_rational(lo), as_rational(hi)
    if lo > hi:
        raise ValueError("clamp needs lo <= hi")

    def c(x):
        return min(max(x, lo), hi)

    z = c(Fraction(0))
    return ValueMap(lambda x: c(x) - z, f"clamp({_r(lo)},{_r(hi)})", monotone=True,
                    continuous=True, lipschitz=Fraction(1),
                    bound_profile=lambda m: max(abs(c(m) - z), abs(c(-m) - z)))


def poly(*coeffs) -> ValueMap:
    """``x -> c1*x + c2*x**2 + ...`` (no constant term)."""
    cs = tuple(as_rational(c) for c in coeffs)
    if not cs:
        raise ValueError("poly needs at least one coefficient")

    def f(x):
        acc, xp = Fraction(0), Fraction(1)
        for c in cs:
            xp *= x
            acc += c * xp
        return acc

    # odd powers with non-negative coefficients only: a sufficient condition
    monotone = all(c == 0 if k % 2 else c >= 0 for k, c in enumerate(cs))
    nonzero = [k for k, c in enumerate(cs) if c]
    lipschitz = abs(cs[0]) if nonzero in ([], [0]) else None
    return ValueMap(f, "poly(" + ",".join(_r(c) for c in cs) + ")", monotone=monotone,
                    continuous=True, lipschitz=lipschitz,
                    bound_profile=lambda m: sum(abs(c) * m ** (k + 1) for k, c in enumerate(cs)))


def _r(q: Fraction) -> str:
    return str(as_rational(q))


@dataclass(frozen=True)
class BanachLimit:
    f: ValueMap = field(default_factory=identity)
    tag: UltrafilterTag = RIGHT


@dataclass(frozen=True)
class RightTail:
    inner: "ValuationSpec"


@dataclass(frozen=True)
class LeftTail:
    inner: "ValuationSpec"


@dataclass(frozen=True)
class SeriesTerm:
    f: ValueMap
    tag: UltrafilterTag = RIGHT
    bound: Optional[Fraction] = None


@dataclass(frozen=True)
class Series:
    """Truncated ``sum_i Blim_i f_i(u)``.

    ``tail_bound`` certifies ``|sum of omitted terms| <= tail_bound``; it is
    either a rational or a function of ``m = ||u||_inf``.
    """

    terms: tuple
    tail_bound: Union[Fraction, Callable[[Fraction], Fraction]] = Fraction(0)

    def tail_for(self, m: Fraction) -> Fraction:
        tb = self.tail_bound
        return as_rational(tb(m) if callable(tb) else tb)


ValuationSpec = Union[BanachLimit, RightTail, LeftTail, Series]


class Evaluation(NamedTuple):
    value: Fraction
    error: Fraction

    def interval(self):
        return self.value - self.error, self.value + self.error


def banach_limit(u: StepFn, tag: UltrafilterTag = RIGHT) -> Fraction:
    if tag.side is Side.RIGHT:
        return cesaro_limit_right(u).value
    return cesaro_limit_left(u).value


def evaluate(spec: ValuationSpec, u: StepFn) -> Evaluation:
    if isinstance(spec, BanachLimit):
        return Evaluation(banach_limit(compose(spec.f, u), spec.tag), Fraction(0))
    if isinstance(spec, RightTail):
        return evaluate(spec.inner, restrict_right(u))
    if isinstance(spec, LeftTail):
        return evaluate(spec.inner, restrict_left(u))
    if isinstance(spec, Series):
        m = ess_sup_norm(u)
        total = Fraction(0)
        for i, term in enumerate(spec.terms):
            if term.bound is not None:
                bound = as_rational(term.bound)
            elif term.f.bound_profile is not None:
                bound = as_rational(term.f.bound_profile(m))
            else:
                raise MissingCertificateError(f"series term {i} ({term.f.name}) has no bound certificate")
            value = banach_limit(compose(term.f, u), term.tag)
            if abs(value) > bound:
                raise CertificateViolation(f"series term {i}: |{value}| exceeds its bound {bound}")
            total += value
        return Evaluation(total, spec.tail_for(m))
    raise TypeError(f"unknown valuation spec {spec!r}")


def geometric_series(n: int, tag: UltrafilterTag = RIGHT) -> Series:
    """Terms ``x / 2**i`` for ``i = 1..n``; omitted terms sum to at most ``m / 2**n``."""
    terms = tuple(SeriesTerm(poly(Fraction(1, 2**i)), tag) for i in range(1, n + 1))
    return Series(terms, lambda m: m / 2**n)


class Guarantee(NamedTuple):
    holds: bool
    reason: str


def _maps(spec: ValuationSpec) -> list:
    if isinstance(spec, BanachLimit):
        return [spec.f]
    if isinstance(spec, (RightTail, LeftTail)):
        return _maps(spec.inner)
    return [t.f for t in spec.terms]


def is_valuation_certificate(spec: ValuationSpec) -> dict:
    """Which valuation properties hold by construction for ``spec``.

    Non-triviality is settled by a witness: a constant (or half-line) input
    with a nonzero value.
    """
    maps = _maps(spec)
    names = ", ".join(f.name for f in maps)
    out = {
        "valuation": Guarantee(True, "Banach limits are linear and every map fixes 0"),
        "translation_invariance": Guarantee(True, "Banach limits are translation invariant"),
    }
    if all(f.monotone for f in maps):
        out["monotone"] = Guarantee(True, f"all value maps monotone ({names})")
    else:
        out["monotone"] = Guarantee(False, f"some value map not flagged monotone ({names})")
    if all(f.continuous for f in maps):
        out["continuity"] = Guarantee(True, f"all value maps continuous ({names})")
    else:
        out["continuity"] = Guarantee(False, f"some value map not flagged continuous ({names})")
    witness = None
    for c in (1, -1, 2, -2, Fraction(1, 2), -Fraction(1, 2)):
        try:
            ev = evaluate(spec, make_constant(c))
        except (MissingCertificateError, CertificateViolation, ValueError):
            continue
        if abs(ev.value) > ev.error:
            witness = c
            break
    if witness is None:
        out["non_trivial"] = Guarantee(False, "no constant witness with a nonzero value")
    else:
        out["non_trivial"] = Guarantee(True, f"value at the constant {witness} is nonzero")
    return out
