"""Cesàro-like averages ``x -> (1/x) * integral_0^x u`` of step functions.

The average itself is a ratio of a piecewise linear function and ``x``, so it
is never materialised; we evaluate it pointwise and read its limit at
infinity off the tail cell.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from stepval.stepfn import StepFn, as_rational, ess_sup_norm, evaluate, reflect

__all__ = [
    "integral", "cesaro_eval", "CesaroLimit", "cesaro_limit_right",
    "cesaro_limit_left", "has_limit_right", "has_limit_left",
]


def _integral_ordered(u: StepFn, a: Fraction, b: Fraction) -> Fraction:
    acc = Fraction(0)
    cs, ce = u.core_start, u.core_end
    lo, hi = a, min(b, cs)
    if lo < hi:
        acc += u.left.primitive(hi - cs) - u.left.primitive(lo - cs)
    lo, hi = max(a, cs), min(b, ce)
    if lo < hi:
        ends = [x for x, _ in u.core[1:]] + [ce]
        for (x, v), e in zip(u.core, ends):
            w = min(e, hi) - max(x, lo)
            if w > 0:
                acc += v * w
    lo, hi = max(a, ce), b
    if lo < hi:
        acc += u.right.primitive(hi - ce) - u.right.primitive(lo - ce)
    return acc


def integral(u: StepFn, a, b) -> Fraction:
    """Exact integral of ``u`` from ``a`` to ``b`` (negated when ``b < a``)."""
    a, b = as_rational(a), as_rational(b)
    if b < a:
        return -_integral_ordered(u, b, a)
    return _integral_ordered(u, a, b)


def cesaro_eval(u: StepFn, x) -> Fraction:
    x = as_rational(x)
    if x == 0:
        return evaluate(u, x)
    return integral(u, 0, x) / x


@dataclass(frozen=True)
class CesaroLimit:
    """Limit of the average at ``+inf`` together with a convergence certificate.

    For ``x >= start`` (and ``x > 0``) the average is within
    ``(excess + 2 * norm * period) / x`` of ``value``, where ``excess`` is
    ``|integral_0^start (u - value)|``.
    """

    value: Fraction
    excess: Fraction
    norm: Fraction
    period: Fraction
    start: Fraction

    def bound(self, x) -> Fraction:
        x = as_rational(x)
        if x < self.start or x <= 0:
            raise ValueError(f"certificate only holds for x >= {self.start} and x > 0")
        return (self.excess + 2 * self.norm * self.period) / x


def cesaro_limit_right(u: StepFn) -> CesaroLimit:
    mean = u.right.mean()
    start = max(u.core_end, Fraction(0))
    excess = abs(integral(u, 0, start) - mean * start)
    return CesaroLimit(mean, excess, ess_sup_norm(u), u.right.period, start)


def cesaro_limit_left(u: StepFn) -> CesaroLimit:
    """Limit at ``-inf``; the certificate is stated for the reflected function."""
    return cesaro_limit_right(reflect(u))


def has_limit_right(u: StepFn) -> Optional[Fraction]:
    return u.right.values[0] if u.right.is_constant() else None


def has_limit_left(u: StepFn) -> Optional[Fraction]:
    return u.left.values[0] if u.left.is_constant() else None
