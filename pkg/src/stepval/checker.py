"""Seeded property suites over random step functions.

Every sample is generated from ``(seed, index)`` alone, so reports do not
depend on evaluation order or on the number of worker threads.  A failing
report carries the serialized inputs of the first failing sample, and
:func:`replay` re-runs the property from that payload.
"""
from __future__ import annotations

import json
import random
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, NamedTuple, Optional

from stepval import stepfn as sf
from stepval.cesaro import cesaro_eval, cesaro_limit_right, has_limit_left, has_limit_right
from stepval.dsl import format_fn, format_spec, parse_fn, parse_spec
from stepval.stepfn import PeriodicCell, StepFn
from stepval.ultra import (LEFT, RIGHT, DefinableSet, Determined, Verdict, ball_preimage,
                           membership, ultralimit)
from stepval.valuation import (BanachLimit, CertificateViolation, LeftTail, RightTail, Series,
                               banach_limit, evaluate, geometric_series, identity)

__all__ = ["GenConfig", "Report", "Outcome", "gen_stepfn", "run_suite", "run_all", "replay",
           "check_sample", "suite_ids", "KINDS"]


@dataclass(frozen=True)
class GenConfig:
    seed: int = 0
    samples: int = 100
    max_breakpoints: int = 4
    max_period_denominator: int = 4
    value_range: int = 3

    def __post_init__(self):
        if self.samples < 1:
            raise ValueError("samples must be >= 1")
        if min(self.max_breakpoints, self.max_period_denominator, self.value_range) < 1:
            raise ValueError("generation bounds must be positive")


KINDS = ("constant", "indicator", "periodic", "compact", "mixed", "settling")
_WEIGHTS = (1, 2, 2, 2, 4, 1)
_CORE_SPAN = 8


def _rng(cfg: GenConfig, *key) -> random.Random:
    return random.Random(":".join(["stepval", str(cfg.seed), *map(str, key)]))


def _value(rng, cfg) -> Fraction:
    r = cfg.value_range
    return Fraction(rng.randint(-2 * r, 2 * r), 2)


def _grid_point(rng, cfg, lo, hi) -> Fraction:
    d = rng.randint(1, cfg.max_period_denominator)
    return Fraction(rng.randint(lo * d, hi * d), d)


def _cell(rng, cfg) -> PeriodicCell:
    d = cfg.max_period_denominator
    period = Fraction(rng.randint(1, 2 * d), rng.randint(1, d))
    m = rng.randint(1, 6)
    k = rng.randint(0, min(cfg.max_breakpoints, m) - 1)
    cuts = sorted(rng.sample(range(1, m), k)) if m > 1 else []
    breaks = [Fraction(0)] + [period * c / m for c in cuts]
    return PeriodicCell(period, tuple(breaks), tuple(_value(rng, cfg) for _ in breaks))


def _core(rng, cfg) -> tuple:
    pts = set()
    while len(pts) < 2:
        pts = {_grid_point(rng, cfg, -_CORE_SPAN, _CORE_SPAN) for _ in range(rng.randint(2, cfg.max_breakpoints + 1))}
    pts = sorted(pts)
    return [(b, _value(rng, cfg)) for b in pts[:-1]], pts[-1]


_ZERO = PeriodicCell.constant(0)


def gen_stepfn(cfg: GenConfig, index: int, kind: Optional[str] = None) -> StepFn:
    """Deterministic sample number ``index``; ``kind`` forces a subclass."""
    rng = _rng(cfg, "fn", index)
    if kind is None:
        kind = rng.choices(KINDS, _WEIGHTS)[0]
    if kind == "constant":
        return sf.make_constant(_value(rng, cfg))
    if kind == "indicator":
        pts = sorted({_grid_point(rng, cfg, -_CORE_SPAN, _CORE_SPAN) for _ in range(2 * rng.randint(1, 3))})
        ivs = [(a, b) for a, b in zip(pts[::2], pts[1::2])]
        return sf.make_indicator(ivs)
    if kind == "periodic":
        return sf.make_periodic(_cell(rng, cfg), _grid_point(rng, cfg, -2, 2))
    pieces, end = _core(rng, cfg)
    if kind == "compact":
        return sf.make_step(_ZERO, pieces, end, _ZERO)
    if kind == "mixed":
        return sf.make_step(_cell(rng, cfg), pieces, end, _cell(rng, cfg))
    if kind == "settling":
        return sf.make_step(_cell(rng, cfg), pieces, end, PeriodicCell.constant(_value(rng, cfg)))
    raise ValueError(f"unknown kind {kind!r}")


def _rational(rng, lo, hi, max_den=6) -> Fraction:
    d = rng.randint(1, max_den)
    return Fraction(rng.randint(lo * d, hi * d), d)


class Outcome(NamedTuple):
    ok: bool
    observed: object = None
    expected: object = None


def _s(x):
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, StepFn):
        return format_fn(x)
    if isinstance(x, (list, tuple, set, frozenset)):
        items = sorted(x) if isinstance(x, (set, frozenset)) else x
        return [_s(i) for i in items]
    if isinstance(x, dict):
        return {k: _s(v) for k, v in x.items()}
    if isinstance(x, Verdict):
        return x.value
    return x


def _spec_eval(spec, u):
    return evaluate(spec, u)


def _tol(*evals) -> Fraction:
    return 2 * max(e.error for e in evals)


def _disjoint_pair(cfg, index):
    u = gen_stepfn(cfg, 2 * index)
    v = gen_stepfn(cfg, 2 * index + 1)
    zero_of_u = sf.compose(lambda a: Fraction(int(a == 0)), u)
    return {"u": u, "v": sf.mul(v, zero_of_u)}


def _pair(cfg, index):
    return {"u": gen_stepfn(cfg, 2 * index), "v": gen_stepfn(cfg, 2 * index + 1)}


def _single(cfg, index, kind=None):
    return {"u": gen_stepfn(cfg, index, kind)}


def _ordered_pair(cfg, index):
    u = gen_stepfn(cfg, 2 * index)
    w = gen_stepfn(cfg, 2 * index + 1)
    return {"u": u, "v": sf.add(u, sf.absolute(w))}


def _as_set(u: StepFn) -> DefinableSet:
    return DefinableSet(sf.compose(lambda a: Fraction(int(a > 0)), u))


# ---- suites -------------------------------------------------------------

def _gen_filter(cfg, i, spec):
    return {"S": _as_set(gen_stepfn(cfg, 2 * i)).indicator, "T": _as_set(gen_stepfn(cfg, 2 * i + 1)).indicator}


def _check_filter(inp, spec):
    s, t = DefinableSet(inp["S"]), DefinableSet(inp["T"])
    for tag in (RIGHT, LEFT):
        vs, vc = membership(s, tag), membership(s.complement(), tag)
        flip = {Verdict.FORCED_IN: Verdict.FORCED_OUT, Verdict.FORCED_OUT: Verdict.FORCED_IN,
                Verdict.UNDETERMINED: Verdict.UNDETERMINED}
        if vc is not flip[vs]:
            return Outcome(False, {"side": tag.side.value, "S": vs, "complement": vc}, "dichotomy")
        if vs is Verdict.FORCED_IN and membership(t, tag) is Verdict.FORCED_IN:
            if membership(s & t, tag) is not Verdict.FORCED_IN:
                return Outcome(False, membership(s & t, tag), "F3: intersection ForcedIn")
        if vs is Verdict.FORCED_IN and membership(s | t, tag) is not Verdict.FORCED_IN:
            return Outcome(False, membership(s | t, tag), "F4: superset ForcedIn")
        if membership(DefinableSet.everything(), tag) is not Verdict.FORCED_IN:
            return Outcome(False, "R not ForcedIn", "F1")
        if membership(DefinableSet.empty(), tag) is not Verdict.FORCED_OUT:
            return Outcome(False, "empty set not ForcedOut", "F2")
    return Outcome(True)


def _check_distr(inp, spec):
    u, v = inp["u"], inp["v"]
    zero = sf.make_constant(0)
    if not sf.eq_ae(sf.mul(u, v), zero):
        return Outcome(False, "u*v != 0", "disjoint support")
    w = sf.add(u, v)
    if not sf.eq_ae(sf.join(w, zero), sf.add(sf.join(u, zero), sf.join(v, zero))):
        return Outcome(False, format_fn(sf.join(w, zero)), format_fn(sf.add(sf.join(u, zero), sf.join(v, zero))))
    if not sf.eq_ae(sf.meet(w, zero), sf.add(sf.meet(u, zero), sf.meet(v, zero))):
        return Outcome(False, format_fn(sf.meet(w, zero)), format_fn(sf.add(sf.meet(u, zero), sf.meet(v, zero))))
    return Outcome(True)


def _check_ddd(inp, spec):
    u, v = inp["u"], inp["v"]
    a, b, c = _spec_eval(spec, sf.add(u, v)), _spec_eval(spec, u), _spec_eval(spec, v)
    ok = abs(a.value - (b.value + c.value)) <= _tol(a, b, c)
    return Outcome(ok, _s(a.value), _s(b.value + c.value))


def _check_vanish(inp, spec):
    u = inp["u"]
    if not sf.has_compact_support(u):
        return Outcome(False, "not compactly supported", "compact support")
    e = _spec_eval(spec, u)
    return Outcome(abs(e.value) <= e.error, _s(e.value), "0")


def _gen_prolong(cfg, i, spec):
    u = gen_stepfn(cfg, i, "compact")
    # move the support into (0, n) for a natural n
    u = sf.translate(u, 1 - u.core_start)
    n = Fraction(int(u.core_end) + 1)
    return {"u": u, "n": n}


def _check_prolong(inp, spec):
    u, n = inp["u"], inp["n"]
    ut = sf.prolong_periodic(u, n)
    shifted = sf.translate(ut, n)
    if not sf.eq_ae(sf.mul(u, shifted), sf.make_constant(0)):
        return Outcome(False, "u and T_n(prolongation) overlap", "disjoint support")
    if not sf.eq_ae(sf.add(u, shifted), ut):
        return Outcome(False, format_fn(sf.add(u, shifted)), format_fn(ut))
    a, b, c = _spec_eval(spec, ut), _spec_eval(spec, shifted), _spec_eval(spec, u)
    if abs(a.value - b.value) > _tol(a, b):
        return Outcome(False, _s(b.value), _s(a.value))
    if abs(a.value - (c.value + b.value)) > _tol(a, b, c):
        return Outcome(False, _s(c.value + b.value), _s(a.value))
    return Outcome(abs(c.value) <= c.error, _s(c.value), "0")


def _check_tails(inp, spec):
    u = inp["u"]
    whole, r, l = _spec_eval(spec, u), _spec_eval(RightTail(spec), u), _spec_eval(LeftTail(spec), u)
    ok = abs(whole.value - (r.value + l.value)) <= _tol(whole, r, l)
    return Outcome(ok, _s(r.value + l.value), _s(whole.value))


def _gen_lin(cfg, i, spec):
    rng = _rng(cfg, "lin", i)
    return {**_pair(cfg, i), "alpha": _rational(rng, -3, 3), "beta": _rational(rng, -3, 3)}


def _check_blim_lin(inp, spec):
    u, v, a, b = inp["u"], inp["v"], inp["alpha"], inp["beta"]
    w = sf.add(sf.scale(a, u), sf.scale(b, v))
    for tag in (RIGHT, LEFT):
        lhs = banach_limit(w, tag)
        rhs = a * banach_limit(u, tag) + b * banach_limit(v, tag)
        if lhs != rhs:
            return Outcome(False, _s(lhs), _s(rhs))
    return Outcome(True)


def _check_blim_pos(inp, spec):
    u = sf.absolute(inp["u"])
    for tag in (RIGHT, LEFT):
        if banach_limit(u, tag) < 0:
            return Outcome(False, _s(banach_limit(u, tag)), ">= 0")
    return Outcome(True)


def _check_blim_ext(inp, spec):
    u = inp["u"]
    lr = has_limit_right(u)
    if lr is None:
        return Outcome(False, "right tail not constant", "settling sample")
    if banach_limit(u, RIGHT) != lr:
        return Outcome(False, _s(banach_limit(u, RIGHT)), _s(lr))
    ll = has_limit_left(u)
    if ll is not None and banach_limit(u, LEFT) != ll:
        return Outcome(False, _s(banach_limit(u, LEFT)), _s(ll))
    return Outcome(True)


def _gen_translate(cfg, i, spec):
    rng = _rng(cfg, "t", i)
    return {**_single(cfg, i), "t": _rational(rng, -10, 10)}


def _check_blim_translate(inp, spec):
    u, t = inp["u"], inp["t"]
    for tag in (RIGHT, LEFT):
        a, b = banach_limit(sf.translate(u, t), tag), banach_limit(u, tag)
        if a != b:
            return Outcome(False, _s(a), _s(b))
    return Outcome(True)


def _check_blim_norm(inp, spec):
    u = inp["u"]
    m = sf.ess_sup_norm(u)
    for tag in (RIGHT, LEFT):
        if abs(banach_limit(u, tag)) > m:
            return Outcome(False, _s(banach_limit(u, tag)), f"|.| <= {m}")
    return Outcome(True)


def _gen_x(cfg, i, spec):
    rng = _rng(cfg, "x", i)
    x = Fraction(0)
    while x == 0:
        x = _rational(rng, -50, 50)
    return {**_single(cfg, i), "x": x}


def _check_ces_pos(inp, spec):
    u, x = sf.absolute(inp["u"]), inp["x"]
    val = cesaro_eval(u, x)
    return Outcome(val >= 0, _s(val), ">= 0")


def _check_ces_bound(inp, spec):
    u, x = inp["u"], inp["x"]
    val = cesaro_eval(u, x)
    m = sf.ess_sup_norm(u)
    return Outcome(abs(val) <= m, _s(val), f"|.| <= {m}")


def _check_ces_limit(inp, spec):
    u = inp["u"]
    lr = has_limit_right(u)
    got = cesaro_limit_right(u).value
    return Outcome(lr is not None and got == lr, _s(got), _s(lr))


def _gen_cert(cfg, i, spec):
    rng = _rng(cfg, "cert", i)
    u = gen_stepfn(cfg, i)
    lim = cesaro_limit_right(u)
    x = max(1000 * u.right.period, lim.start + _rational(rng, 1, 100))
    return {"u": u, "x": x}


def _check_ces_cert(inp, spec):
    u, x = inp["u"], inp["x"]
    lim = cesaro_limit_right(u)
    gap = abs(cesaro_eval(u, x) - lim.value)
    bound = lim.bound(x)
    return Outcome(gap <= bound, _s(gap), f"<= {bound}")


def _gen_tele(cfg, i, spec):
    rng = _rng(cfg, "tele", i)
    return {**_single(cfg, i), "t": _rational(rng, -10, 10), "x": _rational(rng, 1, 200)}


def _check_ces_tele(inp, spec):
    u, t, x = inp["u"], inp["t"], inp["x"]
    gap = abs(cesaro_eval(u, x) - cesaro_eval(sf.translate(u, t), x))
    bound = 2 * abs(t) * sf.ess_sup_norm(u) / x
    return Outcome(gap <= bound, _s(gap), f"<= {bound}")


def _gen_ces_lin(cfg, i, spec):
    rng = _rng(cfg, "cl", i)
    x = Fraction(0)
    while x == 0:
        x = _rational(rng, -50, 50)
    return {**_gen_lin(cfg, i, spec), "x": x}


def _check_ces_lin(inp, spec):
    u, v, a, b, x = inp["u"], inp["v"], inp["alpha"], inp["beta"], inp["x"]
    lhs = cesaro_eval(sf.add(sf.scale(a, u), sf.scale(b, v)), x)
    rhs = a * cesaro_eval(u, x) + b * cesaro_eval(v, x)
    return Outcome(lhs == rhs, _s(lhs), _s(rhs))


def _check_identity(inp, spec):
    u, v = inp["u"], inp["v"]
    j, m = _spec_eval(spec, sf.join(u, v)), _spec_eval(spec, sf.meet(u, v))
    a, b = _spec_eval(spec, u), _spec_eval(spec, v)
    ok = abs((j.value + m.value) - (a.value + b.value)) <= _tol(j, m, a, b)
    return Outcome(ok, _s(j.value + m.value), _s(a.value + b.value))


def _check_monotone(inp, spec):
    u, v = inp["u"], inp["v"]
    if not sf.le_ae(u, v):
        return Outcome(False, "u <= v fails", "ordered pair")
    a, b = _spec_eval(spec, u), _spec_eval(spec, v)
    return Outcome(a.value <= b.value + _tol(a, b), _s(a.value), f"<= {b.value}")


def _lipschitz(spec) -> Optional[Fraction]:
    if isinstance(spec, BanachLimit):
        return spec.f.lipschitz
    if isinstance(spec, (RightTail, LeftTail)):
        return _lipschitz(spec.inner)
    ls = [t.f.lipschitz for t in spec.terms]
    return None if None in ls else sum(ls, Fraction(0))


def _continuous(spec) -> bool:
    if isinstance(spec, BanachLimit):
        return spec.f.continuous
    if isinstance(spec, (RightTail, LeftTail)):
        return _continuous(spec.inner)
    return all(t.f.continuous for t in spec.terms)


_CONT_STEPS = 12


def _check_continuity(inp, spec):
    u, v = inp["u"], inp["v"]
    lip = _lipschitz(spec)
    if lip is not None:
        a, b = _spec_eval(spec, u), _spec_eval(spec, v)
        bound = lip * sf.ess_sup_norm(sf.sub(u, v)) + _tol(a, b)
        return Outcome(abs(a.value - b.value) <= bound, _s(abs(a.value - b.value)), f"<= {bound}")
    if not _continuous(spec):
        raise ValueError("the continuity suite needs a spec with continuous value maps")
    # u_k = u + v / 2^k -> u in sup norm; the valuation gap must shrink with it
    base = _spec_eval(spec, u)
    gaps = []
    for k in range(_CONT_STEPS + 1):
        e = _spec_eval(spec, sf.add(u, sf.scale(Fraction(1, 2**k), v)))
        gaps.append(max(abs(e.value - base.value) - _tol(e, base), Fraction(0)))
    ok = gaps[-1] <= max(gaps) / 2 ** (_CONT_STEPS // 2)
    return Outcome(ok, _s(gaps), "gaps tending to 0")


def _gen_series(cfg, i, spec):
    rng = _rng(cfg, "series", i)
    return {**_single(cfg, i), "n": rng.randint(5, 30)}


def _check_series(inp, spec):
    u, n = inp["u"], inp["n"]
    ev = evaluate(geometric_series(n), u)
    lo, hi = ev.interval()
    truth = banach_limit(u)
    return Outcome(lo <= truth <= hi, [_s(lo), _s(hi)], _s(truth))


def _gen_ultra(cfg, i, spec):
    rng = _rng(cfg, "ultra", i)
    u = gen_stepfn(cfg, 2 * i)
    w = gen_stepfn(cfg, 2 * i + 1)
    return {"u": u, "v": sf.sub(sf.add(u, w), w), "probe": _value(rng, cfg) + Fraction(1, 3)}


_EPS = (Fraction(1), Fraction(1, 2), Fraction(1, 10), Fraction(1, 1000))


def _check_ultra(inp, spec):
    u, v, probe = inp["u"], inp["v"], inp["probe"]
    m = sf.ess_sup_norm(u)
    for tag in (RIGHT, LEFT):
        r = ultralimit(u, tag)
        if r != ultralimit(v, tag):
            return Outcome(False, repr(ultralimit(v, tag)), repr(r), )
        if isinstance(r, Determined):
            if abs(r.value) > m:
                return Outcome(False, _s(r.value), f"|.| <= {m}")
            for eps in _EPS:
                if membership(ball_preimage(u, r.value, eps), tag) is not Verdict.FORCED_IN:
                    return Outcome(False, f"eps={eps} ball not forced", "ForcedIn")
            continue
        cands = sorted(r.candidates)
        if any(abs(c) > m for c in cands):
            return Outcome(False, _s(cands), f"|.| <= {m}")
        gap = min(b - a for a, b in zip(cands, cands[1:]))
        for c in cands:
            verdict = membership(ball_preimage(u, c, gap / 2), tag)
            if verdict is not Verdict.UNDETERMINED:
                return Outcome(False, verdict, "Undetermined")
        if probe not in r.candidates:
            tails = [abs(probe - c) for c in cands]
            eps = min(tails) / 2
            if membership(ball_preimage(u, probe, eps), tag) is not Verdict.FORCED_OUT:
                return Outcome(False, f"probe {probe} not excluded", "ForcedOut")
    return Outcome(True)


@dataclass(frozen=True)
class _Suite:
    gen: Callable
    check: Callable
    uses_spec: bool = False


_SUITES = {
    "filter_laws": _Suite(_gen_filter, _check_filter),
    "distr": _Suite(lambda c, i, s: _disjoint_pair(c, i), _check_distr),
    "ddd": _Suite(lambda c, i, s: _disjoint_pair(c, i), _check_ddd, True),
    "vanish_compact_support": _Suite(lambda c, i, s: _single(c, i, "compact"), _check_vanish, True),
    "prolongation": _Suite(_gen_prolong, _check_prolong, True),
    "tail_decomposition": _Suite(lambda c, i, s: _single(c, i), _check_tails, True),
    "blim_linearity": _Suite(_gen_lin, _check_blim_lin),
    "blim_positivity": _Suite(lambda c, i, s: _single(c, i), _check_blim_pos),
    "blim_extension": _Suite(lambda c, i, s: _single(c, i, "settling"), _check_blim_ext),
    "blim_translation": _Suite(_gen_translate, _check_blim_translate),
    "blim_norm_bound": _Suite(lambda c, i, s: _single(c, i), _check_blim_norm),
    "cesaro_positivity": _Suite(_gen_x, _check_ces_pos),
    "cesaro_boundedness": _Suite(_gen_x, _check_ces_bound),
    "cesaro_linearity": _Suite(_gen_ces_lin, _check_ces_lin),
    "cesaro_limit": _Suite(lambda c, i, s: _single(c, i, "settling"), _check_ces_limit),
    "cesaro_certificate": _Suite(_gen_cert, _check_ces_cert),
    "cesaro_telescoping": _Suite(_gen_tele, _check_ces_tele),
    "valuation_identity": _Suite(lambda c, i, s: _pair(c, i), _check_identity, True),
    "monotonicity": _Suite(lambda c, i, s: _ordered_pair(c, i), _check_monotone, True),
    "continuity": _Suite(lambda c, i, s: _pair(c, i), _check_continuity, True),
    "series_interval": _Suite(_gen_series, _check_series),
    "ultralimit_laws": _Suite(_gen_ultra, _check_ultra),
}


def suite_ids() -> list:
    return list(_SUITES)


def _suite(suite_id: str) -> _Suite:
    try:
        return _SUITES[suite_id]
    except KeyError:
        raise ValueError(f"unknown suite_id {suite_id!r}; known: {', '.join(_SUITES)}") from None


def _encode(inputs: dict) -> dict:
    out = {}
    for k, v in inputs.items():
        if isinstance(v, StepFn):
            out[k] = {"fn": format_fn(v)}
        elif isinstance(v, Fraction):
            out[k] = {"rat": str(v)}
        else:
            out[k] = v
    return out


def _decode(payload: dict) -> dict:
    out = {}
    for k, v in payload.items():
        if isinstance(v, dict) and "fn" in v:
            out[k] = parse_fn(v["fn"])
        elif isinstance(v, dict) and "rat" in v:
            out[k] = Fraction(v["rat"])
        else:
            out[k] = v
    return out


def _spec_text(spec) -> Optional[str]:
    try:
        return format_spec(spec)
    except (ValueError, TypeError):
        return None


@dataclass
class Report:
    property_id: str
    samples_run: int
    passed: bool
    seed: int
    spec: Optional[str] = None
    counterexample: Optional[dict] = None
    elapsed: float = field(default=0.0, compare=False)

    def to_dict(self, elapsed: bool = True) -> dict:
        d = {"property_id": self.property_id, "samples_run": self.samples_run,
             "passed": self.passed, "seed": self.seed, "spec": self.spec,
             "counterexample": self.counterexample}
        if elapsed:
            d["elapsed_ms"] = round(self.elapsed * 1000, 3)
        return d

    def to_json(self, elapsed: bool = True) -> str:
        return json.dumps(self.to_dict(elapsed), sort_keys=True)


def check_sample(suite_id: str, inputs: dict, spec=None) -> Outcome:
    """Run one property on explicit inputs."""
    spec = BanachLimit(identity()) if spec is None else spec
    return _suite(suite_id).check(inputs, spec)


def _run_one(suite_id, suite, cfg, spec, index):
    inputs = None
    try:
        inputs = suite.gen(cfg, index, spec)
        out = suite.check(inputs, spec)
    except (ArithmeticError, sf.StepFnError, CertificateViolation) as exc:
        out = Outcome(False, f"{type(exc).__name__}: {exc}", "no error")
    if out.ok:
        return None
    return {"suite": suite_id, "index": index, "spec": _spec_text(spec),
            "inputs": _encode(inputs) if inputs is not None else None,
            "observed": _s(out.observed), "expected": _s(out.expected)}


def run_suite(suite_id: str, cfg: GenConfig, spec=None, workers: int = 1) -> Report:
    suite = _suite(suite_id)
    spec = BanachLimit(identity()) if spec is None else spec
    t0 = time.perf_counter()
    run = lambda i: _run_one(suite_id, suite, cfg, spec, i)  # noqa: E731
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            failures = list(pool.map(run, range(cfg.samples)))
    else:
        failures = [run(i) for i in range(cfg.samples)]
    first = next((f for f in failures if f is not None), None)
    return Report(suite_id, cfg.samples, first is None, cfg.seed,
                  _spec_text(spec) if suite.uses_spec else None, first,
                  time.perf_counter() - t0)


def run_all(cfg: GenConfig, spec=None, workers: int = 1) -> list:
    reports = []
    for sid, suite in _SUITES.items():
        if sid == "continuity" and spec is not None and not (_lipschitz(spec) is not None or _continuous(spec)):
            continue
        reports.append(run_suite(sid, cfg, spec, workers))
    return reports


def replay(counterexample: dict, spec=None) -> Outcome:
    """Re-run a failing sample from its serialized payload."""
    if spec is None:
        text = counterexample.get("spec")
        spec = parse_spec(text) if text else None
    return check_sample(counterexample["suite"], _decode(counterexample["inputs"]), spec)
