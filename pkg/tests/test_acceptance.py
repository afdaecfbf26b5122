"""Acceptance run: one test per criterion, each logging a PASS/FAIL line."""
import contextlib
import io
import json
import math
import time
from fractions import Fraction as F

import numpy as np
import pytest

from stepval import ndim
from stepval import stepfn as sf
from stepval.cesaro import cesaro_eval, cesaro_limit_right
from stepval.checker import GenConfig, gen_stepfn, run_suite
from stepval.cli import main
from stepval.dsl import parse_fn, parse_spec
from stepval.ultra import RIGHT, Undetermined, ultralimit
from stepval.valuation import banach_limit, evaluate, geometric_series

SEED = 7
SQUARE = "periodic(2; [0,1)=1, [1,2)=0)"


@contextlib.contextmanager
def criterion(log, number, title, budget_s=None):
    t0 = time.perf_counter()
    try:
        yield
    except BaseException as exc:
        msg = f"{type(exc).__name__}: {exc}".replace("\n", " ")[:160]
        log(f"criterion {number}: FAIL  {title} [{time.perf_counter() - t0:.2f}s] {msg}")
        raise
    elapsed = time.perf_counter() - t0
    if budget_s is not None and elapsed >= budget_s:
        log(f"criterion {number}: FAIL  {title} [{elapsed:.2f}s, budget {budget_s}s]")
        pytest.fail(f"criterion {number} took {elapsed:.2f}s (budget {budget_s}s)")
    log(f"criterion {number}: PASS  {title} [{elapsed:.2f}s]")


def _passed(report):
    assert report.passed, report.counterexample


def test_c01_square_wave(acceptance_log):
    with criterion(acceptance_log, 1, "square wave: Banach limit 1/2, ultralimit Undetermined({0,1})", 1.0):
        u = parse_fn(SQUARE)
        assert banach_limit(u, RIGHT) == F(1, 2)
        assert ultralimit(u, RIGHT) == Undetermined(frozenset({F(0), F(1)}))


def test_c02_valuation_identity(acceptance_log):
    with criterion(acceptance_log, 2, "valuation identity, blim(id), 1000 pairs", 10.0):
        _passed(run_suite("valuation_identity", GenConfig(seed=SEED, samples=1000), parse_spec("blim(id)")))


def test_c03_translation_invariance(acceptance_log):
    with criterion(acceptance_log, 3, "translation invariance, 500 (u, t)", 10.0):
        _passed(run_suite("blim_translation", GenConfig(seed=SEED, samples=500)))


def test_c04_compact_support(acceptance_log):
    with criterion(acceptance_log, 4, "vanishing on compact support + prolongation identity, 500 samples", 10.0):
        cfg = GenConfig(seed=SEED, samples=500)
        _passed(run_suite("vanish_compact_support", cfg))
        _passed(run_suite("prolongation", cfg))


def test_c05_limit_extension(acceptance_log):
    with criterion(acceptance_log, 5, "limit extension on 500 settling samples"):
        _passed(run_suite("blim_extension", GenConfig(seed=SEED, samples=500)))


def test_c06_norm_bound(acceptance_log):
    with criterion(acceptance_log, 6, "|Blim u| <= ||u||_inf on 1000 samples"):
        _passed(run_suite("blim_norm_bound", GenConfig(seed=SEED, samples=1000)))


def test_c07_monotone_builder(acceptance_log):
    with criterion(acceptance_log, 7, "monotone clamp map, 300 ordered pairs"):
        _passed(run_suite("monotonicity", GenConfig(seed=SEED, samples=300), parse_spec("blim(clamp(-1,2))")))


def test_c08_series(acceptance_log):
    with criterion(acceptance_log, 8, "series x/2^i, 20 terms, certified interval contains 1/2"):
        u = parse_fn(SQUARE)
        ev = evaluate(geometric_series(20), u)
        lo, hi = ev.interval()
        assert hi - lo == 2 * F(1, 2**20)
        assert lo <= F(1, 2) <= hi
        _passed(run_suite("series_interval", GenConfig(seed=SEED, samples=200)))


def test_c09_cesaro_certificate(acceptance_log):
    with criterion(acceptance_log, 9, "Cesaro certificate at x = 1000 * period, 200 samples"):
        cfg = GenConfig(seed=SEED, samples=200)
        for i in range(cfg.samples):
            u = gen_stepfn(cfg, i)
            lim = cesaro_limit_right(u)
            x = 1000 * u.right.period
            assert x >= lim.start
            assert abs(cesaro_eval(u, x) - lim.value) <= lim.bound(x), (i, str(u))


def test_c10_ndim_cross_method(acceptance_log):
    with criterion(acceptance_log, 10, "overlap ratio: caps vs layers grid, 1-D formula, x = 1e4", 60.0):
        worst = 0.0
        for dim in (2, 3, 4):
            for x in (1.0, 5.0, 20.0):
                for t in (0.5, 1.0):
                    a = ndim.overlap_ratio_caps(dim, x, t)
                    b = ndim.overlap_ratio_layers(dim, x, t)
                    worst = max(worst, abs(a - b))
        assert worst <= 1e-6, worst
        for x in (1.0, 5.0, 20.0, 1e4):
            for t in (0.5, 1.0):
                assert abs(ndim.overlap_ratio_caps(1, x, t) - (2 * x - t) / (2 * x)) <= 1e-12
        for dim in (1, 2, 3, 4):
            assert abs(ndim.overlap_ratio_caps(dim, 1e4, 1.0) - 1) < 1e-3
            if dim > 1:
                assert abs(ndim.overlap_ratio_layers(dim, 1e4, 1.0) - 1) < 1e-3


def _field(rng, dim):
    kind = rng.integers(4)
    if kind == 0:
        normal = rng.standard_normal(dim)
        normal /= np.linalg.norm(normal)
        off = rng.uniform(-2, 2)
        return ndim.SampledField(dim, lambda p: (p @ normal > off).astype(float), 1.0)
    if kind == 1:
        w = rng.uniform(0.2, 2.0, dim)
        return ndim.SampledField(dim, lambda p: np.sign(np.prod(np.sin(p * w), axis=1)), 1.0)
    if kind == 2:
        c, w = rng.uniform(0.5, 3), rng.standard_normal(dim)
        return ndim.SampledField(dim, lambda p: c * np.cos(p @ w), c)
    center, r = rng.uniform(-3, 3, dim), rng.uniform(1, 5)
    return ndim.SampledField(dim, lambda p: np.where(np.linalg.norm(p - center, axis=1) < r, 1.0, -0.5), 1.0)


def test_c11_ndim_translation_bound(acceptance_log):
    with criterion(acceptance_log, 11, "ball average translation bound, 20 (u, t, x)", 60.0):
        rng = np.random.Generator(np.random.Philox(SEED))
        for k in range(20):
            dim = int(rng.integers(1, 5))
            u = _field(rng, dim)
            x = float(rng.uniform(1, 50))
            direction = rng.standard_normal(dim)
            t = direction / np.linalg.norm(direction) * rng.uniform(0.05, 1.0) * x
            a, sa = ndim.ball_cesaro(u.translate(t), x, budget=200_000, seed=SEED + k)
            b, sb = ndim.ball_cesaro(u, x, budget=200_000, seed=SEED + k)
            bound = 2 * u.bound * ndim.symdiff_ratio(dim, x, t) + 3 * math.hypot(sa, sb)
            assert abs(a - b) <= bound, (k, dim, x, abs(a - b), bound)


def _cli(argv):
    buf = io.StringIO()
    with contextlib.redirect_stdout(buf):
        code = main(argv)
    out = json.loads(buf.getvalue())
    out.pop("elapsed_ms")
    return code, json.dumps(out, sort_keys=True)


def test_c12_determinism(acceptance_log):
    with criterion(acceptance_log, 12, "criterion 2 twice: byte-identical JSON at workers 1 and 4"):
        cfg = GenConfig(seed=SEED, samples=1000)
        runs = [run_suite("valuation_identity", cfg, None, w).to_json(elapsed=False) for w in (1, 1, 4)]
        assert len(set(runs)) == 1
        argv = ["check", "--suite", "valuation_identity", "--samples", "1000", "--seed", str(SEED)]
        cli = [_cli(argv + ["--workers", w]) for w in ("1", "1", "4")]
        assert all(code == 0 for code, _ in cli)
        assert len({text for _, text in cli}) == 1
