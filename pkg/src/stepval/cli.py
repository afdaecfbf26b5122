"""Command line front-end.  Every command prints one JSON object.

Exit status: 0 on success, 1 when a property check fails, 2 on usage,
parse or evaluation errors.
"""
from __future__ import annotations

import argparse
import json
import sys
import time
from fractions import Fraction

from stepval import checker, ndim
from stepval import stepfn as sf
from stepval.cesaro import cesaro_eval, cesaro_limit_left, cesaro_limit_right
from stepval.dsl import ParseError, format_fn, format_spec, parse_fn, parse_rational, parse_spec
from stepval.ultra import LEFT, RIGHT, Determined, ultralimit
from stepval.valuation import banach_limit, evaluate

_RAT = {"type": "string", "pattern": r"^-?\d+(/\d+)?$"}

REPORT_SCHEMA = {
    "$schema": "http://json-schema.org/draft-07/schema#",
    "title": "stepval command output",
    "type": "object",
    "required": ["command", "inputs", "elapsed_ms"],
    "properties": {
        "command": {"type": ["string", "null"]},
        "inputs": {"type": "object"},
        "value": {"anyOf": [_RAT, {"type": "null"}]},
        "ratio": {"type": "number"},
        "passed": {"type": "boolean"},
        "exact": {"type": "boolean"},
        "error_bound": {"anyOf": [_RAT, {"type": "number"}, {"type": "null"}]},
        "counterexample": {"anyOf": [{"type": "object"}, {"type": "null"}]},
        "seed": {"type": "integer"},
        "elapsed_ms": {"type": "number"},
        "candidates": {"type": "array", "items": _RAT},
        "determined": {"type": "boolean"},
        "samples": {"type": "array", "items": {"type": "array", "items": _RAT, "minItems": 2, "maxItems": 2}},
        "certificate": {"type": "object"},
        "reports": {"type": "array", "items": {"type": "object"}},
        "error": {
            "type": "object",
            "required": ["kind", "message"],
            "properties": {
                "kind": {"type": "string"},
                "message": {"type": "string"},
                "line": {"type": "integer"},
                "column": {"type": "integer"},
                "expected": {"type": "array", "items": {"type": "string"}},
            },
        },
    },
    "oneOf": [
        {"required": ["value"]}, {"required": ["ratio"]}, {"required": ["passed"]}, {"required": ["error"]},
    ],
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _rat(text: str) -> Fraction:
    return parse_rational(text)


def _side(name: str):
    return LEFT if name == "left" else RIGHT


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="stepval", description="Exact Banach-limit valuations on step functions")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    e = sub.add_parser("eval", help="evaluate a function at a point")
    e.add_argument("fn")
    g = e.add_mutually_exclusive_group(required=True)
    g.add_argument("--at")
    g.add_argument("--dump-samples", nargs=3, metavar=("LO", "HI", "N"),
                   help="emit (x, u(x)) pairs on N equally spaced points of [LO, HI)")

    c = sub.add_parser("cesaro", help="Cesàro average at a point or its limit")
    c.add_argument("fn")
    g = c.add_mutually_exclusive_group(required=True)
    g.add_argument("--at")
    g.add_argument("--limit", action="store_true")
    c.add_argument("--side", choices=("right", "left"), default="right")
    c.add_argument("--bound-at", help="evaluate the convergence certificate at this x")

    b = sub.add_parser("blim", help="Banach limit")
    b.add_argument("fn")
    b.add_argument("--side", choices=("right", "left"), default="right")

    u = sub.add_parser("ultralimit", help="forced ultralimit, or the candidate values")
    u.add_argument("fn")
    u.add_argument("--side", choices=("right", "left"), default="right")

    v = sub.add_parser("valuate", help="evaluate a valuation spec")
    v.add_argument("--spec", required=True)
    v.add_argument("fn")

    k = sub.add_parser("check", help="run property suites")
    k.add_argument("--suite", required=True)
    k.add_argument("--samples", type=int, default=100)
    k.add_argument("--seed", type=int, default=0)
    k.add_argument("--spec")
    k.add_argument("--workers", type=int, default=1)

    n = sub.add_parser("ndim-ratio", help="ball overlap ratio |B_x(t) & B_x(0)| / |B_x(0)|")
    n.add_argument("--dim", type=int, required=True)
    n.add_argument("--x", type=float, required=True)
    n.add_argument("--t", required=True, help='comma separated vector, e.g. "1,0"')
    n.add_argument("--method", choices=("caps", "layers", "mc"), default="caps")
    n.add_argument("--samples", type=int, default=1_000_000)
    n.add_argument("--seed", type=int, default=0)
    return p


def _vector(text: str, dim: int) -> list:
    vals = [float(s) for s in text.split(",") if s.strip()]
    if len(vals) == 1 and dim > 1:
        vals += [0.0] * (dim - 1)
    if len(vals) != dim:
        raise UsageError(f"--t needs {dim} components")
    return vals


def _run(args) -> tuple:
    cmd = args.command
    if cmd == "eval":
        u = parse_fn(args.fn)
        if args.at is not None:
            x = _rat(args.at)
            return {"inputs": {"fn": format_fn(u), "at": str(x)}, "value": str(sf.evaluate(u, x)), "exact": True}, 0
        lo, hi, count = _rat(args.dump_samples[0]), _rat(args.dump_samples[1]), int(args.dump_samples[2])
        if count < 1 or hi <= lo:
            raise UsageError("--dump-samples needs LO < HI and N >= 1")
        xs = [lo + (hi - lo) * i / count for i in range(count)]
        pairs = [[str(x), str(sf.evaluate(u, x))] for x in xs]
        first = pairs[0][1]
        return {"inputs": {"fn": format_fn(u)}, "value": first, "samples": pairs, "exact": True}, 0
    if cmd == "cesaro":
        u = parse_fn(args.fn)
        if args.at is not None:
            x = _rat(args.at)
            return {"inputs": {"fn": format_fn(u), "at": str(x)}, "value": str(cesaro_eval(u, x)), "exact": True}, 0
        lim = (cesaro_limit_left if args.side == "left" else cesaro_limit_right)(u)
        cert = {"excess": str(lim.excess), "norm": str(lim.norm), "period": str(lim.period),
                "valid_from": str(lim.start)}
        bound = str(lim.bound(_rat(args.bound_at))) if args.bound_at else None
        return {"inputs": {"fn": format_fn(u), "side": args.side}, "value": str(lim.value), "exact": True,
                "error_bound": bound, "certificate": cert}, 0
    if cmd == "blim":
        u = parse_fn(args.fn)
        return {"inputs": {"fn": format_fn(u), "side": args.side},
                "value": str(banach_limit(u, _side(args.side))), "exact": True}, 0
    if cmd == "ultralimit":
        u = parse_fn(args.fn)
        r = ultralimit(u, _side(args.side))
        out = {"inputs": {"fn": format_fn(u), "side": args.side}, "exact": True}
        if isinstance(r, Determined):
            out.update(value=str(r.value), determined=True, candidates=[str(r.value)])
        else:
            out.update(value=None, determined=False, candidates=[str(c) for c in sorted(r.candidates)])
        return out, 0
    if cmd == "valuate":
        spec = parse_spec(args.spec)
        u = parse_fn(args.fn)
        ev = evaluate(spec, u)
        return {"inputs": {"fn": format_fn(u), "spec": format_spec(spec)}, "value": str(ev.value),
                "exact": ev.error == 0, "error_bound": str(ev.error)}, 0
    if cmd == "check":
        spec = parse_spec(args.spec) if args.spec else None
        cfg = checker.GenConfig(seed=args.seed, samples=args.samples)
        if args.suite == "all":
            reports = checker.run_all(cfg, spec, args.workers)
        else:
            if args.suite not in checker.suite_ids():
                raise UsageError(f"unknown suite {args.suite!r}")
            reports = [checker.run_suite(args.suite, cfg, spec, args.workers)]
        passed = all(r.passed for r in reports)
        first = next((r.counterexample for r in reports if not r.passed), None)
        return {"inputs": {"suite": args.suite, "samples": args.samples,
                           "spec": format_spec(spec) if spec else "blim(id)"},
                "passed": passed, "exact": True, "counterexample": first, "seed": args.seed,
                "reports": [r.to_dict(elapsed=False) for r in reports]}, 0 if passed else 1
    if cmd == "ndim-ratio":
        t = _vector(args.t, args.dim)
        inputs = {"dim": args.dim, "x": args.x, "t": t, "method": args.method}
        if args.method == "caps":
            return {"inputs": inputs, "ratio": ndim.overlap_ratio_caps(args.dim, args.x, t), "exact": False}, 0
        if args.method == "layers":
            return {"inputs": inputs, "ratio": ndim.overlap_ratio_layers(args.dim, args.x, t), "exact": False}, 0
        ratio, se = ndim.overlap_ratio_mc(args.dim, args.x, t, args.samples, args.seed)
        return {"inputs": {**inputs, "samples": args.samples}, "ratio": ratio, "error_bound": se,
                "exact": False, "seed": args.seed}, 0
    raise UsageError(f"unknown command {cmd}")


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    t0 = time.perf_counter()
    command = argv[0] if argv else None
    try:
        args = build_parser().parse_args(argv)
        out, code = _run(args)
        out = {"command": args.command, **out}
    except ParseError as exc:
        out = {"command": command, "inputs": {"argv": list(argv)},
               "error": {"kind": exc.kind, "message": str(exc), "line": exc.line,
                         "column": exc.column, "expected": list(exc.expected)}}
        code = 2
    except (UsageError, ValueError, ArithmeticError) as exc:
        out = {"command": command, "inputs": {"argv": list(argv)},
               "error": {"kind": type(exc).__name__, "message": str(exc)}}
        code = 2
    out["elapsed_ms"] = round((time.perf_counter() - t0) * 1000, 3)
    print(json.dumps(out, sort_keys=True))
    return code


if __name__ == "__main__":
    sys.exit(main())
