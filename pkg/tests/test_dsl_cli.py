import json
import subprocess
import sys
from fractions import Fraction as F

import jsonschema
import pytest
from hypothesis import given

from conftest import SQUARE, stepfns
from stepval import stepfn as sf
from stepval.checker import GenConfig, gen_stepfn
from stepval.cli import REPORT_SCHEMA, main
from stepval.dsl import ParseError, format_fn, format_spec, parse_ast, parse_fn, parse_spec
from stepval.valuation import geometric_series


def run(argv, capsys):
    code = main(argv)
    out = json.loads(capsys.readouterr().out)
    jsonschema.validate(out, REPORT_SCHEMA)
    return code, out


class TestParse:
    def test_examples(self):
        sq = parse_fn(SQUARE)
        assert sq(0) == 1 and sq(1) == 0 and sq(F(7, 2)) == 0
        assert sf.eq_ae(parse_fn("const(0)"), sf.make_constant(0))
        bumps = parse_fn("indicator([0,1) u [2,3))")
        assert [bumps(F(k, 2)) for k in range(-1, 8)] == [0, 1, 1, 0, 0, 1, 1, 0, 0]
        assert sf.has_compact_support(bumps)

    def test_operators(self):
        sq = parse_fn(SQUARE)
        assert sf.eq_ae(parse_fn(f"join({SQUARE}, translate({SQUARE}, 1))"), sf.make_constant(1))
        assert sf.eq_ae(parse_fn(f"meet({SQUARE}, translate({SQUARE}, 1))"), sf.make_constant(0))
        assert sf.eq_ae(parse_fn(f"add({SQUARE}, scale(-1, {SQUARE}))"), sf.make_constant(0))
        assert sf.eq_ae(parse_fn(f"scale(3/2, {SQUARE})"), sf.scale(F(3, 2), sq))

    def test_step_and_whitespace(self):
        u = parse_fn(" step { const( -1 ) ,\n [ [0,1/2)=3 ] , periodic(1; [0,1)=2) } ")
        assert u(-5) == -1 and u(F(1, 4)) == 3 and u(100) == 2

    def test_spans(self):
        text = f"add(const(1), {SQUARE})"
        node = parse_ast(text)
        assert (node.span.start, node.span.end) == (0, len(text))
        inner = node.args[1]
        assert text[inner.span.start:inner.span.end] == SQUARE

    @pytest.mark.parametrize("text, line, col", [
        ("const(1", 1, 8),
        ("periodic(2;\n [0,1)=1, [1,2)=0", 2, 18),
        ("cnst(1)", 1, 1),
        ("const(1/0)", 1, 9),
    ])
    def test_syntax_errors(self, text, line, col):
        with pytest.raises(ParseError) as err:
            parse_fn(text)
        assert (err.value.line, err.value.column) == (line, col)

    def test_expected_tokens(self):
        with pytest.raises(ParseError) as err:
            parse_fn("const(1")
        assert "')'" in err.value.expected
        assert err.value.kind == "syntax"

    @pytest.mark.parametrize("text", [
        "periodic(0; [0,1)=1)",
        "periodic(2; [0,1)=1, [3/2,2)=0)",
        "periodic(2; [0,1)=1)",
        "indicator([0,2) u [1,3))",
        "indicator([1,1))",
        "step{const(0), [[0,1)=1, [2,3)=1], const(0)}",
    ])
    def test_semantic_errors(self, text):
        with pytest.raises(ParseError) as err:
            parse_fn(text)
        assert err.value.kind == "semantic"

    @given(stepfns())
    def test_round_trip(self, u):
        text = format_fn(u)
        back = parse_fn(text)
        assert sf.eq_ae(back, u)
        assert format_fn(back) == text

    def test_round_trip_generated(self):
        cfg = GenConfig(seed=3, samples=200)
        for i in range(200):
            u = gen_stepfn(cfg, i)
            assert sf.eq_ae(parse_fn(format_fn(u)), u)

    @pytest.mark.parametrize("text", [
        "blim(id)", "blim(abs0, left)", "right(blim(clamp(-1,2)))", "left(blim(poly(1,0,-1/3)))",
        "series(id:1, poly(1/2):1/2; tail=1/4)",
    ])
    def test_spec_round_trip(self, text):
        assert format_spec(parse_spec(text)) == text

    def test_callable_series_has_no_text(self):
        with pytest.raises(ValueError):
            format_spec(geometric_series(3))


class TestCli:
    def test_blim(self, capsys):
        code, out = run(["blim", SQUARE], capsys)
        assert code == 0
        assert out["value"] == "1/2" and out["exact"] is True

    def test_ndim_caps(self, capsys):
        code, out = run(["ndim-ratio", "--dim", "1", "--x", "10", "--t", "1", "--method", "caps"], capsys)
        assert code == 0 and out["ratio"] == pytest.approx(0.95, abs=1e-15)

    def test_ndim_methods(self, capsys):
        _, caps = run(["ndim-ratio", "--dim", "2", "--x", "1", "--t", "0.6,0.8", "--method", "caps"], capsys)
        _, layers = run(["ndim-ratio", "--dim", "2", "--x", "1", "--t", "1,0", "--method", "layers"], capsys)
        _, mc = run(["ndim-ratio", "--dim", "2", "--x", "1", "--t", "1", "--method", "mc",
                     "--samples", "200000", "--seed", "5"], capsys)
        assert layers["ratio"] == pytest.approx(caps["ratio"], abs=1e-9)
        assert abs(mc["ratio"] - caps["ratio"]) <= 5 * mc["error_bound"]
        assert mc["seed"] == 5

    def test_check_vanish(self, capsys):
        code, out = run(["check", "--suite", "vanish_compact_support", "--samples", "500", "--seed", "7"], capsys)
        assert code == 0 and out["passed"] is True and out["counterexample"] is None

    def test_check_failure_exit_code(self, capsys):
        code, out = run(["check", "--suite", "monotonicity", "--samples", "200", "--seed", "1",
                         "--spec", "blim(poly(0,1))"], capsys)
        assert code == 1 and out["passed"] is False
        assert out["counterexample"]["suite"] == "monotonicity"

    def test_eval_cesaro_ultralimit_valuate(self, capsys):
        _, out = run(["eval", SQUARE, "--at", "100"], capsys)
        assert out["value"] == "1"
        _, out = run(["cesaro", SQUARE, "--at", "3"], capsys)
        assert out["value"] == "2/3"
        _, out = run(["cesaro", SQUARE, "--limit", "--bound-at", "1000000"], capsys)
        assert out["value"] == "1/2" and out["error_bound"] == "1/250000"
        _, out = run(["ultralimit", SQUARE], capsys)
        assert out["determined"] is False and out["candidates"] == ["0", "1"]
        _, out = run(["ultralimit", "step{periodic(2; [0,1)=1, [1,2)=0), [], const(3)}"], capsys)
        assert out["value"] == "3" and out["determined"] is True
        _, out = run(["valuate", "--spec", "series(id:1; tail=1/8)", SQUARE], capsys)
        assert out["value"] == "1/2" and out["error_bound"] == "1/8" and out["exact"] is False

    def test_dump_samples(self, capsys):
        _, out = run(["eval", "indicator([0,1) u [2,3))", "--dump-samples", "0", "4", "4"], capsys)
        assert out["samples"] == [["0", "1"], ["1", "0"], ["2", "1"], ["3", "0"]]

    @pytest.mark.parametrize("argv", [
        ["eval", "const(1", "--at", "0"],
        ["blim", "periodic(0; [0,1)=1)"],
        ["eval", "const(1)"],
        ["check", "--suite", "nope"],
        ["nonsense"],
        [],
        ["ndim-ratio", "--dim", "2", "--x", "1", "--t", "1,2,3"],
        ["eval", "const(1)", "--at", "0.5"],
    ])
    def test_usage_errors(self, argv, capsys):
        code, out = run(argv, capsys)
        assert code == 2 and "error" in out

    def test_parse_error_location(self, capsys):
        _, out = run(["blim", "periodic(2; [0,1)=1 [1,2)=0)"], capsys)
        assert out["error"]["kind"] == "syntax"
        assert out["error"]["column"] == 21

    def test_rationals_never_floats(self, capsys):
        _, out = run(["cesaro", SQUARE, "--at", "7/3"], capsys)
        assert isinstance(out["value"], str) and out["value"] == "4/7"

    def test_module_entry_point(self):
        res = subprocess.run([sys.executable, "-m", "stepval", "blim", SQUARE],
                             capture_output=True, text=True, check=True)
        assert json.loads(res.stdout)["value"] == "1/2"
