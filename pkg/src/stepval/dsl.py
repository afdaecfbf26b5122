"""Text syntax for step functions and valuation specs.

Functions::

    fn     := "const" "(" rat ")"
            | "indicator" "(" iv ("u" iv)* ")"
            | "periodic" "(" rat ";" pieces ")"
            | "step" "{" tail "," "[" [pieces] "]" "," tail "}"
            | ("add" | "join" | "meet") "(" fn "," fn ")"
            | "scale" "(" rat "," fn ")"
            | "translate" "(" fn "," rat ")"
    tail   := "const" "(" rat ")" | "periodic" "(" rat ";" pieces ")"
    pieces := piece ("," piece)*
    piece  := iv "=" rat
    iv     := "[" rat "," rat ")"
    rat    := ["-"] digits ["/" digits]

Valuation specs::

    spec   := "blim" "(" map ["," ("right" | "left")] ")"
            | "right" "(" spec ")" | "left" "(" spec ")"
            | "series" "(" map ":" rat ("," map ":" rat)* ";" "tail" "=" rat ")"
    map    := "id" | "abs0" | "clamp" "(" rat "," rat ")" | "poly" "(" rat ("," rat)* ")"

In ``step{...}`` the left tail is anchored at the first core breakpoint and
the right tail at the end of the last core piece; with an empty core both
are anchored at 0.  Periodic cells and tails start at 0.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from stepval import stepfn as sf
from stepval.stepfn import PeriodicCell, StepFn, StepFnError
from stepval.ultra import LEFT, RIGHT, Side, UltrafilterTag
from stepval import valuation as va

__all__ = ["ParseError", "Span", "Node", "parse_ast", "parse_fn", "build_fn", "format_fn",
           "parse_spec", "format_spec", "format_rational", "parse_rational"]


class ParseError(ValueError):
    def __init__(self, message: str, text: str, offset: int, expected=(), kind: str = "syntax"):
        self.line = text.count("\n", 0, offset) + 1
        self.column = offset - (text.rfind("\n", 0, offset) + 1) + 1
        self.offset = offset
        self.expected = tuple(sorted(set(expected)))
        self.kind = kind
        where = f"line {self.line}, column {self.column}"
        hint = f" (expected one of: {', '.join(self.expected)})" if self.expected else ""
        super().__init__(f"{kind} error at {where}: {message}{hint}")


@dataclass(frozen=True)
class Span:
    start: int
    end: int


@dataclass(frozen=True)
class Node:
    """Parse-tree node.  ``args`` holds child nodes, rationals, or tuples of them."""

    kind: str
    args: tuple
    span: Span


_TOKEN = re.compile(r"\s*(?:(?P<num>\d+)|(?P<name>[A-Za-z_][A-Za-z_0-9]*)|(?P<sym>[()\[\]{},;=/:\-]))")


@dataclass(frozen=True)
class _Tok:
    kind: str
    text: str
    start: int
    end: int


def _tokenize(text: str) -> list:
    toks, pos = [], 0
    while True:
        m = _TOKEN.match(text, pos)
        if not m:
            rest = text[pos:]
            if rest.strip() == "":
                break
            off = pos + len(rest) - len(rest.lstrip())
            raise ParseError(f"unexpected character {text[off]!r}", text, off)
        kind = m.lastgroup
        toks.append(_Tok(kind, m.group(kind), m.start(kind), m.end()))
        pos = m.end()
    toks.append(_Tok("eof", "", len(text), len(text)))
    return toks


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.toks = _tokenize(text)
        self.i = 0

    @property
    def tok(self) -> _Tok:
        return self.toks[self.i]

    def fail(self, expected, message=None):
        t = self.tok
        got = "end of input" if t.kind == "eof" else repr(t.text)
        raise ParseError(message or f"unexpected {got}", self.text, t.start, expected)

    def accept(self, text: str) -> Optional[_Tok]:
        if self.tok.kind in ("sym", "name") and self.tok.text == text:
            t = self.tok
            self.i += 1
            return t
        return None

    def expect(self, text: str) -> _Tok:
        t = self.accept(text)
        if t is None:
            self.fail([repr(text)])
        return t

    def end(self):
        if self.tok.kind != "eof":
            self.fail(["end of input"])

    def rat(self) -> Fraction:
        neg = self.accept("-") is not None
        if self.tok.kind != "num":
            self.fail(["number"])
        num = int(self.tok.text)
        self.i += 1
        den = 1
        if self.accept("/"):
            if self.tok.kind != "num":
                self.fail(["number"])
            den = int(self.tok.text)
            if den == 0:
                raise ParseError("zero denominator", self.text, self.tok.start, kind="semantic")
            self.i += 1
        q = Fraction(num, den)
        return -q if neg else q

    def interval(self):
        start = self.expect("[").start
        a = self.rat()
        self.expect(",")
        b = self.rat()
        end = self.expect(")").end
        if a >= b:
            raise ParseError(f"interval [{a},{b}) must have a < b", self.text, start, kind="semantic")
        return Node("iv", (a, b), Span(start, end))

    def pieces(self):
        out = []
        while True:
            iv = self.interval()
            self.expect("=")
            v = self.rat()
            out.append(Node("piece", (iv.args[0], iv.args[1], v), Span(iv.span.start, self.toks[self.i - 1].end)))
            if not self.accept(","):
                return tuple(out)
            if self.tok.text != "[":
                # a comma that is not followed by a piece belongs to the caller
                self.i -= 1
                return tuple(out)

    FN_HEADS = ("const", "indicator", "periodic", "step", "add", "join", "meet", "scale", "translate")

    def fn(self) -> Node:
        t = self.tok
        if t.kind != "name" or t.text not in self.FN_HEADS:
            self.fail([repr(h) for h in self.FN_HEADS])
        self.i += 1
        head = t.text
        if head == "const":
            self.expect("(")
            c = self.rat()
            args = (c,)
        elif head == "indicator":
            self.expect("(")
            ivs = [self.interval()]
            while self.accept("u"):
                ivs.append(self.interval())
            args = tuple(ivs)
        elif head == "periodic":
            self.expect("(")
            p = self.rat()
            self.expect(";")
            args = (p, self.pieces())
        elif head == "step":
            self.expect("{")
            left = self.tail()
            self.expect(",")
            self.expect("[")
            core = () if self.tok.text == "]" else self.pieces()
            self.expect("]")
            self.expect(",")
            right = self.tail()
            end = self.expect("}").end
            return Node("step", (left, core, right), Span(t.start, end))
        elif head in ("add", "join", "meet"):
            self.expect("(")
            a = self.fn()
            self.expect(",")
            args = (a, self.fn())
        elif head == "scale":
            self.expect("(")
            c = self.rat()
            self.expect(",")
            args = (c, self.fn())
        else:
            self.expect("(")
            a = self.fn()
            self.expect(",")
            args = (a, self.rat())
        end = self.expect(")").end
        return Node(head, args, Span(t.start, end))

    def tail(self) -> Node:
        t = self.tok
        if t.text == "const":
            self.i += 1
            self.expect("(")
            c = self.rat()
            return Node("const", (c,), Span(t.start, self.expect(")").end))
        if t.text == "periodic":
            self.i += 1
            self.expect("(")
            p = self.rat()
            self.expect(";")
            pcs = self.pieces()
            return Node("periodic", (p, pcs), Span(t.start, self.expect(")").end))
        self.fail(["'const'", "'periodic'"])

    MAP_HEADS = ("id", "abs0", "clamp", "poly")

    def value_map(self) -> va.ValueMap:
        t = self.tok
        if t.text == "id":
            self.i += 1
            return va.identity()
        if t.text == "abs0":
            self.i += 1
            return va.abs0()
        if t.text == "clamp":
            self.i += 1
            self.expect("(")
            lo = self.rat()
            self.expect(",")
            hi = self.rat()
            self.expect(")")
            if lo > hi:
                raise ParseError("clamp needs lo <= hi", self.text, t.start, kind="semantic")
            return va.clamp(lo, hi)
        if t.text == "poly":
            self.i += 1
            self.expect("(")
            cs = [self.rat()]
            while self.accept(","):
                cs.append(self.rat())
            self.expect(")")
            return va.poly(*cs)
        self.fail([repr(h) for h in self.MAP_HEADS])

    def spec(self):
        t = self.tok
        if t.text == "blim":
            self.i += 1
            self.expect("(")
            f = self.value_map()
            tag = RIGHT
            if self.accept(","):
                if self.accept("left"):
                    tag = LEFT
                elif not self.accept("right"):
                    self.fail(["'right'", "'left'"])
            self.expect(")")
            return va.BanachLimit(f, tag)
        if t.text in ("right", "left"):
            self.i += 1
            self.expect("(")
            inner = self.spec()
            self.expect(")")
            return va.RightTail(inner) if t.text == "right" else va.LeftTail(inner)
        if t.text == "series":
            self.i += 1
            self.expect("(")
            terms = []
            while True:
                f = self.value_map()
                self.expect(":")
                b = self.rat()
                terms.append(va.SeriesTerm(f, UltrafilterTag(Side.RIGHT, f"U{len(terms) + 1}"), b))
                if not self.accept(","):
                    break
            self.expect(";")
            self.expect("tail")
            self.expect("=")
            tail = self.rat()
            self.expect(")")
            return va.Series(tuple(terms), tail)
        self.fail(["'blim'", "'right'", "'left'", "'series'"])


def parse_ast(text: str) -> Node:
    p = _Parser(text)
    node = p.fn()
    p.end()
    return node


def _semantic(text: str, node: Node, message: str):
    return ParseError(message, text, node.span.start, kind="semantic")


def _check_contiguous(text, pieces, start=None, end=None):
    if start is not None and pieces[0].args[0] != start:
        raise _semantic(text, pieces[0], f"pieces must start at {start}")
    for a, b in zip(pieces, pieces[1:]):
        if b.args[0] < a.args[1]:
            raise _semantic(text, b, "breakpoints must be strictly increasing")
        if b.args[0] != a.args[1]:
            raise _semantic(text, b, "pieces must be contiguous")
    if end is not None and pieces[-1].args[1] != end:
        raise _semantic(text, pieces[-1], f"pieces must end at the period {end}")


def _cell(text: str, node: Node) -> PeriodicCell:
    if node.kind == "const":
        return PeriodicCell.constant(node.args[0])
    period, pieces = node.args
    if period <= 0:
        raise _semantic(text, node, "period must be positive")
    _check_contiguous(text, pieces, Fraction(0), period)
    return PeriodicCell.from_pieces(period, [(p.args[0], p.args[2]) for p in pieces])


def build_fn(node: Node, text: str = "") -> StepFn:
    k, a = node.kind, node.args
    try:
        if k == "const":
            return sf.make_constant(a[0])
        if k == "indicator":
            return sf.make_indicator([iv.args for iv in a])
        if k == "periodic":
            return sf.make_periodic(_cell(text, node))
        if k == "step":
            left, core, right = a
            if core:
                _check_contiguous(text, core)
                pieces = [(p.args[0], p.args[2]) for p in core]
                return sf.make_step(_cell(text, left), pieces, core[-1].args[1], _cell(text, right))
            return sf.make_step(_cell(text, left), [], 0, _cell(text, right))
        if k in ("add", "join", "meet"):
            op = {"add": sf.add, "join": sf.join, "meet": sf.meet}[k]
            return op(build_fn(a[0], text), build_fn(a[1], text))
        if k == "scale":
            return sf.scale(a[0], build_fn(a[1], text))
        if k == "translate":
            return sf.translate(build_fn(a[0], text), a[1])
    except ParseError:
        raise
    except StepFnError as exc:
        raise _semantic(text, node, str(exc)) from exc
    raise ValueError(f"unknown node kind {k}")


def parse_fn(text: str) -> StepFn:
    return build_fn(parse_ast(text), text)


def parse_spec(text: str):
    p = _Parser(text)
    spec = p.spec()
    p.end()
    return spec


def parse_rational(text: str) -> Fraction:
    p = _Parser(text)
    q = p.rat()
    p.end()
    return q


def format_rational(q) -> str:
    return str(sf.as_rational(q))


def _pieces_text(pieces, end) -> str:
    ends = [b for b, _ in pieces[1:]] + [end]
    r = format_rational
    return ", ".join(f"[{r(b)},{r(e)})={r(v)}" for (b, v), e in zip(pieces, ends))


def _tail_text(cell: PeriodicCell) -> str:
    if cell.is_constant():
        return f"const({format_rational(cell.values[0])})"
    return f"periodic({format_rational(cell.period)}; {_pieces_text(cell.pieces, cell.period)})"


def format_fn(u: StepFn) -> str:
    """Canonical text; ``parse_fn(format_fn(u))`` equals ``u`` almost everywhere."""
    if not u.core:
        a = u.core_start
        lc, rc = u.left, u.right
        if lc.is_constant() and rc.is_constant() and lc.values == rc.values:
            return f"const({format_rational(lc.values[0])})"
        if lc == rc:
            return _tail_text(lc.rotate(-a))
        if a != 0:
            pieces = rc.unroll(a, a, a + rc.period)
            return f"step{{{_tail_text(lc)}, [{_pieces_text(pieces, a + rc.period)}], {_tail_text(rc)}}}"
        return f"step{{{_tail_text(lc)}, [], {_tail_text(rc)}}}"
    return f"step{{{_tail_text(u.left)}, [{_pieces_text(list(u.core), u.core_end)}], {_tail_text(u.right)}}}"


def _side_suffix(tag: UltrafilterTag) -> str:
    return ", left" if tag.side is Side.LEFT else ""


def format_spec(spec) -> str:
    if isinstance(spec, va.BanachLimit):
        return f"blim({spec.f.name}{_side_suffix(spec.tag)})"
    if isinstance(spec, va.RightTail):
        return f"right({format_spec(spec.inner)})"
    if isinstance(spec, va.LeftTail):
        return f"left({format_spec(spec.inner)})"
    if isinstance(spec, va.Series):
        if callable(spec.tail_bound) or any(t.bound is None for t in spec.terms):
            raise ValueError("only series with constant bounds have a text form")
        terms = ", ".join(f"{t.f.name}:{format_rational(t.bound)}" for t in spec.terms)
        return f"series({terms}; tail={format_rational(spec.tail_bound)})"
    raise TypeError(f"unknown valuation spec {spec!r}")
