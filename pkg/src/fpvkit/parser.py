"""Recursive-descent parser for temporal properties with SVA sugar.

Accepted surface, loosest binding first::

    a -> b | a |-> b | a |=> b | a implies b     (right associative)
    a || b | a or b
    a && b | a and b | a ##1 b                    (##1 means a && X b)
    a U b | a s_until b | a R b                   (right associative)
    !a  X a  nexttime a  ##1 a  F a  s_eventually a  G a  always a
    $past(e)  $stable(e)  (t1 op t2)  name  name[i]  true  false

Comparisons take integer terms built from names, literals,
``$past(name)``, ``+`` and ``-``.  ``===``/``!==`` read as ``==``/``!=``.
"""
from __future__ import annotations

import re
from dataclasses import dataclass

from .formula import (
    ALWAYS, PAST, STABLE, TEMPORAL, And, Always, Arith, Atom, Cmp, Const, Eventually,
    F_, Formula, Implies, Next, Not, Or, Past, PastVar, Release, Stable, T, Term,
    Until, Var,
)


class ParseError(ValueError):
    def __init__(self, message: str, line: int = 1, column: int = 1, token: str = ""):
        self.message = message
        self.line = line
        self.column = column
        self.token = token
        super().__init__(f'syntax error near "{token}" (line {line}, column {column}): {message}')


@dataclass(frozen=True)
class Token:
    kind: str  # "op" | "ident" | "num" | "sys" | "eof"
    text: str
    line: int
    column: int


_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t\r\n]+)
  | (?P<comment>//[^\n]*|--(?=\s|$)[^\n]*)
  | (?P<num>\d+'[bBdDhH][0-9a-fA-F_]+|'[01]|\d+)
  | (?P<sys>\$[A-Za-z_]+)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*(?:\[\d+\])?)
  | (?P<op>\|->|\|=>|\#\#1|===|!==|->|==|!=|<=|>=|&&|\|\||[<>!&|()+\-;@:,~])
    """,
    re.VERBOSE,
)

_RELOPS = {"==": "==", "===": "==", "!=": "!=", "!==": "!=", "<": "<", "<=": "<=",
           ">": ">", ">=": ">="}
_ARITH = {"+", "-"}
_KEYWORDS_UNARY = {
    "X": Next, "nexttime": Next,
    "F": Eventually, "s_eventually": Eventually, "eventually": Eventually,
    "G": Always, "always": Always,
}
_KEYWORDS_UNTIL = {"U": Until, "s_until": Until, "R": Release}
RESERVED = frozenset(
    set(_KEYWORDS_UNARY) | set(_KEYWORDS_UNTIL)
    | {"true", "false", "implies", "and", "or", "not", "property", "endproperty",
       "assert", "assume", "initial", "disable", "iff", "posedge", "negedge"}
)


def tokenize(text: str) -> list[Token]:
    out: list[Token] = []
    pos, line, line_start = 0, 1, 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ParseError("unexpected character", line, pos - line_start + 1, text[pos])
        kind = m.lastgroup
        chunk = m.group()
        if kind not in ("ws", "comment"):
            out.append(Token(kind, chunk, line, pos - line_start + 1))
        nl = chunk.count("\n")
        if nl:
            line += nl
            line_start = pos + chunk.rfind("\n") + 1
        pos = m.end()
    out.append(Token("eof", "", line, pos - line_start + 1))
    return out


def _int_literal(text: str) -> int:
    if text.startswith("'"):
        return int(text[1])
    if "'" in text:
        _, rest = text.split("'", 1)
        base = {"b": 2, "d": 10, "h": 16}[rest[0].lower()]
        return int(rest[1:].replace("_", ""), base)
    return int(text)


@dataclass
class SvaBlock:
    name: str
    clock: str | None
    disable: Formula | None
    body: Formula
    initial: bool
    line: int


class Parser:
    def __init__(self, text: str):
        self.tokens = tokenize(text)
        self.i = 0

    # -- token helpers
    @property
    def tok(self) -> Token:
        return self.tokens[self.i]

    def peek(self, k: int = 1) -> Token:
        return self.tokens[min(self.i + k, len(self.tokens) - 1)]

    def error(self, message: str, tok: Token | None = None) -> ParseError:
        tok = tok or self.tok
        return ParseError(message, tok.line, tok.column, tok.text or "<eof>")

    def accept(self, *texts: str) -> Token | None:
        if self.tok.kind in ("op", "ident") and self.tok.text in texts:
            t = self.tok
            self.i += 1
            return t
        return None

    def expect(self, text: str) -> Token:
        t = self.accept(text)
        if t is None:
            raise self.error(f"expected '{text}'")
        return t

    def expect_ident(self) -> str:
        if self.tok.kind != "ident":
            raise self.error("expected an identifier")
        t = self.tok
        self.i += 1
        return t.text

    # -- formulas
    def formula(self) -> Formula:
        return self.implication()

    def implication(self) -> Formula:
        left = self.disjunction()
        t = self.accept("->", "|->", "|=>", "implies")
        if t is None:
            return left
        right = self.implication()
        if t.text == "|=>":
            right = Next(right)
        return Implies(left, right)

    def disjunction(self) -> Formula:
        left = self.conjunction()
        while self.accept("||", "|", "or"):
            left = Or(left, self.conjunction())
        return left

    def conjunction(self) -> Formula:
        left = self.until()
        while True:
            t = self.accept("&&", "&", "and", "##1")
            if t is None:
                return left
            right = self.until()
            left = And(left, Next(right) if t.text == "##1" else right)

    def until(self) -> Formula:
        left = self.unary()
        if self.tok.kind == "ident" and self.tok.text in _KEYWORDS_UNTIL:
            ctor = _KEYWORDS_UNTIL[self.tok.text]
            self.i += 1
            return ctor(left, self.until())
        return left

    def unary(self) -> Formula:
        t = self.tok
        if self.accept("!", "~", "not"):
            return Not(self.unary())
        if self.accept("##1"):
            return Next(self.unary())
        if t.kind == "ident" and t.text in _KEYWORDS_UNARY:
            self.i += 1
            return _KEYWORDS_UNARY[t.text](self.unary())
        return self.primary()

    def primary(self) -> Formula:
        t = self.tok
        if t.kind == "ident" and t.text == "true":
            self.i += 1
            return T
        if t.kind == "ident" and t.text == "false":
            self.i += 1
            return F_
        if t.kind == "op" and t.text == "(":
            start = self.i
            first: ParseError | None = None
            try:
                self.i += 1
                inner = self.formula()
                self.expect(")")
                if not self._at_term_continuation():
                    return inner
            except ParseError as exc:
                first = exc
            self.i = start
            try:
                return self.comparison()
            except ParseError as exc:
                if first is not None and (first.line, first.column) > (exc.line, exc.column):
                    raise first from None
                raise
        if t.kind == "sys" and t.text == "$past":
            start = self.i
            self.i += 1
            self.expect("(")
            inner = self.formula()
            self.expect(")")
            if self._at_term_continuation():
                self.i = start
                return self.comparison()
            self._check_past_operand(inner, t)
            return Past(inner)
        if t.kind == "sys" and t.text == "$stable":
            self.i += 1
            self.expect("(")
            inner = self.formula()
            self.expect(")")
            self._check_past_operand(inner, t)
            return Stable(inner)
        if t.kind == "sys":
            raise self.error(f"unsupported system function {t.text}")
        if t.kind == "num" or (t.kind == "op" and t.text == "-"):
            return self.comparison()
        if t.kind == "ident":
            if t.text in RESERVED:
                raise self.error(f"unexpected keyword '{t.text}'")
            if self.peek().kind == "op" and (self.peek().text in _RELOPS or self.peek().text in _ARITH):
                return self.comparison()
            self.i += 1
            return Atom(t.text)
        raise self.error("expected a formula")

    def _at_term_continuation(self) -> bool:
        return self.tok.kind == "op" and (self.tok.text in _RELOPS or self.tok.text in _ARITH)

    def _check_past_operand(self, inner: Formula, tok: Token) -> None:
        for g in inner.walk():
            if g.kind in TEMPORAL:
                raise self.error("past operators take a state expression", tok)
            if g.kind in (PAST, STABLE) or (g.kind == "cmp" and any(
                    p for term in g.terms for _, p in term.variables())):
                raise self.error("nested past operator", tok)

    # -- integer terms
    def comparison(self) -> Formula:
        lhs = self.term()
        t = self.tok
        if t.kind != "op" or t.text not in _RELOPS:
            raise self.error("expected a comparison operator")
        self.i += 1
        rhs = self.term()
        return Cmp(_RELOPS[t.text], lhs, rhs)

    def term(self) -> Term:
        left = self.term_primary()
        while self.tok.kind == "op" and self.tok.text in _ARITH:
            op = self.tok.text
            self.i += 1
            left = Arith(op, left, self.term_primary())
        return left

    def term_primary(self) -> Term:
        t = self.tok
        if t.kind == "num":
            self.i += 1
            return Const(_int_literal(t.text))
        if t.kind == "op" and t.text == "-" and self.peek().kind == "num":
            self.i += 2
            return Const(-_int_literal(self.tokens[self.i - 1].text))
        if t.kind == "ident" and t.text not in RESERVED:
            self.i += 1
            return Var(t.text)
        if t.kind == "sys" and t.text == "$past":
            self.i += 1
            self.expect("(")
            name = self.expect_ident()
            self.expect(")")
            return PastVar(name)
        if self.accept("("):
            inner = self.term()
            self.expect(")")
            return inner
        raise self.error("expected an integer term")

    # -- SVA blocks
    def sva_block(self) -> SvaBlock:
        start = self.expect("property")
        name = self.expect_ident()
        self.expect(";")
        clock = None
        if self.accept("@"):
            self.expect("(")
            self.accept("posedge", "negedge")
            clock = self.expect_ident()
            self.expect(")")
        disable = None
        if self.accept("disable"):
            self.expect("iff")
            self.expect("(")
            disable = self.formula()
            self.expect(")")
        body = self.formula()
        self.expect(";")
        self.expect("endproperty")
        if self.accept(":"):
            self.expect_ident()
        initial = False
        if self.tok.text in ("initial", "assert"):
            initial = bool(self.accept("initial"))
            self.expect("assert")
            self.expect("property")
            self.expect("(")
            ref = self.expect_ident()
            if ref != name:
                raise self.error(f"assert refers to '{ref}', block declares '{name}'")
            self.expect(")")
            self.expect(";")
        return SvaBlock(name, clock, disable, body, initial, start.line)

    def at_eof(self) -> bool:
        return self.tok.kind == "eof"


def parse_formula(text: str) -> Formula:
    """Parse bare temporal syntax (no ``property`` block)."""
    p = Parser(text)
    f = p.formula()
    p.accept(";")
    if not p.at_eof():
        raise p.error("unexpected trailing input")
    return f


def parse_term(text: str) -> Term:
    p = Parser(text)
    t = p.term()
    if not p.at_eof():
        raise p.error("unexpected trailing input")
    return t


def block_formula(block: SvaBlock) -> Formula:
    """Temporal meaning of an assertion: checked every cycle unless ``initial``."""
    return block.body if block.initial else Always(block.body)


def parse_property(text: str) -> Formula:
    """Parse a property given either as bare temporal syntax or as an SVA block."""
    p = Parser(text)
    if p.tok.kind == "ident" and p.tok.text == "property":
        block = p.sva_block()
        if not p.at_eof():
            raise p.error("one property block expected")
        return block_formula(block)
    return parse_formula(text)


def parse_blocks(text: str) -> list[SvaBlock]:
    p = Parser(text)
    out = []
    while not p.at_eof():
        out.append(p.sva_block())
    return out

