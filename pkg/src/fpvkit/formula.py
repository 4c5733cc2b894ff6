"""Temporal formula AST and the structural transforms built on it.

Formulas are immutable trees.  Leaves are boolean atoms, the two
constants and relational comparisons over integer terms; inner nodes
are the boolean connectives, the future operators X/F/G/U/R and the
one-step past operators ``past1``/``stable``.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Iterator

ATOM = "atom"
TRUE = "true"
FALSE = "false"
NOT = "not"
AND = "and"
OR = "or"
IMPLIES = "implies"
NEXT = "X"
EVENTUALLY = "F"
ALWAYS = "G"
UNTIL = "U"
RELEASE = "R"
PAST = "past1"
STABLE = "stable"
CMP = "cmp"

ARITY = {
    ATOM: 0, TRUE: 0, FALSE: 0, CMP: 0,
    NOT: 1, NEXT: 1, EVENTUALLY: 1, ALWAYS: 1, PAST: 1, STABLE: 1,
    AND: 2, OR: 2, IMPLIES: 2, UNTIL: 2, RELEASE: 2,
}
TEMPORAL = frozenset({NEXT, EVENTUALLY, ALWAYS, UNTIL, RELEASE})
PAST_KINDS = frozenset({PAST, STABLE})
CMP_OPS = ("==", "!=", "<", "<=", ">", ">=")


class Polarity(enum.Enum):
    POSITIVE = "positive"
    NEGATIVE = "negative"
    MIXED = "mixed"

    def flip(self) -> "Polarity":
        if self is Polarity.POSITIVE:
            return Polarity.NEGATIVE
        if self is Polarity.NEGATIVE:
            return Polarity.POSITIVE
        return self


@dataclass(frozen=True)
class Term:
    """Integer-valued term used on either side of a comparison."""

    op: str  # "var" | "past" | "const" | "+" | "-"
    name: str | None = None
    value: int = 0
    args: tuple["Term", ...] = ()

    def variables(self) -> Iterator[tuple[str, bool]]:
        """Yield ``(name, under_past)`` for every variable reference."""
        if self.op in ("var", "past"):
            yield self.name, self.op == "past"
        for a in self.args:
            yield from a.variables()


def Var(name: str) -> Term:
    return Term("var", name=name)


def PastVar(name: str) -> Term:
    return Term("past", name=name)


def Const(value: int) -> Term:
    return Term("const", value=value)


def Arith(op: str, left: Term, right: Term) -> Term:
    return Term(op, args=(left, right))


@dataclass(frozen=True, eq=True)
class Formula:
    kind: str
    children: tuple["Formula", ...] = ()
    name: str | None = None
    terms: tuple[Term, ...] = ()
    _hash: int = field(default=0, init=False, repr=False, compare=False)

    def __post_init__(self):
        arity = ARITY.get(self.kind)
        if arity is None:
            raise ValueError(f"unknown formula kind {self.kind!r}")
        if len(self.children) != arity:
            raise ValueError(f"{self.kind} expects {arity} children, got {len(self.children)}")
        if self.kind == ATOM and not self.name:
            raise ValueError("atom needs a name")
        if self.kind == CMP and (self.name not in CMP_OPS or len(self.terms) != 2):
            raise ValueError(f"bad comparison {self.name!r}")
        object.__setattr__(self, "_hash", hash((self.kind, self.children, self.name, self.terms)))

    def __hash__(self) -> int:
        return self._hash

    def __repr__(self) -> str:
        from .printer import pretty_print

        return f"Formula({pretty_print(self)!r})"

    def __str__(self) -> str:
        from .printer import pretty_print

        return pretty_print(self)

    @property
    def is_leaf(self) -> bool:
        return not self.children

    def at(self, path: tuple[int, ...]) -> "Formula":
        node = self
        for i in path:
            if i < 0 or i >= len(node.children):
                raise PathError(f"path {path} does not resolve in {self}")
            node = node.children[i]
        return node

    def walk(self) -> Iterator["Formula"]:
        yield self
        for c in self.children:
            yield from c.walk()

    def size(self) -> int:
        return sum(1 for _ in self.walk())

    def depth(self) -> int:
        if not self.children:
            return 0
        return 1 + max(c.depth() for c in self.children)


class PathError(LookupError):
    pass


def Atom(name: str) -> Formula:
    return Formula(ATOM, name=name)


T = Formula(TRUE)
F_ = Formula(FALSE)


def Const_(value: bool) -> Formula:
    return T if value else F_


def Not(a: Formula) -> Formula:
    return Formula(NOT, (a,))


def And(a: Formula, b: Formula) -> Formula:
    return Formula(AND, (a, b))


def Or(a: Formula, b: Formula) -> Formula:
    return Formula(OR, (a, b))


def Implies(a: Formula, b: Formula) -> Formula:
    return Formula(IMPLIES, (a, b))


def Next(a: Formula) -> Formula:
    return Formula(NEXT, (a,))


def Eventually(a: Formula) -> Formula:
    return Formula(EVENTUALLY, (a,))


def Always(a: Formula) -> Formula:
    return Formula(ALWAYS, (a,))


def Until(a: Formula, b: Formula) -> Formula:
    return Formula(UNTIL, (a, b))


def Release(a: Formula, b: Formula) -> Formula:
    return Formula(RELEASE, (a, b))


def Past(a: Formula) -> Formula:
    return Formula(PAST, (a,))


def Stable(a: Formula) -> Formula:
    return Formula(STABLE, (a,))


def Cmp(op: str, left: Term, right: Term) -> Formula:
    return Formula(CMP, name=op, terms=(left, right))


def conjoin(parts: list[Formula]) -> Formula:
    """Left-nested conjunction; ``true`` for an empty list."""
    if not parts:
        return T
    out = parts[0]
    for p in parts[1:]:
        out = And(out, p)
    return out


# -- queries -----------------------------------------------------------------

def signals(f: Formula) -> set[tuple[str, bool]]:
    """All ``(signal, under_past)`` pairs referenced by *f*.

    ``under_past`` is true when the reference needs the previous-cycle
    value (inside ``past1``/``stable`` or a ``$past`` term).
    """
    out: set[tuple[str, bool]] = set()

    def go(g: Formula, past: bool) -> None:
        if g.kind == ATOM:
            out.add((g.name, past))
        elif g.kind == CMP:
            for t in g.terms:
                for name, p in t.variables():
                    out.add((name, p or past))
        elif g.kind == STABLE:
            # stable compares the current and the previous value
            go(g.children[0], False)
            go(g.children[0], True)
        elif g.kind == PAST:
            go(g.children[0], True)
        else:
            for c in g.children:
                go(c, past)

    go(f, False)
    return out


def signal_names(f: Formula) -> set[str]:
    return {name for name, _ in signals(f)}


def past_signals(f: Formula) -> set[str]:
    return {name for name, past in signals(f) if past}


def is_state_formula(f: Formula) -> bool:
    """True when *f* contains no future temporal operator."""
    return all(g.kind not in TEMPORAL for g in f.walk())


def has_past(f: Formula) -> bool:
    return any(p for _, p in signals(f))


# -- occurrences and substitution --------------------------------------------

@dataclass(frozen=True)
class OccurrencePath:
    path: tuple[int, ...]
    polarity: Polarity


def occurrences(f: Formula) -> list[OccurrencePath]:
    """Every strict-subformula occurrence of *f*, in preorder."""
    out: list[OccurrencePath] = []

    def go(g: Formula, path: tuple[int, ...], pol: Polarity) -> None:
        if path:
            out.append(OccurrencePath(path, pol))
        k = g.kind
        for i, c in enumerate(g.children):
            if k == NOT or (k == IMPLIES and i == 0):
                cp = pol.flip()
            elif k == STABLE:
                cp = Polarity.MIXED
            else:
                cp = pol
            go(c, path + (i,), cp)

    go(f, (), Polarity.POSITIVE)
    return out


def replace_at(f: Formula, path: tuple[int, ...], new: Formula) -> Formula:
    if not path:
        return new
    i = path[0]
    if i < 0 or i >= len(f.children):
        raise PathError(f"path {path} does not resolve in {f}")
    kids = list(f.children)
    kids[i] = replace_at(kids[i], path[1:], new)
    return Formula(f.kind, tuple(kids), f.name, f.terms)


def substitute(f: Formula, at: OccurrencePath | tuple[int, ...], value: bool | Formula) -> Formula:
    """Return *f* with the addressed occurrence replaced by a constant (or formula)."""
    path = at.path if isinstance(at, OccurrencePath) else tuple(at)
    if not path:
        raise PathError("the root is not a strict subformula occurrence")
    f.at(path)
    new = value if isinstance(value, Formula) else Const_(bool(value))
    return replace_at(f, path, new)


def substitute_many(f: Formula, paths, value: bool) -> Formula:
    """Simultaneous substitution of several disjoint occurrences."""
    out = f
    for p in paths:
        p = p.path if isinstance(p, OccurrencePath) else tuple(p)
        out.at(p)
        out = replace_at(out, p, Const_(value))
    return out


# -- simplification and negation normal form ---------------------------------

def simplify(f: Formula) -> Formula:
    """Constant propagation.  The result is equivalent to *f*."""
    k = f.kind
    if not f.children:
        return f
    kids = tuple(simplify(c) for c in f.children)
    a = kids[0]
    b = kids[1] if len(kids) > 1 else None
    if k == NOT:
        if a.kind in (TRUE, FALSE):
            return Const_(a.kind == FALSE)
        if a.kind == NOT:
            return a.children[0]
    elif k == AND:
        if a.kind == FALSE or b.kind == FALSE:
            return F_
        if a.kind == TRUE:
            return b
        if b.kind == TRUE:
            return a
    elif k == OR:
        if a.kind == TRUE or b.kind == TRUE:
            return T
        if a.kind == FALSE:
            return b
        if b.kind == FALSE:
            return a
    elif k == IMPLIES:
        if a.kind == FALSE or b.kind == TRUE:
            return T
        if a.kind == TRUE:
            return b
        if b.kind == FALSE:
            return simplify(Not(a))
    elif k in (NEXT, EVENTUALLY, ALWAYS, PAST):
        if a.kind in (TRUE, FALSE):
            return a
    elif k == STABLE:
        if a.kind in (TRUE, FALSE):
            return T
    elif k == UNTIL:
        if b.kind in (TRUE, FALSE):
            return b
        if a.kind == TRUE:
            return Eventually(b)
        if a.kind == FALSE:
            return b
    elif k == RELEASE:
        if b.kind in (TRUE, FALSE):
            return b
        if a.kind == FALSE:
            return Always(b)
        if a.kind == TRUE:
            return b
    return Formula(k, kids, f.name, f.terms)


_DUAL = {AND: OR, OR: AND, EVENTUALLY: ALWAYS, ALWAYS: EVENTUALLY, UNTIL: RELEASE, RELEASE: UNTIL}
LITERAL_KINDS = frozenset({ATOM, CMP, PAST, STABLE})


def normalize_nnf(f: Formula) -> Formula:
    """Negation normal form without implications.

    ``past1``/``stable`` nodes and comparisons are treated as state
    literals: a negation may sit directly above them.
    """
    return _nnf(f, False)


def _nnf(f: Formula, neg: bool) -> Formula:
    k = f.kind
    if k in (TRUE, FALSE):
        return Const_((k == TRUE) != neg)
    if k in LITERAL_KINDS:
        return Not(f) if neg else f
    if k == NOT:
        return _nnf(f.children[0], not neg)
    if k == IMPLIES:
        a, b = f.children
        if neg:
            return And(_nnf(a, False), _nnf(b, True))
        return Or(_nnf(a, True), _nnf(b, False))
    if k == NEXT:
        return Next(_nnf(f.children[0], neg))
    kind = _DUAL[k] if neg else k
    return Formula(kind, tuple(_nnf(c, neg) for c in f.children))


def is_nnf(f: Formula) -> bool:
    """Literal operands (inside ``past1``/``stable``) are not inspected."""
    if f.kind in LITERAL_KINDS:
        return True
    if f.kind == IMPLIES:
        return False
    if f.kind == NOT:
        return f.children[0].kind in LITERAL_KINDS
    return all(is_nnf(c) for c in f.children)


def witness_formula(f: Formula) -> Formula:
    """``f`` conjoined with, for each occurrence, the negation of ``f`` with
    that occurrence pinned to its weakening constant.

    Positive occurrences are pinned to ``false`` and negative ones to
    ``true``.  Constants and mixed-polarity occurrences (under
    ``stable``) are skipped.
    """
    parts = [f]
    for occ in occurrences(f):
        if occ.polarity is Polarity.MIXED or f.at(occ.path).kind in (TRUE, FALSE):
            continue
        pinned = substitute(f, occ, occ.polarity is Polarity.NEGATIVE)
        parts.append(simplify(Not(pinned)))
    return conjoin(parts)
