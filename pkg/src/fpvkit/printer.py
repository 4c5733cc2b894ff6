"""Render formulas back to text.

Two surfaces share one precedence table: the plain temporal syntax
(``G (p -> F q)``) and the SVA body syntax used inside ``property``
blocks (``a |=> b``, ``always``, ``s_eventually``).  Both re-parse to
the same tree.
"""
from __future__ import annotations

from .formula import (
    ALWAYS, AND, ATOM, CMP, EVENTUALLY, FALSE, IMPLIES, NEXT, NOT, OR, PAST,
    RELEASE, STABLE, TRUE, UNTIL, Formula, Term, is_state_formula,
)

# binding strength, loosest first
_PREC = {IMPLIES: 1, OR: 2, AND: 3, UNTIL: 4, RELEASE: 4}
_UNARY = 5

_LTL_WORDS = {NEXT: "X", EVENTUALLY: "F", ALWAYS: "G", UNTIL: "U", RELEASE: "R"}
_SVA_WORDS = {NEXT: "nexttime", EVENTUALLY: "s_eventually", ALWAYS: "always",
              UNTIL: "s_until", RELEASE: "R"}


def pretty_print(f: Formula) -> str:
    return _render(f, 0, _LTL_WORDS, sva=False)


def render_sva_body(f: Formula) -> str:
    return _render(f, 0, _SVA_WORDS, sva=True)


def render_term(t: Term) -> str:
    if t.op == "var":
        return t.name
    if t.op == "past":
        return f"$past({t.name})"
    if t.op == "const":
        return str(t.value)
    left, right = t.args
    r = render_term(right)
    if right.op in ("+", "-"):
        r = f"({r})"
    return f"{render_term(left)} {t.op} {r}"


def _render(f: Formula, ctx: int, words: dict, sva: bool) -> str:
    k = f.kind
    if k == ATOM:
        return f.name
    if k == TRUE:
        return "true"
    if k == FALSE:
        return "false"
    if k == CMP:
        lhs, rhs = f.terms
        return f"({render_term(lhs)} {f.name} {render_term(rhs)})"
    if k == PAST:
        return f"$past({_render(f.children[0], 0, words, sva)})"
    if k == STABLE:
        return f"$stable({_render(f.children[0], 0, words, sva)})"

    if k in (NOT, NEXT, EVENTUALLY, ALWAYS):
        op = "!" if k == NOT else words[k]
        inner = _render(f.children[0], _UNARY, words, sva)
        sep = "" if k == NOT else " "
        text = f"{op}{sep}{inner}"
        return text if ctx <= _UNARY else f"({text})"

    prec = _PREC[k]
    a, b = f.children
    if k == IMPLIES:
        op = "->"
        if sva and is_state_formula(a):
            if b.kind == NEXT:
                op, b = "|=>", b.children[0]
            else:
                op = "|->"
        elif sva:
            op = "implies"
        left = _render(a, prec + 1, words, sva)
        right = _render(b, prec, words, sva)
    elif k in (UNTIL, RELEASE):
        op = words[k]
        left = _render(a, prec + 1, words, sva)
        right = _render(b, prec, words, sva)
    else:
        op = "&&" if k == AND else "||"
        left = _render(a, prec, words, sva)
        right = _render(b, prec + 1, words, sva)
    text = f"{left} {op} {right}"
    return text if ctx <= prec else f"({text})"
