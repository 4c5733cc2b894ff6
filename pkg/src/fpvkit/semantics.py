"""Direct LTL evaluation on ultimately periodic words.

This is the reference semantics the automaton-based checker is tested
against.  It never builds an automaton: every subformula gets a truth
vector over the positions of the (unrolled) lasso, with ``U`` computed
as a least and ``R`` as a greatest fixpoint over the successor function.
"""
from __future__ import annotations

from typing import Callable, Sequence

from .formula import (
    ALWAYS, AND, EVENTUALLY, FALSE, IMPLIES, NEXT, NOT, OR, RELEASE, TRUE, UNTIL,
    Formula, is_state_formula,
)
from .model import Lasso, Model, eval_state_formula

Lookup = Callable[[str, bool], int]


def eval_on_word(f: Formula, word: Sequence[Lookup], loop_start: int) -> bool:
    """Truth of *f* at position 0 of ``word[:loop_start] (word[loop_start:])^ω``.

    Each position is a lookup ``(signal, previous?) -> value``.
    """
    n = len(word)
    if not 0 <= loop_start < n:
        raise ValueError("loop start outside the word")
    succ = list(range(1, n)) + [loop_start]
    memo: dict[Formula, list[bool]] = {}

    def vec(g: Formula) -> list[bool]:
        hit = memo.get(g)
        if hit is not None:
            return hit
        k = g.kind
        if is_state_formula(g):
            out = [eval_state_formula(g, word[i]) for i in range(n)]
        elif k == NOT:
            out = [not v for v in vec(g.children[0])]
        elif k == AND:
            a, b = vec(g.children[0]), vec(g.children[1])
            out = [x and y for x, y in zip(a, b)]
        elif k == OR:
            a, b = vec(g.children[0]), vec(g.children[1])
            out = [x or y for x, y in zip(a, b)]
        elif k == IMPLIES:
            a, b = vec(g.children[0]), vec(g.children[1])
            out = [(not x) or y for x, y in zip(a, b)]
        elif k == NEXT:
            a = vec(g.children[0])
            out = [a[succ[i]] for i in range(n)]
        elif k in (UNTIL, EVENTUALLY):
            a = vec(g.children[0]) if k == UNTIL else [True] * n
            b = vec(g.children[-1])
            out = _fixpoint(a, b, succ, least=True)
        elif k in (RELEASE, ALWAYS):
            a = vec(g.children[0]) if k == RELEASE else [False] * n
            b = vec(g.children[-1])
            out = _fixpoint(a, b, succ, least=False)
        elif k in (TRUE, FALSE):
            out = [k == TRUE] * n
        else:
            raise ValueError(f"cannot evaluate {k}")
        memo[g] = out
        return out

    return vec(f)[0]


def _fixpoint(a: list[bool], b: list[bool], succ: list[int], least: bool) -> list[bool]:
    n = len(a)
    if least:
        # a U b:  v = b | (a & X v), start from all-false
        v = [False] * n
        changed = True
        while changed:
            changed = False
            for i in range(n - 1, -1, -1):
                nv = b[i] or (a[i] and v[succ[i]])
                if nv != v[i]:
                    v[i] = nv
                    changed = True
    else:
        # a R b:  v = b & (a | X v), start from all-true
        v = [True] * n
        changed = True
        while changed:
            changed = False
            for i in range(n - 1, -1, -1):
                nv = b[i] and (a[i] or v[succ[i]])
                if nv != v[i]:
                    v[i] = nv
                    changed = True
    return v


def lasso_word(model: Model, lasso: Lasso) -> tuple[list[Lookup], int]:
    """Lookups for the positions of *lasso*, with previous values taken from the path.

    The loop is laid out twice so that the previous value at the loop
    head is well defined: on the first pass it comes from the stem, on
    every later pass from the end of the loop.
    """
    states = list(lasso.stem) + list(lasso.loop) * 2
    start = len(lasso.stem) + len(lasso.loop)
    word = []
    for i, s in enumerate(states):
        prev = states[i - 1] if i > 0 else s
        word.append(_path_lookup(model, s, prev))
    return word, start


def _path_lookup(model: Model, cur: int, prev: int) -> Lookup:
    def get(signal: str, past: bool) -> int:
        return model.value(prev if past else cur, signal)

    return get


def eval_on_lasso(f: Formula, lasso: Lasso, model: Model) -> bool:
    """Does the path described by *lasso* through *model* satisfy *f*?"""
    word, start = lasso_word(model, lasso)
    return eval_on_word(f, word, start)
