"""Brute-force reference implementations used by the tests.

Nothing here goes through automata: satisfaction is decided by listing
every lasso up to a length bound and evaluating the formula on it.
"""
from __future__ import annotations

import itertools
import random
from typing import Iterator

from fpvkit.formula import (
    ALWAYS, AND, ATOM, EVENTUALLY, IMPLIES, NEXT, NOT, OR, UNTIL, Atom, Formula,
)
from fpvkit.model import Lasso, Model
from fpvkit.semantics import eval_on_lasso

ORACLE_OPS = (ALWAYS, EVENTUALLY, NEXT, UNTIL, NOT, AND, OR, IMPLIES)


def random_formula(rng: random.Random, depth: int, atoms=("p", "q"), ops=ORACLE_OPS) -> Formula:
    """Random formula of exactly the given depth (a leaf has depth 0)."""
    if depth == 0:
        return Atom(rng.choice(atoms))
    op = rng.choice(ops)
    if op in (ALWAYS, EVENTUALLY, NEXT, NOT):
        return Formula(op, (random_formula(rng, depth - 1, atoms, ops),))
    deep = random_formula(rng, depth - 1, atoms, ops)
    other = random_formula(rng, rng.randrange(depth), atoms, ops)
    kids = (deep, other) if rng.random() < 0.5 else (other, deep)
    return Formula(op, kids)


def _make(states, init, succ, names=("p", "q")) -> Model:
    vals = tuple(tuple(v) for v in states)
    from fpvkit.model import VarSpec

    return Model("m", tuple(VarSpec(n) for n in names), vals, tuple(init), tuple(tuple(s) for s in succ))


def all_models(n: int, names=("p", "q")) -> Iterator[Model]:
    """Every model with *n* states over the given boolean variables."""
    labels = list(itertools.product((0, 1), repeat=len(names)))
    nonempty = [tuple(c) for r in range(1, n + 1) for c in itertools.combinations(range(n), r)]
    for lab in itertools.product(labels, repeat=n):
        for succ in itertools.product(nonempty, repeat=n):
            for init in nonempty:
                yield _make(lab, init, succ, names)


def random_model(rng: random.Random, n: int, names=("p", "q")) -> Model:
    lab = [tuple(rng.randrange(2) for _ in names) for _ in range(n)]
    succ = []
    for _ in range(n):
        row = sorted({rng.randrange(n) for _ in range(rng.randint(1, n))})
        succ.append(row)
    init = sorted({rng.randrange(n) for _ in range(rng.randint(1, 2))})
    return _make(lab, init, succ, names)


def lassos(m: Model, bound: int) -> Iterator[Lasso]:
    """Every lasso of *m* with ``len(stem) + len(loop) <= bound``."""

    def paths(prefix: list[int]):
        yield prefix
        if len(prefix) < bound:
            for t in m.succ[prefix[-1]]:
                yield from paths(prefix + [t])

    for s in m.init:
        for path in paths([s]):
            last = path[-1]
            for i, start in enumerate(path):
                if start in m.succ_sets[last]:
                    yield Lasso(tuple(path[:i]), tuple(path[i:]))


def oracle_holds(m: Model, f: Formula, bound: int = 5) -> bool:
    return all(eval_on_lasso(f, l, m) for l in lassos(m, bound))


def with_fresh_atom(m: Model, name: str, values) -> Model:
    """*m* with one more boolean variable taking ``values[s]`` in state ``s``."""
    from fpvkit.model import VarSpec

    vals = tuple(v + (int(values[s]),) for s, v in enumerate(m.valuations))
    return Model(m.name, m.variables + (VarSpec(name),), vals, m.init, m.succ, m.deps, m.state_names)


def replacement_unaffected(m: Model, f: Formula, path, holds) -> bool:
    """Does every state-indexed replacement of the atom at *path* keep satisfaction?

    *holds(model, formula)* decides satisfaction.
    """
    from fpvkit.formula import replace_at

    assert f.at(path).kind == ATOM
    base = holds(m, f)
    g = replace_at(f, path, Atom("__psi"))
    for values in itertools.product((0, 1), repeat=m.num_states):
        if holds(with_fresh_atom(m, "__psi", values), g) != base:
            return False
    return True


def transitive_closure_oracle(edges, start) -> set:
    """Backward reachability by repeated relaxation (no graph search)."""
    out = set(start)
    changed = True
    while changed:
        changed = False
        for a, b in edges:
            if b in out and a not in out:
                out.add(a)
                changed = True
    return out


def random_term(rng: random.Random, depth: int, allow_past: bool = True):
    from fpvkit.formula import Arith, Const, PastVar, Var

    if depth == 0 or rng.random() < 0.4:
        pick = rng.randrange(3 if allow_past else 2)
        if pick == 0:
            return Var(rng.choice(("c", "d")))
        if pick == 1:
            return Const(rng.randrange(8))
        return PastVar(rng.choice(("c", "d")))
    return Arith(rng.choice("+-"), random_term(rng, depth - 1, allow_past), random_term(rng, depth - 1, allow_past))


def random_rich_formula(rng: random.Random, depth: int) -> Formula:
    """Random formula over every kind the language has, up to *depth*."""
    from fpvkit.formula import (
        CMP_OPS, F_, T, Cmp, Past, Release, Stable,
    )

    def state(d: int, allow_past: bool) -> Formula:
        if d == 0 or rng.random() < 0.3:
            if rng.random() < 0.7:
                return Atom(rng.choice(("p", "q", "r")))
            return Cmp(rng.choice(CMP_OPS), random_term(rng, 2, allow_past), random_term(rng, 2, allow_past))
        op = rng.choice((NOT, AND, OR))
        if op == NOT:
            return Formula(NOT, (state(d - 1, allow_past),))
        return Formula(op, (state(d - 1, allow_past), state(d - 1, allow_past)))

    def go(d: int) -> Formula:
        if d == 0:
            pick = rng.randrange(6)
            if pick == 0:
                return T
            if pick == 1:
                return F_
            if pick == 2:
                return Past(state(1, False))
            if pick == 3:
                return Stable(state(1, False))
            return state(1, True)
        op = rng.choice((NOT, NEXT, EVENTUALLY, ALWAYS, AND, OR, IMPLIES, UNTIL, "R"))
        if op in (NOT, NEXT, EVENTUALLY, ALWAYS):
            return Formula(op, (go(d - 1),))
        kids = (go(d - 1), go(rng.randrange(d)))
        if rng.random() < 0.5:
            kids = kids[::-1]
        if op == "R":
            return Release(*kids)
        return Formula(op, kids)

    return go(depth)
