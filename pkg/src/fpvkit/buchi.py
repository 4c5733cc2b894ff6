"""LTL to Büchi automata by on-the-fly tableau expansion.

The construction produces a state-labeled generalized Büchi automaton:
each state carries a conjunction of literals that the current letter
must satisfy, and one acceptance set per ``U`` subformula.  A counter
construction then turns it into an ordinary Büchi automaton.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from .formula import (
    ALWAYS, AND, EVENTUALLY, FALSE, LITERAL_KINDS, NEXT, NOT, OR, RELEASE, TRUE, UNTIL,
    Formula, Release, Until, T, F_, is_nnf, normalize_nnf,
)


@dataclass(frozen=True)
class BuchiAutomaton:
    """Büchi automaton with letters read in states.

    ``labels[q]`` is a pair of literal tuples ``(positive, negative)``: a
    letter is admitted in ``q`` when every positive literal holds and no
    negative one does.  ``accepting`` lists Büchi-accepting states.
    """

    num_states: int
    init: tuple[int, ...]
    succ: tuple[tuple[int, ...], ...]
    labels: tuple[tuple[tuple[Formula, ...], tuple[Formula, ...]], ...]
    accepting: frozenset[int]

    @property
    def literals(self) -> list[Formula]:
        seen: dict[Formula, None] = {}
        for pos, neg in self.labels:
            for lit in pos + neg:
                seen.setdefault(lit)
        return list(seen)

    def admits(self, q: int, holds) -> bool:
        pos, neg = self.labels[q]
        return all(holds(l) for l in pos) and not any(holds(l) for l in neg)

    def accepts_lasso(self, letters: list, loop_start: int, holds) -> bool:
        """Acceptance of the ultimately periodic word ``letters`` (test helper).

        *holds(letter, literal)* decides literals.  Runs over the finite
        graph ``positions × states``: accept iff some reachable node in the
        periodic part lies on a cycle through an accepting state.
        """
        n = len(letters)
        nxt = list(range(1, n)) + [loop_start]
        ok = [[self.admits(q, lambda l, i=i: holds(letters[i], l)) for q in range(self.num_states)]
              for i in range(n)]
        start = [(0, q) for q in self.init if ok[0][q]]
        graph: dict[tuple[int, int], list[tuple[int, int]]] = {}
        seen = set(start)
        stack = list(start)
        while stack:
            i, q = stack.pop()
            out = [(nxt[i], r) for r in self.succ[q] if ok[nxt[i]][r]]
            graph[(i, q)] = out
            for node in out:
                if node not in seen:
                    seen.add(node)
                    stack.append(node)
        for node in seen:
            if node[1] in self.accepting and _on_cycle(graph, node):
                return True
        return False


def _on_cycle(graph, node) -> bool:
    stack = list(graph.get(node, ()))
    seen = set()
    while stack:
        v = stack.pop()
        if v == node:
            return True
        if v in seen:
            continue
        seen.add(v)
        stack.extend(graph.get(v, ()))
    return False


@dataclass(frozen=True)
class GeneralizedBuchi:
    num_states: int
    init: tuple[int, ...]
    succ: tuple[tuple[int, ...], ...]
    labels: tuple[tuple[tuple[Formula, ...], tuple[Formula, ...]], ...]
    acceptance: tuple[frozenset[int], ...]


def _core(f: Formula) -> Formula:
    """Rewrite ``F``/``G`` into ``U``/``R`` so the tableau has fewer cases."""
    if f.kind == EVENTUALLY:
        return Until(T, _core(f.children[0]))
    if f.kind == ALWAYS:
        return Release(F_, _core(f.children[0]))
    if f.kind in LITERAL_KINDS or f.kind == NOT:
        return f
    if not f.children:
        return f
    return Formula(f.kind, tuple(_core(c) for c in f.children), f.name, f.terms)


def _is_literal(f: Formula) -> bool:
    return f.kind in LITERAL_KINDS or f.kind == NOT


def _negate_literal(f: Formula) -> Formula:
    return f.children[0] if f.kind == NOT else Formula(NOT, (f,))


def tableau(f: Formula) -> GeneralizedBuchi:
    """Generalized Büchi automaton for an NNF formula."""
    if not is_nnf(f):
        raise ValueError("tableau expects a formula in negation normal form")
    f = _core(f)
    # node: (old, next) -> incoming set; expansion is the classic
    # depth-first split on disjunctive obligations
    nodes: dict[tuple[frozenset, frozenset], set] = {}
    order: list[tuple[frozenset, frozenset]] = []
    INIT = "init"
    work = [(frozenset([INIT]), frozenset([f]), frozenset(), frozenset())]
    while work:
        incoming, new, old, nxt = work.pop()
        if not new:
            key = (old, nxt)
            if key in nodes:
                nodes[key] |= incoming
            else:
                nodes[key] = set(incoming)
                order.append(key)
                work.append((frozenset([key]), nxt, frozenset(), frozenset()))
            continue
        eta = min(new, key=_formula_key)
        new = new - {eta}
        if eta in old:
            work.append((incoming, new, old, nxt))
            continue
        k = eta.kind
        if k == FALSE:
            continue
        if k == TRUE:
            work.append((incoming, new, old, nxt))
            continue
        if _is_literal(eta):
            if _negate_literal(eta) in old:
                continue
            work.append((incoming, new, old | {eta}, nxt))
            continue
        old2 = old | {eta}
        a = eta.children[0]
        if k == AND:
            b = eta.children[1]
            work.append((incoming, new | ({a, b} - old), old2, nxt))
        elif k == NEXT:
            work.append((incoming, new, old2, nxt | {a}))
        elif k == OR:
            b = eta.children[1]
            work.append((incoming, new | ({b} - old), old2, nxt))
            work.append((incoming, new | ({a} - old), old2, nxt))
        elif k == UNTIL:
            b = eta.children[1]
            work.append((incoming, new | ({b} - old), old2, nxt))
            work.append((incoming, new | ({a} - old), old2, nxt | {eta}))
        elif k == RELEASE:
            b = eta.children[1]
            work.append((incoming, new | ({a, b} - old), old2, nxt))
            work.append((incoming, new | ({b} - old), old2, nxt | {eta}))
        else:
            raise ValueError(f"unexpected operator {k} in tableau")
    index = {key: i for i, key in enumerate(order)}
    n = len(order)
    succ_sets: list[set[int]] = [set() for _ in range(n)]
    init = []
    for key, inc in nodes.items():
        j = index[key]
        for src in inc:
            if src == INIT:
                init.append(j)
            else:
                succ_sets[index[src]].add(j)
    labels = []
    for old, _ in order:
        pos = tuple(sorted((g for g in old if _is_literal(g) and g.kind != NOT), key=_formula_key))
        neg = tuple(sorted((g.children[0] for g in old if g.kind == NOT), key=_formula_key))
        labels.append((pos, neg))
    untils = sorted({g for old, _ in order for g in old if g.kind == UNTIL}, key=_formula_key)
    acceptance = tuple(
        frozenset(i for i, (old, _) in enumerate(order) if u not in old or u.children[1] in old or u.children[1].kind == TRUE)
        for u in untils
    )
    return GeneralizedBuchi(n, tuple(sorted(init)), tuple(tuple(sorted(s)) for s in succ_sets),
                            tuple(labels), acceptance)


def _formula_key(f: Formula) -> str:
    return f"{f.size():06d}|{f!r}"


def degeneralize(g: GeneralizedBuchi) -> BuchiAutomaton:
    """Counter construction: state ``(q, i)`` waits for acceptance set ``i``."""
    k = len(g.acceptance)
    if k == 0:
        return BuchiAutomaton(g.num_states, g.init, g.succ, g.labels, frozenset(range(g.num_states)))
    if k == 1:
        return BuchiAutomaton(g.num_states, g.init, g.succ, g.labels, g.acceptance[0])

    def sid(q: int, i: int) -> int:
        return q * k + i

    succ = []
    labels = []
    for q in range(g.num_states):
        for i in range(k):
            j = (i + 1) % k if q in g.acceptance[i] else i
            succ.append(tuple(sid(r, j) for r in g.succ[q]))
            labels.append(g.labels[q])
    accepting = frozenset(sid(q, 0) for q in g.acceptance[0])
    init = tuple(sid(q, 0) for q in g.init)
    return _trim(BuchiAutomaton(g.num_states * k, init, tuple(succ), tuple(labels), accepting))


def _trim(a: BuchiAutomaton) -> BuchiAutomaton:
    """Drop states unreachable from the initial states, renumbering in order."""
    seen = set(a.init)
    stack = list(a.init)
    while stack:
        q = stack.pop()
        for r in a.succ[q]:
            if r not in seen:
                seen.add(r)
                stack.append(r)
    keep = sorted(seen)
    idx = {q: i for i, q in enumerate(keep)}
    return BuchiAutomaton(
        len(keep),
        tuple(sorted(idx[q] for q in a.init)),
        tuple(tuple(sorted(idx[r] for r in a.succ[q])) for q in keep),
        tuple(a.labels[q] for q in keep),
        frozenset(idx[q] for q in keep if q in a.accepting),
    )


@lru_cache(maxsize=4096)
def ltl_to_buchi(f: Formula) -> BuchiAutomaton:
    """Büchi automaton accepting exactly the words that satisfy *f*.

    *f* is normalized to NNF first; past operators and comparisons are
    treated as opaque state literals.
    """
    return degeneralize(tableau(normalize_nnf(f)))
