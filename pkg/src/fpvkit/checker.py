"""Automata-theoretic LTL model checking over explicit models."""
from __future__ import annotations

import hashlib
import time
from array import array
from collections import deque
from dataclasses import dataclass, field

from . import kernels
from .buchi import BuchiAutomaton, ltl_to_buchi
from .formula import Formula, Implies, Not, normalize_nnf, past_signals, signals
from .model import Lasso, Model

DEFAULT_LIMIT = 10 ** 6


class ResourceLimitError(RuntimeError):
    pass


@dataclass
class Verdict:
    holds: bool
    counterexample: Lasso | None
    formula: Formula
    model: str
    stats: dict = field(default_factory=dict, compare=False)

    def __bool__(self) -> bool:
        return self.holds


def _masks(m: Model, literals: tuple[Formula, ...]) -> list[int]:
    key = ("masks", literals)
    hit = m._cache.get(key)
    if hit is None:
        hit = []
        for s in range(m.num_states):
            mask = 0
            for i, lit in enumerate(literals):
                if m.eval_state(lit, s):
                    mask |= 1 << i
            hit.append(mask)
        m._cache[key] = hit
    return hit


def _model_csr(m: Model):
    hit = m._cache.get("csr")
    if hit is None:
        ptr, idx = kernels.csr(m.succ)
        hit = (ptr, idx, array("i", m.init))
        m._cache["csr"] = hit
    return hit


def _automaton_arrays(aut: BuchiAutomaton, literals: tuple[Formula, ...]):
    pos_of = {lit: i for i, lit in enumerate(literals)}
    ptr, idx = kernels.csr(aut.succ)
    a_pos, a_neg = [], []
    for pos, neg in aut.labels:
        a_pos.append(sum(1 << pos_of[l] for l in pos))
        a_neg.append(sum(1 << pos_of[l] for l in neg))
    acc = bytes(1 if q in aut.accepting else 0 for q in range(aut.num_states))
    return ptr, idx, array("i", aut.init), a_pos, a_neg, acc


def check(m: Model, f: Formula, assume: Formula | None = None, limit: int = DEFAULT_LIMIT,
          backend: str | None = None, shorten: bool = True) -> Verdict:
    """Decide whether every path of *m* satisfying *assume* satisfies *f*.

    A failing verdict carries a lasso through *m* that satisfies
    *assume* and violates *f*.  Successors are explored in ascending
    state order, so the counterexample is a function of the inputs.
    """
    started = time.perf_counter()
    m.check_signals(f)
    g = f
    if assume is not None:
        m.check_signals(assume)
        g = Implies(assume, f)
    past = past_signals(g)
    mm = m.with_past(past) if past else m
    aut = ltl_to_buchi(normalize_nnf(Not(g)))
    literals = tuple(aut.literals)
    m_ptr, m_idx, m_init = _model_csr(mm)
    masks = _masks(mm, literals)
    a_ptr, a_idx, a_init, a_pos, a_neg, acc = _automaton_arrays(aut, literals)
    status, stem, loop, explored = kernels.nested_dfs(
        m_ptr, m_idx, m_init, masks, a_ptr, a_idx, a_init, a_pos, a_neg, acc, limit, backend=backend)
    stats = {
        "explored": explored,
        "automaton_states": aut.num_states,
        "model_states": mm.num_states,
        "seconds": time.perf_counter() - started,
    }
    if status == kernels.LIMIT:
        raise ResourceLimitError(f"resource limit: more than {limit} product states explored")
    if status == kernels.EMPTY:
        return Verdict(True, None, f, m.name, stats)
    Q = aut.num_states
    if shorten:
        stem, loop = _shorten(stem, loop, m_ptr, m_idx, m_init, masks, a_ptr, a_idx, a_init, a_pos, a_neg, acc)
    to_base = (lambda s: mm.origin[s]) if mm.origin is not None else (lambda s: s)
    lasso = Lasso(tuple(to_base(n // Q) for n in stem), tuple(to_base(n // Q) for n in loop))
    if shorten:
        lasso = lasso.normalized()
    return Verdict(False, lasso, f, m.name, stats)


def _shorten(stem, loop, m_ptr, m_idx, m_init, masks, a_ptr, a_idx, a_init, a_pos, a_neg, acc):
    """Shortest stem to the first accepting node of the found loop, then the
    shortest cycle back to it.  Breadth-first in ascending successor order,
    so the result stays deterministic."""
    Q = len(a_ptr) - 1

    def admits(t, r):
        return (masks[t] & a_pos[r]) == a_pos[r] and not masks[t] & a_neg[r]

    def successors(node):
        s, q = divmod(node, Q)
        for j in range(m_ptr[s], m_ptr[s + 1]):
            t = m_idx[j]
            for k in range(a_ptr[q], a_ptr[q + 1]):
                r = a_idx[k]
                if admits(t, r):
                    yield t * Q + r

    def bfs(sources, target):
        parent = {v: None for v in sources}
        queue = deque(sources)
        while queue:
            v = queue.popleft()
            for t in successors(v):
                if t == target:
                    path = [v]
                    while parent[path[-1]] is not None:
                        path.append(parent[path[-1]])
                    return path[::-1]
                if t not in parent:
                    parent[t] = v
                    queue.append(t)
        return None

    seed = next((v for v in loop if acc[v % Q]), None)
    if seed is None:
        return stem, loop
    roots = [s * Q + q for s in m_init for q in a_init if admits(s, q)]
    if seed in roots:
        new_stem = []
    else:
        new_stem = bfs(roots, seed)
    cycle = bfs([seed], seed)
    if new_stem is None or cycle is None:
        return stem, loop
    return new_stem, cycle


def holds(m: Model, f: Formula, assume: Formula | None = None) -> bool:
    return check(m, f, assume).holds


# -- counterexample rendering ---------------------------------------------------

def trace_signals(m: Model, f: Formula | None) -> list[str]:
    if f is None:
        return list(m.source_variables)
    names = sorted({m.source_of(n) for n, _ in signals(f)})
    return names or list(m.source_variables)


def render_lasso(m: Model, lasso: Lasso, names: list[str] | None = None) -> str:
    """Monospaced timing table for a lasso; the looping cycles are bracketed."""
    names = names if names is not None else list(m.source_variables)
    states = lasso.states
    cols = []
    for i, s in enumerate(states):
        cells = [str(i)] + [str(m.value(s, n)) for n in names] + [m.state_names[s]]
        cols.append(cells)
    width = max(len(c) for col in cols for c in col[:-1])
    label_w = max([len("cycle"), len("state")] + [len(n) for n in names])
    start = lasso.loop_start

    def cell(i: int, text: str) -> str:
        left = "[" if i == start else " "
        right = "]" if i == len(states) - 1 else " "
        return f"{left}{text:>{width}}{right}"

    lines = []
    rows = ["cycle"] + names
    for r, label in enumerate(rows):
        lines.append(f"{label:<{label_w}} |" + "".join(cell(i, cols[i][r]) for i in range(len(states))))
    lines.append(f"{'state':<{label_w}} | " + " ".join(f"{i}:{cols[i][-1]}" for i in range(len(states))))
    lines.append(f"loop: cycles {start}..{len(states) - 1} repeat forever")
    return "\n".join(lines) + "\n"


def lasso_digest(rendering: str) -> str:
    return hashlib.sha256(rendering.encode("utf-8")).hexdigest()[:16]
