import itertools
import random

import pytest

from fpvkit.buchi import degeneralize, ltl_to_buchi, tableau
from fpvkit.formula import T, Always, Atom, Eventually, Implies, Not, Until, normalize_nnf
from fpvkit.model import eval_state_formula
from fpvkit.semantics import eval_on_word

from oracles import random_formula

NAMES = ("p", "q", "r")
LETTERS = list(itertools.product((0, 1), repeat=len(NAMES)))


def lookup(letter):
    d = dict(zip(NAMES, letter))
    return lambda s, past: d[s]


def literal_holds(letter, lit):
    return eval_state_formula(lit, lookup(letter))


def generalized_accepts(g, letters, loop_start):
    """Acceptance of a generalized automaton on a lasso word, by SCC search.

    Independent of the degeneralization: looks for a reachable cycle in
    positions x states that meets every acceptance set.
    """
    n = len(letters)
    nxt = list(range(1, n)) + [loop_start]

    def ok(i, q):
        pos, neg = g.labels[q]
        return all(literal_holds(letters[i], l) for l in pos) and not any(literal_holds(letters[i], l) for l in neg)

    nodes = {(0, q) for q in g.init if ok(0, q)}
    edges = {}
    stack = list(nodes)
    while stack:
        i, q = stack.pop()
        out = [(nxt[i], r) for r in g.succ[q] if ok(nxt[i], r)]
        edges[(i, q)] = out
        for v in out:
            if v not in nodes:
                nodes.add(v)
                stack.append(v)

    def reach(src):
        seen, st = set(), [src]
        while st:
            u = st.pop()
            for v in edges[u]:
                if v not in seen:
                    seen.add(v)
                    st.append(v)
        return seen

    closure = {u: reach(u) for u in nodes}
    for u in nodes:
        if u not in closure[u]:
            continue
        scc = {v for v in closure[u] if u in closure[v]}
        if all(any(v[1] in acc for v in scc) for acc in g.acceptance):
            return True
    return False


def words(max_len, rng=None, samples=0, lengths=(4, 5)):
    for n in range(1, max_len + 1):
        for w in itertools.product(LETTERS, repeat=n):
            for j in range(n):
                yield list(w), j
    for _ in range(samples):
        n = rng.choice(lengths)
        yield [rng.choice(LETTERS) for _ in range(n)], rng.randrange(n)


def test_true_is_one_accepting_state():
    a = ltl_to_buchi(T)
    assert a.num_states == 1
    assert a.accepting == frozenset({0})
    assert a.succ == ((0,),)


def test_always_p_rejects_any_not_p():
    a = ltl_to_buchi(Always(Atom("p")))
    for w, j in words(3):
        expected = all(letter[0] for letter in w)
        assert a.accepts_lasso(w, j, literal_holds) == expected


def test_acceptance_sets_are_state_subsets():
    rng = random.Random(7)
    for _ in range(50):
        g = tableau(normalize_nnf(random_formula(rng, rng.randint(1, 4), NAMES)))
        for acc in g.acceptance:
            assert acc <= set(range(g.num_states))


def test_tableau_rejects_non_nnf():
    with pytest.raises(ValueError):
        tableau(Implies(Atom("p"), Atom("q")))


@pytest.mark.parametrize("f", [
    Always(Eventually(Atom("p"))),
    Always(Implies(Atom("p"), Eventually(Atom("q")))),
    Until(Atom("p"), Atom("q")),
    Eventually(Always(Not(Atom("r")))),
])
def test_degeneralization_preserves_language(f):
    g = tableau(normalize_nnf(f))
    b = degeneralize(g)
    for w, j in words(3):
        assert b.accepts_lasso(w, j, literal_holds) == generalized_accepts(g, w, j)


def test_degeneralization_random():
    rng = random.Random(11)
    for _ in range(30):
        g = tableau(normalize_nnf(random_formula(rng, rng.randint(2, 4), NAMES)))
        b = degeneralize(g)
        for w, j in words(2, rng, samples=40):
            assert b.accepts_lasso(w, j, literal_holds) == generalized_accepts(g, w, j)


def test_language_agreement_with_direct_evaluation():
    """200 random formulas of depth <= 4 over three variables.

    Every word of length <= 3 is checked, plus sampled words of length
    4 and 5.
    """
    rng = random.Random(2024)
    for _ in range(200):
        f = random_formula(rng, rng.randint(1, 4), NAMES)
        a = ltl_to_buchi(f)
        for w, j in words(3, rng, samples=60):
            expected = eval_on_word(f, [lookup(x) for x in w], j)
            assert a.accepts_lasso(w, j, literal_holds) == expected, (f, w, j)
