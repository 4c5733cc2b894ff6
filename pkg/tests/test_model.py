import random
from collections import deque

import pytest
from hypothesis import given, settings, strategies as st

from fpvkit import kernels
from fpvkit.formula import Always, Atom, Eventually, Implies, Next, Not
from fpvkit.model import Lasso, Model, ModelError, UndeclaredSignal, cone_of_influence, load_model
from fpvkit.parser import parse_formula
from fpvkit.semantics import eval_on_lasso

from conftest import model_path
from oracles import transitive_closure_oracle

p, q = Atom("p"), Atom("q")


def bfs_oracle(succ, init):
    seen = set(init)
    queue = deque(init)
    while queue:
        s = queue.popleft()
        for t in succ[s]:
            if t not in seen:
                seen.add(t)
                queue.append(t)
    return sorted(seen)


class TestLoad:
    def test_single_state(self):
        m = load_model(model_path("one_state"))
        assert m.num_states == 1
        assert m.labels(0) == {"p", "q"}
        assert m.succ == ((0,),)

    def test_counter_fsm(self):
        m = load_model(model_path("counter2"))
        assert m.num_states == 4
        assert m.reachable_states() == [0, 1, 2, 3]
        values = {m.value(s, "c") for s in m.reachable_states()}
        assert values == {0, 1, 2, 3}
        # increment wraps around
        for s in range(4):
            (t,) = m.succ[s]
            assert m.value(t, "c") == (m.value(s, "c") + 1) % 4

    def test_dead_end_rejected(self):
        doc = {"variables": ["p"], "states": {"a": {"p": 1}, "b": {"p": 0}}, "init": ["a"],
               "transitions": [["a", "b"]]}
        with pytest.raises(ModelError, match="non-total transition relation"):
            load_model(doc)

    def test_dead_end_completed(self):
        doc = {"variables": ["p"], "states": {"a": {"p": 1}, "b": {"p": 0}}, "init": ["a"],
               "transitions": [["a", "b"]]}
        m = load_model(doc, complete_selfloop=True)
        assert m.succ == ((1,), (1,))

    @pytest.mark.parametrize("doc,msg", [
        ({"variables": ["p"], "states": {"a": {}}, "init": ["a"], "transitions": [["a", "a"]]}, "does not assign"),
        ({"variables": ["p"], "states": {"a": {"p": 1, "z": 0}}, "init": ["a"],
          "transitions": [["a", "a"]]}, "undeclared variable"),
        ({"variables": ["p"], "states": {"a": {"p": 1}}, "init": ["x"], "transitions": [["a", "a"]]},
         "unknown initial state"),
        ({"variables": ["p"], "states": {"a": {"p": 1}}, "init": ["a"], "transitions": [["a", "a"]],
          "deps": [["p", "nope"]]}, "nope"),
        ({"variables": ["p"], "init": ["a"]}, "missing section"),
    ])
    def test_schema_errors(self, doc, msg):
        with pytest.raises(ModelError, match=msg):
            load_model(doc)

    def test_fsm_guarded_rules(self):
        m = load_model(model_path("valid_counter_stuck"))
        assert {m.value(s, "validCounter") for s in m.reachable_states()} == {0, 1}

    def test_fsm_out_of_range(self):
        doc = {"variables": {"c": {"type": "int", "width": 2, "max": 2}}, "init": {"c": 0},
               "transitions": {"rules": {"c": "c + 1"}}}
        with pytest.raises(ModelError):
            load_model(doc)

    def test_fsm_deps_derived_from_rules(self):
        m = load_model(model_path("toy_uart"))
        assert ("rx_in", "rx_valid") in m.deps
        assert ("parity_bit", "rx_parity_err") in m.deps
        assert ("rx_in", "rx_parity_err") not in m.deps

    def test_undeclared_signal(self):
        m = load_model(model_path("one_state"))
        with pytest.raises(UndeclaredSignal):
            m.check_signals(Atom("zz"))


class TestReachability:
    def test_self_loop(self):
        assert load_model(model_path("one_state")).reachable_states() == [0]

    def test_shadow_state_excluded(self):
        states = {f"c{i}": {"c": i, "rst": False} for i in range(4)}
        states["shadow"] = {"c": 0, "rst": True}
        doc = {"variables": {"c": {"type": "int", "width": 2}, "rst": "bool"}, "states": states,
               "init": ["c0"],
               "transitions": [["c0", "c1"], ["c1", "c2"], ["c2", "c3"], ["c3", "c0"], ["shadow", "c0"]]}
        m = load_model(doc)
        got = m.reachable_states()
        assert got == bfs_oracle(m.succ, m.init) == [0, 1, 2, 3]

    @settings(max_examples=100)
    @given(st.integers(1, 30), st.randoms(use_true_random=False))
    def test_against_bfs(self, n, rng):
        succ = [sorted({rng.randrange(n) for _ in range(rng.randint(1, 3))}) for _ in range(n)]
        init = sorted({rng.randrange(n) for _ in range(rng.randint(1, 2))})
        expected = bfs_oracle(succ, init)
        assert kernels.reachable(succ, init, backend="python") == expected
        assert kernels.reachable(succ, init) == expected


class TestCone:
    def test_no_incoming(self):
        m = Model.explicit(["p", "q"], [{"p": 0, "q": 1}], ["s0"], [["s0", "s0"]])
        assert cone_of_influence(m, Always(q)) == {"q"}

    def test_transitive(self):
        m = Model.explicit(["p", "q", "r"], [{"p": 0, "q": 1, "r": 0}], ["s0"], [["s0", "s0"]],
                           deps=[("p", "q"), ("r", "p")])
        assert cone_of_influence(m, Always(q)) == {"q", "p", "r"}

    @settings(max_examples=100)
    @given(st.integers(1, 20), st.randoms(use_true_random=False))
    def test_closure_oracle(self, n, rng):
        names = [f"v{i}" for i in range(n)]
        edges = {(rng.choice(names), rng.choice(names)) for _ in range(rng.randint(0, 2 * n))}
        m = Model.explicit(names, [{v: 0 for v in names}], ["s0"], [["s0", "s0"]], deps=edges)
        start = rng.sample(names, rng.randint(1, min(3, n)))
        f = Atom(start[0])
        for s in start[1:]:
            f = Implies(f, Atom(s))
        assert cone_of_influence(m, f) == transitive_closure_oracle(edges, start)


class TestPastAndHavoc:
    def test_with_past_tracks_previous(self):
        m = load_model(model_path("counter2"))
        mp = m.with_past(["c"])
        for s in mp.reachable_states():
            if s in mp.init:
                continue
            assert mp.value(s, "$past(c)") == (mp.value(s, "c") - 1) % 4

    def test_havoc_frees_variable(self):
        m = load_model(model_path("counter2"))
        h = m.havoc(["c"])
        assert {h.value(s, "c") for s in h.reachable_states()} == {0, 1, 2, 3}
        assert all(len(h.succ[s]) == 4 for s in h.reachable_states())

    def test_havoc_explicit(self):
        m = load_model(model_path("p_never"))
        h = m.havoc(["p"])
        assert {h.value(s, "p") for s in h.reachable_states()} == {0, 1}


class TestLasso:
    def test_validate(self):
        m = load_model(model_path("p_then_q"))
        Lasso((0, 1, 2), (0,)).validate(m)
        with pytest.raises(ModelError):
            Lasso((), (1,)).validate(m)

    def test_normalized(self):
        assert Lasso((0, 1), (2, 1, 2, 1)).normalized() == Lasso((0,), (1, 2))


class TestEvalOnLasso:
    def setup_method(self):
        self.m = Model.explicit(["p", "q"], {"a": {"p": 1, "q": 0}, "b": {"p": 0, "q": 1}}, ["a"],
                                [["a", "a"], ["a", "b"], ["b", "b"], ["b", "a"]])

    def test_eventually_in_loop(self):
        assert eval_on_lasso(Eventually(q), Lasso((0,), (1,)), self.m)

    def test_always_broken_in_stem(self):
        assert not eval_on_lasso(Always(p), Lasso((0, 1), (0,)), self.m)

    def test_next(self):
        assert eval_on_lasso(Next(q), Lasso((0,), (1,)), self.m)
        assert not eval_on_lasso(Next(q), Lasso((), (0,)), self.m)

    def test_past_and_stable(self):
        lasso = Lasso((0,), (1, 0))
        # position 0 sees itself as previous, so $stable holds there
        assert eval_on_lasso(parse_formula("$stable(p)"), lasso, self.m)
        assert eval_on_lasso(parse_formula("X !$stable(p)"), lasso, self.m)
        assert eval_on_lasso(parse_formula("G (q -> $past(p))"), lasso, self.m)
