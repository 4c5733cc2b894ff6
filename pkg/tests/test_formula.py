import pytest
from hypothesis import given, settings

from fpvkit.formula import (
    ALWAYS, AND, ATOM, EVENTUALLY, IMPLIES, LITERAL_KINDS, NOT, OR, T, F_, And, Always, Atom, Eventually,
    Implies, Next, Not, Or, Polarity, PathError, Until, is_nnf, normalize_nnf, occurrences, replace_at,
    simplify, substitute, substitute_many, witness_formula,
)
from fpvkit.parser import ParseError, parse_formula, parse_property
from fpvkit.printer import pretty_print
from fpvkit.sva import emit_sva, load_properties, parse_property_text

from conftest import props_path
from strategies import formulas

p, q, r = Atom("p"), Atom("q"), Atom("r")
REQ_RESP = Always(Implies(p, Eventually(q)))


class TestParse:
    def test_req_resp(self):
        assert parse_formula("G (p -> F q)") == REQ_RESP

    def test_single_atom(self):
        assert parse_formula("p") == p

    @pytest.mark.parametrize("text,expected", [
        ("p U q U r", Until(p, Until(q, r))),
        ("p -> q -> r", Implies(p, Implies(q, r))),
        ("!p && q || r", Or(And(Not(p), q), r)),
        ("X X p", Next(Next(p))),
        ("p |=> q", Implies(p, Next(q))),
        ("p |-> q", Implies(p, q)),
        ("s_eventually p", Eventually(p)),
        ("always (p implies q)", Always(Implies(p, q))),
    ])
    def test_precedence_and_sugar(self, text, expected):
        assert parse_formula(text) == expected

    def test_error_message_names_token(self):
        with pytest.raises(ParseError) as info:
            parse_formula("G (p -> )")
        msg = str(info.value)
        assert msg.startswith('syntax error near ")"')
        assert info.value.line == 1 and info.value.column == 9

    def test_trailing_input_rejected(self):
        with pytest.raises(ParseError):
            parse_formula("p q")

    def test_nested_past_rejected(self):
        with pytest.raises(ParseError, match="nested past"):
            parse_formula("$past($past(p))")

    def test_property_block(self):
        f = parse_property("property a; @(posedge clk) p |=> q; endproperty")
        assert f == Always(Implies(p, Next(q)))


@settings(max_examples=300)
@given(formulas)
def test_print_parse_round_trip(f):
    assert parse_formula(pretty_print(f)) == f


class TestNNF:
    def test_duality(self):
        assert normalize_nnf(Not(Always(p))) == Eventually(Not(p))

    def test_implication_elimination(self):
        assert normalize_nnf(Not(Implies(p, q))) == And(p, Not(q))

    @settings(max_examples=300)
    @given(formulas)
    def test_shape(self, f):
        g = normalize_nnf(f)
        assert is_nnf(g)
        stack = [g]
        while stack:
            node = stack.pop()
            if node.kind in LITERAL_KINDS:
                continue
            assert node.kind != IMPLIES
            if node.kind == NOT:
                assert node.children[0].kind in LITERAL_KINDS
            else:
                stack.extend(node.children)

    @settings(max_examples=200)
    @given(formulas)
    def test_idempotent(self, f):
        g = normalize_nnf(f)
        assert normalize_nnf(g) == g


def _oracle_polarity(f, path):
    """Sign of the addressed node: count negations crossed on the way down."""
    neg = 0
    g = f
    for i in path:
        if g.kind == NOT or (g.kind == IMPLIES and i == 0):
            neg += 1
        if g.kind == "stable":
            return Polarity.MIXED
        g = g.children[i]
    return Polarity.NEGATIVE if neg % 2 else Polarity.POSITIVE


class TestOccurrences:
    def test_req_resp_polarities(self):
        occ = {str(REQ_RESP.at(o.path)): o.polarity for o in occurrences(REQ_RESP)}
        assert occ["p"] is Polarity.NEGATIVE
        assert occ["F q"] is Polarity.POSITIVE
        assert occ["q"] is Polarity.POSITIVE

    def test_multiplicity(self):
        paths = [o.path for o in occurrences(And(p, p)) if And(p, p).at(o.path) == p]
        assert paths == [(0,), (1,)]

    def test_root_not_an_occurrence(self):
        assert all(o.path for o in occurrences(REQ_RESP))

    @settings(max_examples=300)
    @given(formulas)
    def test_polarity_oracle(self, f):
        for o in occurrences(f):
            assert o.polarity is _oracle_polarity(f, o.path)
            f.at(o.path)


class TestSubstitute:
    def test_replace_by_true(self):
        occ = next(o for o in occurrences(REQ_RESP) if REQ_RESP.at(o.path) == Eventually(q))
        assert substitute(REQ_RESP, occ, True) == Always(Implies(p, T))

    def test_replace_by_false_simplifies_to_never_p(self):
        occ = next(o for o in occurrences(REQ_RESP) if REQ_RESP.at(o.path) == Eventually(q))
        assert simplify(substitute(REQ_RESP, occ, False)) == Always(Not(p))

    def test_root_rejected(self):
        with pytest.raises(PathError):
            substitute(REQ_RESP, (), True)

    def test_bad_path(self):
        with pytest.raises(PathError):
            substitute(REQ_RESP, (0, 5), True)

    @settings(max_examples=200)
    @given(formulas)
    def test_locality(self, f):
        """Substitution changes the addressed node and nothing else."""
        for o in occurrences(f)[:6]:
            g = substitute(f, o, False)
            assert g.at(o.path) == F_
            for other in occurrences(f):
                a = other.path
                if a[:len(o.path)] == o.path or o.path[:len(a)] == a:
                    continue
                assert g.at(a) == f.at(a)

    def test_simultaneous(self):
        f = And(p, Or(p, q))
        assert substitute_many(f, [(0,), (1, 0)], True) == And(T, Or(T, q))

    def test_replace_at_root(self):
        assert replace_at(p, (), q) == q


class TestWitness:
    def test_atom(self):
        assert simplify(witness_formula(p)) == p

    def test_req_resp_conjuncts(self):
        w = witness_formula(REQ_RESP)
        assert w.kind == AND
        parts = []
        stack = [w]
        while stack:
            g = stack.pop()
            if g.kind == AND and g is not REQ_RESP and g != REQ_RESP:
                stack.extend(g.children)
            else:
                parts.append(g)
        assert REQ_RESP in parts
        # consequent pinned to false: G !p must fail on interesting paths
        assert Not(Always(Not(p))) in parts


class TestSva:
    def test_next_sugar(self):
        text = emit_sva(Always(Implies(Atom("a"), Next(Atom("b")))), "p1", "clk", "rst").text
        assert "a |=> b" in text
        assert "disable iff (rst)" in text and "@(posedge clk)" in text
        assert text.splitlines()[-1] == "assert property (p1);"

    def test_round_key_round_trip(self):
        (prop,) = load_properties(props_path("des3_k_update.sva"))
        back = parse_property_text(emit_sva(prop.formula, prop.name, prop.clock, prop.disable).text)
        assert back[0].formula == prop.formula
        assert back[0].disable == prop.disable

    def test_non_always_uses_initial(self):
        text = emit_sva(Eventually(p), "p_f", disable=None).text
        assert "initial assert property" in text
        assert parse_property_text(text)[0].formula == Eventually(p)

    def test_line_format(self):
        (a, b) = parse_property_text("a1: G p\n// comment\nF q\n")
        assert (a.name, a.formula) == ("a1", Always(p))
        assert b.formula == Eventually(q)

    def test_assumption_from_disable(self):
        (prop,) = parse_property_text("property x; @(posedge clk) disable iff (!rst_ni) a |-> b; endproperty")
        assert prop.assumption == Always(Not(Not(Atom("rst_ni"))))

    @settings(max_examples=500)
    @given(formulas)
    def test_emit_parse_round_trip(self, f):
        back = parse_property_text(emit_sva(f, "p_rt", "clk", "rst").text)
        assert len(back) == 1 and back[0].formula == f
