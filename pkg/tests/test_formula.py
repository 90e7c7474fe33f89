import itertools

import pytest
from hypothesis import given, strategies as st

from scltlsup import formula as fm
from scltlsup.formula import (TRUE, FALSE, And, Atom, NegAtom, Next, Or, Until, eventually)

AP = ("a", "b", "c")


def formulas(depth=3):
    leaves = st.one_of(st.just(TRUE), st.sampled_from(AP).map(Atom), st.sampled_from(AP).map(NegAtom))
    return st.recursive(leaves, lambda sub: st.one_of(
        st.builds(And, sub, sub), st.builds(Or, sub, sub), st.builds(Next, sub),
        st.builds(Until, sub, sub), st.builds(eventually, sub)), max_leaves=8)


def words(maxlen=4):
    return st.lists(st.frozensets(st.sampled_from(AP)), max_size=maxlen)


class TestParse:
    def test_example_structure(self):
        f = fm.parse("F a & !a U b & !a U c", AP)
        assert f == And(And(eventually(Atom("a")), Until(NegAtom("a"), Atom("b"))),
                        Until(NegAtom("a"), Atom("c")))

    def test_precedence(self):
        assert fm.parse("a | b & c") == Or(Atom("a"), And(Atom("b"), Atom("c")))
        assert fm.parse("a U b U c") == Until(Atom("a"), Until(Atom("b"), Atom("c")))
        assert fm.parse("X a U b") == Until(Next(Atom("a")), Atom("b"))
        assert fm.parse("a & b U c") == And(Atom("a"), Until(Atom("b"), Atom("c")))
        assert fm.parse("a | b | c") == Or(Or(Atom("a"), Atom("b")), Atom("c"))

    def test_true_and_parentheses(self):
        assert fm.parse("true") == TRUE
        assert fm.parse("((a))") == Atom("a")

    @pytest.mark.parametrize("text", ["F (a", "a &", "!(a & b)", "!X a", "false", "a b", "", "a $ b"])
    def test_syntax_errors(self, text):
        with pytest.raises(fm.FormulaSyntaxError):
            fm.parse(text, AP)

    def test_error_offset(self):
        with pytest.raises(fm.FormulaSyntaxError) as exc:
            fm.parse("a & (b | ", AP)
        assert exc.value.offset == len("a & (b | ")

    def test_undeclared_atom(self):
        with pytest.raises(fm.FormulaSyntaxError):
            fm.parse("F d", AP)

    def test_atoms(self):
        assert fm.atoms(fm.parse("F a & !b U X c")) == {"a", "b", "c"}


class TestRoundTrip:
    @given(formulas())
    def test_text(self, f):
        assert fm.parse(fm.to_text(f)) == f

    @given(formulas())
    def test_json(self, f):
        assert fm.from_json(fm.to_json(f)) == f

    def test_eventually_printed_as_f(self):
        assert fm.to_text(eventually(Atom("a"))) == "F a"


class TestDerivative:
    def test_eventually_on_empty_letter(self):
        f = fm.parse("F a")
        assert fm.derivative(f, set()) == f

    def test_eventually_on_matching_letter(self):
        assert fm.derivative(fm.parse("F a"), {"a"}) == TRUE

    def test_atoms(self):
        assert fm.derivative(Atom("a"), {"a"}) == TRUE
        assert fm.derivative(Atom("a"), set()) == FALSE
        assert fm.derivative(NegAtom("a"), {"a"}) == FALSE

    def test_next(self):
        assert fm.derivative(fm.parse("X b"), {"a"}) == Atom("b")

    def test_until_expansion(self):
        # a U b on {a}: rhs fails, lhs holds, so the obligation persists
        f = fm.parse("a U b")
        assert fm.derivative(f, {"a"}) == f
        assert fm.derivative(f, {"b"}) == TRUE
        assert fm.derivative(f, set()) == FALSE

    def test_example_word(self):
        f = fm.parse("F a & !a U b & !a U c", AP)
        g = f
        for letter in [set(), {"b"}, {"c"}, {"a"}]:
            g = fm.derivative(g, letter)
        assert g == TRUE

    @given(formulas(), st.frozensets(st.sampled_from(AP)))
    def test_simplify_preserves_derivative_meaning(self, f, letter):
        # one-letter good prefixes agree with and without simplification
        assert (fm.derivative(f, letter) == TRUE) == (fm.simplify(fm.raw_derivative(f, letter)) == TRUE)


class TestSimplify:
    def test_example(self):
        assert fm.simplify(fm.parse("F a | (F a & b)")) == fm.parse("F a")

    def test_tautology(self):
        assert fm.simplify(fm.parse("a | !a")) == TRUE

    def test_contradiction(self):
        assert fm.simplify(fm.parse("a & !a")) == FALSE

    def test_consensus(self):
        assert fm.simplify(fm.parse("a & b | !a & b")) == Atom("b")

    def test_temporal_rewrites(self):
        assert fm.simplify(fm.parse("X true")) == TRUE
        assert fm.simplify(fm.parse("a U true")) == TRUE
        assert fm.simplify(fm.parse("(a & !a) U b")) == Atom("b")

    @given(formulas())
    def test_idempotent(self, f):
        g = fm.simplify(f)
        assert fm.simplify(g) == g


class TestGoodPrefixBounds:
    def test_example_lb(self):
        f = fm.parse("F a & !a U b & !a U c", AP)
        assert fm.good_prefix_lb(f, [set(), {"b"}, {"c"}, {"a"}])

    def test_example_not_yet(self):
        f = fm.parse("F a & !a U b & !a U c", AP)
        assert not fm.good_prefix_lb(f, [set(), {"b"}])
        assert fm.good_prefix_ub(f, [set(), {"b"}])

    def test_dead_prefix(self):
        f = fm.parse("!a U b")
        assert not fm.good_prefix_ub(f, [{"a"}])

    def test_empty_word(self):
        assert fm.good_prefix_lb(TRUE, [])
        assert not fm.good_prefix_lb(Atom("a"), [])

    @given(formulas(), words())
    def test_lb_implies_ub(self, f, w):
        if fm.good_prefix_lb(f, w):
            assert fm.good_prefix_ub(f, w)

    @given(formulas(), words(3), words(2))
    def test_lb_monotone_in_extensions(self, f, w, v):
        if fm.good_prefix_lb(f, w):
            assert fm.good_prefix_lb(f, w + v)


def test_exhaustive_sandwich_small():
    f = fm.parse("F a & !a U b", ("a", "b"))
    letters = [frozenset(s) for s in [(), ("a",), ("b",), ("a", "b")]]
    for n in range(4):
        for w in itertools.product(letters, repeat=n):
            assert not fm.good_prefix_lb(f, w) or fm.good_prefix_ub(f, w)
