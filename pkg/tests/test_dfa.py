import itertools
import json

import pytest
from hypothesis import given, strategies as st

from scltlsup import dfa, formula as fm, oracle
from scltlsup.dfa import Dfa

from .test_formula import formulas

AP3 = ("a", "b", "c")


def all_words(ap, maxlen):
    letters = [dfa.letter_atoms(ap, i) for i in range(1 << len(ap))]
    for n in range(maxlen + 1):
        yield from itertools.product(letters, repeat=n)


class TestLetters:
    def test_bit_order(self):
        assert dfa.letter_index(("a", "b", "c"), {"a", "c"}) == 0b101
        assert dfa.letter_atoms(("a", "b", "c"), 0b110) == {"b", "c"}

    def test_unknown_atom(self):
        with pytest.raises(dfa.AlphabetError):
            dfa.letter_index(("a",), {"z"})

    def test_index_range(self):
        with pytest.raises(dfa.AlphabetError):
            dfa.letter_index(("a",), 2)


class TestCompile:
    @pytest.mark.parametrize("text, ap, n", [("true", (), 1), ("a", ("a",), 3), ("F a", ("a",), 2),
                                             ("F a & !a U b & !a U c", AP3, 6)])
    def test_state_counts(self, text, ap, n):
        assert dfa.compile(fm.parse(text, ap), ap).n_states == n

    def test_example_accepts(self):
        d = dfa.compile(fm.parse("F a & !a U b & !a U c", AP3), AP3)
        assert len(d.accepting) == 1
        assert dfa.accepts(d, [set(), {"b"}, {"c"}, {"a"}])
        assert dfa.accepts(d, [{"b"}, {"c"}, {"a"}])
        assert not dfa.accepts(d, [{"a"}, {"b"}, {"c"}])
        assert not dfa.accepts(d, [{"b", "c"}])

    def test_example_matches_lower_bound(self):
        f = fm.parse("F a & !a U b & !a U c", AP3)
        d = dfa.compile(f, AP3)
        for w in all_words(AP3, 4):
            assert dfa.accepts(d, w) == fm.good_prefix_lb(f, w)

    def test_acceptance_absorbing(self):
        d = dfa.compile(fm.parse("F a & X b", ("a", "b")), ("a", "b"))
        assert d.is_absorbing()

    def test_initial_is_zero_and_dense(self):
        d = dfa.compile(fm.parse("a U b", ("a", "b")), ("a", "b"))
        assert d.initial == 0
        assert all(len(row) == 4 for row in d.transitions)

    def test_state_cap(self):
        f = fm.parse("X X X X a", ("a",))
        with pytest.raises(dfa.StateExplosionError):
            dfa.compile(f, ("a",), max_states=3)

    def test_ap_must_cover_formula(self):
        with pytest.raises(dfa.AlphabetError):
            dfa.compile(fm.parse("F a & F b"), ("a",))

    def test_unminimized_language_equal(self):
        f = fm.parse("F a & !a U b & !a U c", AP3)
        raw = dfa.compile(f, AP3, minimal=False)
        small = dfa.minimize(raw)
        assert small.n_states <= raw.n_states
        assert oracle.language_difference(raw, small) is None
        for w in all_words(AP3, 4):
            assert dfa.accepts(raw, w) == dfa.accepts(small, w)

    @given(formulas())
    def test_language_sandwich(self, f):
        d = dfa.compile(f, AP3)
        for w in all_words(AP3, 2):
            acc = dfa.accepts(d, w)
            assert not fm.good_prefix_lb(f, w) or acc
            assert not acc or fm.good_prefix_ub(f, w)

    @given(formulas())
    def test_minimize_idempotent(self, f):
        d = dfa.compile(f, AP3)
        assert dfa.minimize(d) == d


class TestJson:
    def test_round_trip(self):
        d = dfa.compile(fm.parse("F a & !a U b", ("a", "b")), ("a", "b"))
        doc = json.loads(json.dumps(dfa.to_json(d)))
        assert dfa.from_json(doc) == d

    def test_rejects_partial_rows(self):
        with pytest.raises(ValueError):
            Dfa(("a",), ((0,),), 0, frozenset())
