import pytest
from hypothesis import given, strategies as st

from scltlsup import dfa, formula as fm, generators, oracle
from scltlsup.ranking import RankingFunction, compute_ranking, is_controllable, is_observable
from scltlsup.supervisor import Permissiveness

from .conftest import hand_product
from .test_formula import formulas
from .test_ranking import branching

AP = ("a", "b", "c")


class TestAttractor:
    def test_chain(self):
        p = hand_product(3, {"c": (True, True)}, [(0, "c", 1), (1, "c", 2)], [2])
        assert oracle.attractor_rank(p) == RankingFunction((2, 1, 0), 3)

    def test_uncontrollable_escape(self):
        p = hand_product(3, {"u": (False, True), "c": (True, True)}, [(0, "u", 2), (0, "c", 1)], [1])
        assert oracle.attractor_rank(p).xi == (3, 0, 3)

    def test_uncontrollable_max(self):
        edges = [(0, "u", 1), (0, "v", 2), (1, "c", 3), (2, "c", 1)]
        p = hand_product(4, {"u": (False, True), "v": (False, True), "c": (True, True)}, edges, [3])
        assert oracle.attractor_rank(p).xi == (3, 1, 2, 0)

    def test_demo(self, prod, rank):
        assert oracle.attractor_rank(prod) == rank
        assert oracle.check_rank(prod).agree

    def test_report_on_wrong_rank(self, prod, rank):
        bad = RankingFunction((0,) + rank.xi[1:], rank.alpha)
        rep = oracle.check_rank(prod, bad, instance="demo")
        assert not rep.agree
        assert rep.to_json()["divergence"]["main"] == 0

    @given(st.integers(0, 100_000))
    def test_matches_main(self, seed):
        p = generators.random_product(seed)
        assert oracle.attractor_rank(p) == compute_ranking(p)


class TestBoundedObservability:
    def test_branching_witness(self):
        p = branching()
        r = compute_ranking(p)
        v = oracle.bounded_observability(p, r, 4)
        assert not v.observable
        assert v.sigma == "o"
        assert oracle.replay_witness(p, r, v.s, v.s_prime, v.sigma)

    def test_shortest_witness(self):
        p = branching()
        v = oracle.bounded_observability(p, compute_ranking(p), 1)
        assert (v.s, v.s_prime, v.sigma) == (("u1",), ("u2",), "o")

    def test_replay_rejects_non_witness(self):
        p = branching()
        r = compute_ranking(p)
        assert not oracle.replay_witness(p, r, ("u1",), ("u1",), "o")
        assert not oracle.replay_witness(p, r, ("o",), ("u2",), "o")

    def test_bad_bound(self, prod, rank):
        with pytest.raises(ValueError):
            oracle.bounded_observability(prod, rank, 0)

    def test_demo(self, prod, rank):
        assert oracle.bounded_observability(prod, rank, 2 * prod.n_states).observable
        assert oracle.check_observability(prod, rank).agree

    def test_config_cap(self, prod, rank):
        with pytest.raises(oracle.OracleLimitError):
            oracle.bounded_observability(prod, rank, 50, max_configs=3)

    @given(st.integers(0, 100_000))
    def test_matches_main(self, seed):
        p = generators.random_product(seed)
        rep = oracle.check_observability(p, compute_ranking(p))
        assert rep.agree, rep.divergence


class TestTableau:
    @pytest.mark.parametrize("text, states", [("true", 1), ("a", 3), ("F a", 2), ("X a", 4), ("a U b", 3)])
    def test_sizes(self, text, states):
        f = fm.parse(text, AP)
        d = dfa.minimize(dfa.make_absorbing(oracle.tableau_dfa(f, ("a", "b"))))
        assert d.n_states == states == dfa.compile(f, ("a", "b")).n_states

    def test_example_formula(self, spec, plant, acceptor):
        assert oracle.language_difference(oracle.tableau_dfa(spec, plant.ap), acceptor) is None

    def test_difference_found(self):
        a = dfa.compile(fm.parse("F a", AP), AP)
        b = dfa.compile(fm.parse("X a", AP), AP)
        word = oracle.language_difference(a, b)
        assert word == [frozenset({"a"})]
        assert dfa.accepts(a, word) != dfa.accepts(b, word)

    def test_difference_needs_same_ap(self):
        with pytest.raises(ValueError):
            oracle.language_difference(dfa.compile(fm.TRUE, ("a",)), dfa.compile(fm.TRUE, ("b",)))

    def test_cap(self):
        f = fm.parse("X X X X a | X X X X b", AP)
        with pytest.raises(dfa.StateExplosionError):
            oracle.tableau_dfa(f, AP, max_states=3)

    @given(formulas())
    def test_matches_compile(self, f):
        rep = oracle.check_dfa(f, AP, maxlen=3)
        assert rep.agree, rep.divergence


class TestClosedLoop:
    def test_demo(self, prod, rank, eta):
        v = oracle.exhaustive_closed_loop(prod, rank, eta)
        assert v.holds is True
        assert v.longest_branch <= 100

    def test_unobservable_cycle(self):
        p = generators.random_product(42)
        r = compute_ranking(p)
        v = oracle.exhaustive_closed_loop(p, r, Permissiveness("linear", (r.alpha, 1)))
        assert v.holds is False
        assert "cycle" in v.reason

    def test_zero_permissiveness_terminates(self):
        for seed in range(200):
            p = generators.random_product(seed)
            r = compute_ranking(p)
            if is_controllable(p, r) and is_observable(p, r).observable:
                assert oracle.exhaustive_closed_loop(p, r, Permissiveness("table", (0,))).holds

    def test_depth_bound(self, prod, rank, eta):
        v = oracle.exhaustive_closed_loop(prod, rank, eta, depth=1)
        assert v.holds is None

    def test_report(self, prod, rank, eta):
        rep = oracle.check_closed_loop(prod, rank, eta, instance="demo")
        assert rep.agree and rep.to_json()["details"]["configurations"] > 0


def test_digest_stable():
    assert oracle.digest({"b": 1, "a": [1, 2]}) == oracle.digest({"a": [1, 2], "b": 1})
    assert len(oracle.digest("x")) == 16
