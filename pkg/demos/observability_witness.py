"""
When the supervisor cannot tell two states apart
================================================

Two unobservable branches lead to states where the observable event ``o``
helps on one branch and hurts on the other. The pair-verifier finds the
two strings, and the brute-force enumeration agrees.
"""

from scltlsup import oracle
from scltlsup.des import Event
from scltlsup.product import ProductAutomaton
from scltlsup.ranking import compute_ranking, is_controllable, is_observable

events = [Event("u1", True, False), Event("u2", True, False), Event("o", True, True)]
delta = [{"u1": 1, "u2": 2}, {"o": 3}, {"o": 2}, {}]
p = ProductAutomaton(events, delta, [3])

rank = compute_ranking(p)
print("ranks:", rank.xi, "alpha:", rank.alpha)
print("controllable:", is_controllable(p, rank))

rep = is_observable(p, rank)
w = rep.witness
print("observable:", rep.observable)
print(f"  s={list(w.s)} reaches {w.x1}, s'={list(w.s_prime)} reaches {w.x2}, both look the same")
print(f"  {w.sigma!r} lowers the rank after s but not after s'")

# independent check over all string pairs up to length 2 |X_P|
v = oracle.bounded_observability(p, rank, 2 * p.n_states)
print("bounded enumeration:", v.observable, list(v.s), list(v.s_prime), v.sigma)
print("witness replays:", oracle.replay_witness(p, rank, w.s, w.s_prime, w.sigma))
