"""
Permissiveness and unobservable loops
=====================================

The observation counter only advances on observable events. A controllable,
unobservable self-loop that does not change the rank is permitted while
``eta(k) > 0``, so a plant may take it forever without ever being observed.
The exhaustive closed-loop search finds the loop, the simulator's guard
stops the episode, and a schedule that starts at zero removes it.
"""

from scltlsup import generators, oracle, sim
from scltlsup.ranking import compute_ranking, is_controllable, is_observable
from scltlsup.supervisor import Permissiveness

p = generators.random_product(42)
rank = compute_ranking(p)
for x, row in enumerate(p.delta):
    print(f"  state {x}{' (accepting)' if x in p.accepting else ''}: {row}")
print("unobservable:", [e for e in p.event_names if e not in p.observable])
print("controllable:", is_controllable(p, rank), " observable:", is_observable(p, rank).observable)

for eta in [Permissiveness("linear", (rank.alpha, 1)), Permissiveness("table", (0,))]:
    verdict = oracle.exhaustive_closed_loop(p, rank, eta)
    trace = sim.run_episode(p, rank, eta, sim.AdversarialPolicy())
    print(f"eta={eta}: every branch terminates: {verdict.holds} ({verdict.reason})")
    print(f"    adversarial plant: {trace.outcome['outcome']} after {trace.outcome['steps']} events")
