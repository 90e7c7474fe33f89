"""
The bundled five-state plant, step by step
==========================================

Compile the specification, build the product, rank it and run the on-line
supervisor against a plant that reports ``o1 o1 o2 o3``.
"""

from scltlsup import demo, dfa, formula as fm, product, sim
from scltlsup.ranking import compute_ranking, is_controllable, is_observable
from scltlsup.supervisor import control_step, initial_state, observe_update, parse_permissiveness

plant = demo.demo_plant()
spec = fm.parse(demo.DEMO_FORMULA, plant.ap)
print("formula:", fm.to_text(spec))

# The acceptor reads one letter per visited state; bit i of a letter is ap[i].
acceptor = dfa.compile(spec, plant.ap)
print(f"acceptor: {acceptor.n_states} states, accepting {sorted(acceptor.accepting)}")

###############################################################################
# Product and ranks
# -----------------
# Rank 0 is acceptance, rank alpha means the plant can avoid acceptance forever.

p = product.build(plant, acceptor)
rank = compute_ranking(p)
for x in range(p.n_states):
    print(f"  {p.names[x]:<10} xi={rank.xi[x]}")
print("alpha =", rank.alpha)
print("controllable:", is_controllable(p, rank), " observable:", is_observable(p, rank).observable)

###############################################################################
# The supervisor, one observation at a time
# -----------------------------------------
# eta(k) = max(5 - k, 0) bounds how far a permitted event may raise the rank.

eta = parse_permissiveness(demo.DEMO_ETA)
state = initial_state(p)
for obs in ["o1", "o1", "o2", "o3"]:
    state = control_step(p, rank, eta, state)
    pat = state.pattern
    print(f"k={state.k} eta={eta(state.k)} estimate={sorted(p.names[x] for x in state.ns)}")
    print(f"    legal={sorted(pat.legal)} permissive={sorted(pat.permissive)}")
    state = observe_update(p, state, obs)
print("control stopped:", state.stopped)

###############################################################################
# The same run as a trace
# -----------------------

trace = sim.run_episode(p, rank, eta, sim.ScriptedPolicy(["o1", "o1", "o2", "o3"]))
for step in trace.steps:
    print(f"  {step['state_name']:>10} --{step['event']}--> {step['next_state_name']:<10} "
          f"xi {step['xi_before']} -> {step['xi_after']} ({step['class']})")
print("outcome:", trace.outcome["outcome"], " good prefix:", sim.check_trace(trace, spec, plant.ap))
