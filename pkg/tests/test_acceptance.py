"""Acceptance criteria 1-7.

Each test records one PASS/FAIL line, printed in the terminal summary by
``conftest.pytest_terminal_summary``.
"""

import random
import time

import pytest

from scltlsup import dfa, generators, oracle, sim
from scltlsup.ranking import compute_ranking, is_controllable, is_observable
from scltlsup.supervisor import ALGORITHMIC, Permissiveness, control_step, initial_state, observe_update

from .conftest import example_state
from .test_ranking import can_reach_accepting

RESULTS: dict[int, str] = {}

N_PRODUCTS = 1000


def report(n, ok, detail):
    RESULTS[n] = f"criterion {n}: {'PASS' if ok else 'FAIL'}  {detail}"
    print(RESULTS[n])
    assert ok, RESULTS[n]


@pytest.fixture(scope="module")
def corpus():
    out = []
    for seed in range(N_PRODUCTS):
        p = generators.random_product(seed, max_states=10, max_events=5)
        out.append((seed, p))
    return out


def test_criterion_1_rank_oracle(corpus):
    t0 = time.perf_counter()
    bad = [seed for seed, p in corpus if compute_ranking(p) != oracle.attractor_rank(p)]
    elapsed = time.perf_counter() - t0
    report(1, not bad and elapsed < 30,
           f"{len(corpus)} products, {len(bad)} disagreements, {elapsed:.2f}s (limit 30s)")


def test_criterion_2_rank_invariants(corpus):
    counts = {"inequality": 0, "zero-iff-accepting": 0, "below-cap-reaches": 0, "lower-successor": 0,
              "uncontrollable-lower": 0}
    below_cap_uncontrollable = 0
    for _, p in corpus:
        r = compute_ranking(p)
        xi, alpha = r.xi, r.alpha
        for x, row in enumerate(p.delta):
            acc = x in p.accepting
            ind = 0 if acc else 1
            for e, y in row.items():
                if e not in p.controllable and xi[x] < min(xi[y] + ind, alpha):
                    counts["inequality"] += 1
            if (xi[x] == 0) != acc:
                counts["zero-iff-accepting"] += 1
            if xi[x] < alpha and not can_reach_accepting(p, x):
                counts["below-cap-reaches"] += 1
            if 0 < xi[x] < alpha and not any(xi[y] < xi[x] for y in row.values()):
                counts["lower-successor"] += 1
            if not acc:
                for e, y in row.items():
                    if e not in p.controllable and not xi[y] < xi[x]:
                        counts["uncontrollable-lower"] += 1
                        if xi[x] < alpha:
                            below_cap_uncontrollable += 1
    total = sum(counts.values())
    detail = ", ".join(f"{k}={v}" for k, v in counts.items())
    report(2, total == 0, f"violations: {detail} (of the uncontrollable-lower ones, "
                          f"{below_cap_uncontrollable} at states below the cap)")


def test_criterion_3_dfa():
    t0 = time.perf_counter()
    rng = random.Random(3)
    bad = []
    for i in range(200):
        sub = random.Random(rng.getrandbits(64))
        ap = ("a", "b", "c")[:sub.randint(1, 3)]
        f = generators.random_formula(sub, ap, 3)
        rep = oracle.check_dfa(f, ap, maxlen=4, instance=str(i))
        if not rep.agree:
            bad.append((i, rep.divergence))
    elapsed = time.perf_counter() - t0
    report(3, not bad and elapsed < 60, f"200 formulas, {len(bad)} disagreements, {elapsed:.2f}s (limit 60s)")


def test_criterion_4_observability(corpus):
    t0 = time.perf_counter()
    bad, negatives, unreplayable = [], 0, 0
    for seed, p in corpus[:500]:
        r = compute_ranking(p)
        main = is_observable(p, r)
        ref = oracle.bounded_observability(p, r, 2 * p.n_states)
        if main.observable != ref.observable:
            bad.append(seed)
        if not main.observable:
            negatives += 1
            w = main.witness
            if w is None or not oracle.replay_witness(p, r, w.s, w.s_prime, w.sigma):
                unreplayable += 1
    elapsed = time.perf_counter() - t0
    report(4, not bad and not unreplayable and elapsed < 60,
           f"500 products, {len(bad)} disagreements, {negatives} negative verdicts, "
           f"{unreplayable} without a replayable witness, {elapsed:.2f}s (limit 60s)")


def test_criterion_5_closed_loop(corpus):
    checked, failures = 0, []
    for seed, p in corpus:
        r = compute_ranking(p)
        if not (is_controllable(p, r) and is_observable(p, r).observable):
            continue
        checked += 1
        eta = Permissiveness("linear", (r.alpha, 1))
        v = oracle.exhaustive_closed_loop(p, r, eta, depth=100, mode=ALGORITHMIC)
        if v.holds is not True:
            failures.append((seed, v.reason))
    reasons = sorted({reason for _, reason in failures})
    report(5, not failures, f"{checked} supervised instances, {len(failures)} with a failing branch"
                            + (f" (first: seed {failures[0][0]}; reasons: {'; '.join(reasons)})" if failures else ""))


def test_criterion_6_worked_example(prod, rank, eta):
    t0 = time.perf_counter()
    checks = {}
    s = control_step(prod, rank, eta, initial_state(prod), ALGORITHMIC)
    checks["legal part at the start is {u2,o2}"] = s.pattern.legal == {"u2", "o2"}
    checks["re-expansion adds {u3,o1,o3} at k=0"] = s.pattern.permissive == {"u3", "o1", "o3"}
    s = control_step(prod, rank, eta, observe_update(prod, s, "o1"))
    checks["estimate after first o1"] = s.ns == {example_state(prod, "(x0,y0)"), example_state(prod, "(x4,y0)")}
    s = control_step(prod, rank, eta, observe_update(prod, s, "o1"))
    checks["pattern at k=2 is {u2,o2}"] = s.pattern.events == {"u2", "o2"}
    s = control_step(prod, rank, eta, observe_update(prod, s, "o2"))
    checks["estimate after the next move is accepting at k=3"] = s.k == 3 and bool(s.ns_next) \
        and s.ns_next <= prod.accepting
    elapsed = time.perf_counter() - t0
    failed = [k for k, ok in checks.items() if not ok]
    report(6, not failed and elapsed < 1, f"{len(checks) - len(failed)}/{len(checks)} checks, {elapsed:.3f}s (limit 1s)"
           + (f"; failed: {failed}" if failed else ""))


def test_criterion_7_determinism(prod, rank, eta, tmp_path):
    same = True
    for label, make in [("random seed 7", lambda: sim.RandomPolicy(7)),
                        ("script", lambda: sim.ScriptedPolicy(["o1", "o1", "o2", "o3"])),
                        ("adversarial", sim.AdversarialPolicy)]:
        a, b = tmp_path / f"{label}-a.jsonl", tmp_path / f"{label}-b.jsonl"
        sim.write_trace(sim.run_episode(prod, rank, eta, make()), a)
        sim.write_trace(sim.run_episode(prod, rank, eta, make()), b)
        same &= a.read_bytes() == b.read_bytes()
    p = generators.random_product(11)
    r = compute_ranking(p)
    if is_controllable(p, r) and is_observable(p, r).observable:
        e = Permissiveness("linear", (r.alpha, 1))
        same &= sim.run_episode(p, r, e, sim.RandomPolicy(1)).to_jsonl() == \
            sim.run_episode(p, r, e, sim.RandomPolicy(1)).to_jsonl()
    report(7, same, "repeated runs write byte-identical trace files")
