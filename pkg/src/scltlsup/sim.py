"""Closed-loop episodes: a plant policy against the on-line supervisor.

The plant fires one event at a time among those enabled at its true state
and permitted by the current pattern. Unobservable events change the hidden
state silently; an observable event is reported to the supervisor, which
updates its estimate and issues the next pattern.

Traces are JSON lines: one ``meta`` record, then ``control`` records (one per
issued pattern) interleaved with ``step`` records, then one ``outcome``.
An episode is accepted as soon as the true product state is accepting.
"""

from __future__ import annotations

import hashlib
import json
import random
import sys
from collections import deque
from dataclasses import dataclass, field
from typing import Sequence

from . import dfa as dfa_mod
from . import formula as fm
from . import product as product_mod
from .product import ProductAutomaton, TransitionClass, classify
from .ranking import RankingFunction, is_controllable, is_observable
from .supervisor import (ALGORITHMIC, EstimatorDivergence, Permissiveness, control_step,
                         initial_state, observe_update)

ACCEPTED = "accepted"
GUARD_TRIPPED = "guard-tripped"
ESTIMATOR_DIVERGED = "estimator-diverged"
SCRIPT_EXHAUSTED = "script-exhausted"
# the plant has no event that is both enabled and permitted
BLOCKED = "blocked"


class NoSupervisorError(RuntimeError):
    """The product is not controllable or not observable."""


class PolicyError(RuntimeError):
    pass


@dataclass
class Limits:
    max_unobservable: int | None = None
    max_steps: int | None = None

    def resolve(self, n_states: int) -> tuple[int, int]:
        return (self.max_unobservable if self.max_unobservable is not None else 10 * n_states,
                self.max_steps if self.max_steps is not None else 100 * n_states)


@dataclass
class Choice:
    """What a policy sees when asked for the next event."""
    p: ProductAutomaton
    rank: RankingFunction
    state: int
    permitted: list[str]
    k: int
    # every event in the issued pattern, enabled here or not
    pattern: frozenset = frozenset()


class Policy:
    kind = "policy"

    def choose(self, ctx: Choice) -> str | None:
        raise NotImplementedError

    def describe(self) -> dict:
        return {"policy": self.kind}


class RandomPolicy(Policy):
    kind = "random"

    def __init__(self, seed: int = 0):
        self.seed = seed
        self.rng = random.Random(seed)

    def choose(self, ctx):
        return self.rng.choice(ctx.permitted)

    def describe(self):
        return {"policy": self.kind, "seed": self.seed}


class ScriptedPolicy(Policy):
    """Replays a list of events.

    An observable event that is not yet possible is reached through the
    shortest path of permitted unobservable events (ties broken by event
    order), so a script may list observations only.
    """
    kind = "script"

    def __init__(self, events: Sequence[str]):
        self.events = list(events)
        self.pos = 0

    def choose(self, ctx):
        if self.pos >= len(self.events):
            return None
        want = self.events[self.pos]
        if want in ctx.permitted:
            self.pos += 1
            return want
        if want in ctx.p.observable:
            first = _unobservable_path(ctx, want)
            if first is not None:
                return first
        raise PolicyError(f"scripted event {want!r} cannot occur from {ctx.p.names[ctx.state]}")

    def describe(self):
        return {"policy": self.kind, "script": self.events}


def _unobservable_path(ctx, want):
    p = ctx.p
    pattern = ctx.pattern or frozenset(ctx.permitted)
    parent = {ctx.state: None}
    queue = deque([ctx.state])
    while queue:
        x = queue.popleft()
        if want in p.delta[x] and want in pattern:
            first = None
            while parent[x] is not None:
                x, first = parent[x]
            return first
        for e in p.sort_events(p.delta[x]):
            if e in pattern and e not in p.observable:
                y = p.delta[x][e]
                if y not in parent:
                    parent[y] = (x, e)
                    queue.append(y)
    return None


class AdversarialPolicy(Policy):
    """Prefers neutral moves, then the highest-ranked successor."""
    kind = "adversarial"

    def choose(self, ctx):
        p, rank = ctx.p, ctx.rank

        def score(e):
            y = p.delta[ctx.state][e]
            neutral = classify(p, rank, ctx.state, e) == TransitionClass.NEUTRAL
            return (neutral, rank.xi[y], -p.event_order[e])

        return max(ctx.permitted, key=score)


class InteractivePolicy(Policy):
    kind = "interactive"

    def __init__(self, stdin=None, stdout=None):
        self.stdin = stdin or sys.stdin
        self.stdout = stdout or sys.stdout

    def choose(self, ctx):
        p, rank, x = ctx.p, ctx.rank, ctx.state
        out = self.stdout
        print(f"k={ctx.k}  state {p.names[x]}  rank {rank.xi[x]}/{rank.alpha}", file=out)
        for i, e in enumerate(ctx.permitted):
            y = p.delta[x][e]
            obs = "observable" if e in p.observable else "unobservable"
            print(f"  [{i}] {e:<8} {classify(p, rank, x, e).value:<8} "
                  f"rank {rank.xi[x]} -> {rank.xi[y]} ({rank.xi[y] - rank.xi[x]:+d}) {obs}", file=out)
        while True:
            print("choose event (index or name, q to stop): ", end="", file=out, flush=True)
            line = self.stdin.readline()
            if not line or line.strip() == "q":
                return None
            ans = line.strip()
            if ans.isdigit() and int(ans) < len(ctx.permitted):
                return ctx.permitted[int(ans)]
            if ans in ctx.permitted:
                return ans
            print(f"  not a permitted event: {ans!r}", file=out)


@dataclass
class Trace:
    meta: dict
    records: list[dict] = field(default_factory=list)
    outcome: dict = field(default_factory=dict)

    @property
    def steps(self) -> list[dict]:
        return [r for r in self.records if r["type"] == "step"]

    @property
    def controls(self) -> list[dict]:
        return [r for r in self.records if r["type"] == "control"]

    def events(self) -> list[str]:
        return [r["event"] for r in self.steps]

    def label_word(self) -> list[list[str]]:
        return [self.meta["initial_label"]] + [r["label"] for r in self.steps]

    def to_jsonl(self) -> str:
        lines = [self.meta, *self.records, self.outcome]
        return "".join(json.dumps(r, sort_keys=True, separators=(",", ":")) + "\n" for r in lines)

    @classmethod
    def from_jsonl(cls, text: str) -> "Trace":
        rows = [json.loads(line) for line in text.splitlines() if line.strip()]
        if not rows or rows[0].get("type") != "meta" or rows[-1].get("type") != "outcome":
            raise ValueError("trace must start with a meta record and end with an outcome record")
        return cls(rows[0], rows[1:-1], rows[-1])


def instance_digest(p: ProductAutomaton) -> str:
    doc = json.dumps(product_mod.to_json(p), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(doc.encode()).hexdigest()[:16]


def _label(p, x):
    if p.des is None:
        return []
    return sorted(p.des.labels[p.jg[x]])


def run_episode(p: ProductAutomaton, rank: RankingFunction, eta: Permissiveness, policy: Policy,
                limits: Limits | None = None, mode: str = ALGORITHMIC,
                require_checks: bool = True) -> Trace:
    if require_checks:
        if not is_controllable(p, rank):
            raise NoSupervisorError("the product is not controllable; no supervisor guarantees the formula")
        if not is_observable(p, rank).observable:
            raise NoSupervisorError("the product is not observable; no supervisor guarantees the formula")
    eta.check(rank.alpha)
    max_unobs, max_steps = (limits or Limits()).resolve(p.n_states)

    x = p.initial
    meta = {"type": "meta", "instance": instance_digest(p), "eta": str(eta), "mode": mode,
            "alpha": rank.alpha, "ap": list(p.des.ap) if p.des is not None else [],
            "initial_state": x, "initial_state_name": p.names[x], "initial_label": _label(p, x),
            "limits": {"max_unobservable": max_unobs, "max_steps": max_steps}}
    meta.update(policy.describe())
    trace = Trace(meta)
    st = initial_state(p)
    steps = 0

    def finish(outcome, **extra):
        trace.outcome = {"type": "outcome", "outcome": outcome, "steps": steps, "observations": st.k,
                         "final_state": x, "final_state_name": p.names[x],
                         "final_accepting": x in p.accepting, **extra}
        return trace

    while not st.stopped:
        st = control_step(p, rank, eta, st, mode)
        pat = st.pattern
        trace.records.append({
            "type": "control", "k": st.k, "eta": eta(st.k),
            "pattern": p.sort_events(pat.events), "legal": p.sort_events(pat.legal),
            "permissive": p.sort_events(pat.permissive), "rejected": p.sort_events(pat.rejected),
            "forced": p.sort_events(pat.forced),
            "ns": sorted(st.ns), "ur": sorted(st.ur), "ns_next": sorted(st.ns_next),
        })
        unobs = 0
        while True:
            permitted = p.sort_events(pat.events & p.delta[x].keys())
            if not permitted:
                return finish(BLOCKED)
            ctx = Choice(p, rank, x, permitted, st.k, pat.events)
            e = policy.choose(ctx)
            if e is None:
                return finish(SCRIPT_EXHAUSTED)
            if e not in permitted:
                raise PolicyError(f"policy chose {e!r}, permitted are {permitted}")
            y = p.delta[x][e]
            cls = classify(p, rank, x, e)
            ns_before = sorted(st.ns)
            observable = e in p.observable
            diverged = None
            if observable:
                try:
                    st = observe_update(p, st, e)
                except EstimatorDivergence as exc:
                    diverged = str(exc)
            trace.records.append({
                "type": "step", "k": st.k - 1 if observable and diverged is None else st.k,
                "state": x, "state_name": p.names[x], "event": e, "observable": observable,
                "pattern": p.sort_events(pat.events), "xi_before": rank.xi[x], "xi_after": rank.xi[y],
                "eta": eta(st.k - 1 if observable and diverged is None else st.k),
                "class": cls.value, "next_state": y, "next_state_name": p.names[y],
                "label": _label(p, y), "ns_before": ns_before, "ns_after": sorted(st.ns),
            })
            x = y
            steps += 1
            if diverged is not None:
                return finish(ESTIMATOR_DIVERGED, reason=diverged)
            if x in p.accepting:
                # the visited labels already form a good prefix, whatever the estimate says
                return finish(ACCEPTED)
            if observable:
                break
            unobs += 1
            if unobs > max_unobs:
                return finish(GUARD_TRIPPED, reason="unobservable steps in one epoch exceeded the limit")
            if steps >= max_steps:
                return finish(GUARD_TRIPPED, reason="total step limit reached")
        if not st.stopped and steps >= max_steps:
            return finish(GUARD_TRIPPED, reason="total step limit reached")
    return finish(ACCEPTED)


def check_trace(trace: Trace, f: fm.Formula | str, ap: Sequence[str] | None = None) -> bool:
    """True iff the label word visited by the plant is a good prefix of ``f``."""
    ap = tuple(ap if ap is not None else trace.meta.get("ap", ()))
    if isinstance(f, str):
        f = fm.parse(f, ap)
    d = dfa_mod.compile(f, ap)
    return dfa_mod.accepts(d, trace.label_word())


def replay(p: ProductAutomaton, trace: Trace) -> list[str]:
    """Post-hoc consistency check of a trace against ``p``; returns problems found."""
    problems = []
    x = trace.meta["initial_state"]
    for i, r in enumerate(trace.steps):
        if r["state"] != x:
            problems.append(f"step {i}: starts at {r['state']}, expected {x}")
        e = r["event"]
        if e not in p.delta[r["state"]]:
            problems.append(f"step {i}: {e!r} undefined at {r['state']}")
            break
        if e not in r["pattern"]:
            problems.append(f"step {i}: {e!r} not in the issued pattern")
        x = p.delta[r["state"]][e]
        if r["next_state"] != x:
            problems.append(f"step {i}: lands at {r['next_state']}, expected {x}")
    return problems


def write_trace(trace: Trace, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(trace.to_jsonl())


def read_trace(path) -> Trace:
    with open(path, encoding="utf-8") as fh:
        return Trace.from_jsonl(fh.read())
