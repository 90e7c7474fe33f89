"""Seeded random instances for property tests and the ``verify`` command."""

from __future__ import annotations

import random
from typing import Sequence

from . import formula as fm
from .des import Des, Event
from .product import ProductAutomaton


def _rng(seed_or_rng) -> random.Random:
    return seed_or_rng if isinstance(seed_or_rng, random.Random) else random.Random(seed_or_rng)


def random_events(rng: random.Random, m: int) -> list[Event]:
    return [Event(f"e{i}", rng.random() < 0.6, rng.random() < 0.6) for i in range(m)]


def _random_delta(rng, n, names, density, closed=frozenset()):
    """Partial transition rows in which every state is reachable from 0.

    States in ``closed`` only get successors inside ``closed``.
    """
    delta = [dict() for _ in range(n)]
    for y in range(1, n):
        sources = [x for x in range(y) if len(delta[x]) < len(names) and x not in closed]
        x = rng.choice(sources)
        e = rng.choice([e for e in names if e not in delta[x]])
        delta[x][e] = y
    inside = sorted(closed)
    for x in range(n):
        for e in names:
            if e not in delta[x] and rng.random() < density:
                delta[x][e] = rng.choice(inside) if x in closed else rng.randrange(n)
    return delta


def random_product(seed_or_rng=None, max_states: int = 10, max_events: int = 5,
                   density: float = 0.35) -> ProductAutomaton:
    """A reachable arena with random event partitions and at least one accepting state.

    As in any product with an absorbing acceptor, successors of accepting
    states are accepting. The initial state is accepting only when it is the
    sole state.
    """
    rng = _rng(seed_or_rng)
    n = rng.randint(1, max_states)
    k = 1 if n == 1 else rng.randint(1, max(1, (n - 1) // 3))
    live = max(n - k, 1)
    # enough events for a spanning tree hanging off the non-accepting states
    m = max(rng.randint(1, max_events), -(-(n - 1) // live))
    events = random_events(rng, m)
    accepting = range(n - k, n) if n > 1 else [0]
    delta = _random_delta(rng, n, [e.name for e in events], density,
                          frozenset(accepting) if n > 1 else frozenset())
    return ProductAutomaton(events, delta, accepting)


def random_des(seed_or_rng=None, max_states: int = 8, max_events: int = 4,
               ap: Sequence[str] = ("a", "b"), density: float = 0.35) -> Des:
    rng = _rng(seed_or_rng)
    n = rng.randint(1, max_states)
    m = rng.randint(1, max_events)
    events = random_events(rng, m)
    delta = _random_delta(rng, n, [e.name for e in events], density)
    transitions = [(x, e, y) for x, row in enumerate(delta) for e, y in row.items()]
    labels = {x: [a for a in ap if rng.random() < 0.4] for x in range(n)}
    return Des([f"s{x}" for x in range(n)], events, transitions, 0, ap, labels)


def random_formula(seed_or_rng=None, ap: Sequence[str] = ("a", "b", "c"), depth: int = 3) -> fm.Formula:
    """Random scLTL formula with operator depth at most ``depth``."""
    rng = _rng(seed_or_rng)

    def leaf():
        r = rng.random()
        if r < 0.08:
            return fm.TRUE
        a = rng.choice(ap)
        return fm.NegAtom(a) if r < 0.4 else fm.Atom(a)

    def gen(d):
        if d == 0 or rng.random() < 0.2:
            return leaf()
        op = rng.choice(("and", "or", "next", "until", "eventually"))
        if op == "and":
            return fm.And(gen(d - 1), gen(d - 1))
        if op == "or":
            return fm.Or(gen(d - 1), gen(d - 1))
        if op == "next":
            return fm.Next(gen(d - 1))
        if op == "until":
            return fm.Until(gen(d - 1), gen(d - 1))
        return fm.eventually(gen(d - 1))

    return gen(depth)
