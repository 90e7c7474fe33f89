"""Ranking functions on product automata, controllability and observability."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Sequence

from .product import ProductAutomaton


@dataclass(frozen=True)
class RankingFunction:
    xi: tuple[int, ...]
    alpha: int
    # non-accepting states without any defined event; they are ranked alpha
    dead_states: tuple[int, ...] = field(default=(), compare=False)

    def __getitem__(self, x: int) -> int:
        return self.xi[x]


def compute_ranking(p: ProductAutomaton, order: Sequence[int] | None = None) -> RankingFunction:
    """Least ranking function by monotone worklist iteration.

    A non-accepting state is raised to ``min(alpha, 1 + r)`` where ``r`` is the
    largest rank among its uncontrollable successors, or the smallest rank
    among its controllable successors when no uncontrollable event is
    defined. Accepting states keep rank 0. ``order`` sets the initial worklist
    order; the result does not depend on it.
    """
    n = p.n_states
    alpha = n - len(p.accepting) + 1
    xi = [0] * n
    preds = [set() for _ in range(n)]
    for x, row in enumerate(p.delta):
        for y in row.values():
            preds[y].add(x)

    uc = [[y for e, y in row.items() if e not in p.controllable] for row in p.delta]
    ctrl = [[y for e, y in row.items() if e in p.controllable] for row in p.delta]
    dead = tuple(x for x in range(n) if x not in p.accepting and not p.delta[x])

    def target(x):
        if uc[x]:
            r = max(xi[y] for y in uc[x])
        elif ctrl[x]:
            r = min(xi[y] for y in ctrl[x])
        else:
            r = alpha - 1
        return r + 1 if r < alpha else r

    worklist = deque(x for x in (range(n) if order is None else order) if x not in p.accepting)
    queued = [False] * n
    for x in worklist:
        queued[x] = True
    while worklist:
        x = worklist.popleft()
        queued[x] = False
        t = target(x)
        if xi[x] < t:
            xi[x] = t
            for w in preds[x]:
                if not queued[w] and w not in p.accepting:
                    queued[w] = True
                    worklist.append(w)
    return RankingFunction(tuple(xi), alpha, dead)


def is_controllable(p: ProductAutomaton, rank: RankingFunction) -> bool:
    return rank.xi[p.initial] < rank.alpha


@dataclass(frozen=True)
class ObservabilityWitness:
    """Strings ``s``, ``s_prime`` with equal projection reaching ``x1``, ``x2``.

    ``sigma`` decreases the rank after ``s`` but not after ``s_prime``.
    """
    x1: int
    x2: int
    sigma: str
    s: tuple[str, ...]
    s_prime: tuple[str, ...]


@dataclass(frozen=True)
class ObservabilityReport:
    observable: bool
    witness: ObservabilityWitness | None = None
    pairs_explored: int = 0


def _violation(p, rank, x1, x2):
    xi = rank.xi
    common = p.delta[x1].keys() & p.delta[x2].keys()
    for e in p.sort_events(common):
        if xi[x1] > xi[p.delta[x1][e]] and xi[x2] <= xi[p.delta[x2][e]]:
            return e
    return None


def is_observable(p: ProductAutomaton, rank: RankingFunction) -> ObservabilityReport:
    """Decide observability on the pair automaton of strings with equal projection."""
    start = (p.initial, p.initial)
    parent = {start: None}
    queue = deque([start])
    while queue:
        pair = queue.popleft()
        x1, x2 = pair
        sigma = _violation(p, rank, x1, x2)
        if sigma is not None:
            s, s_prime = _reconstruct(parent, pair)
            return ObservabilityReport(False, ObservabilityWitness(x1, x2, sigma, s, s_prime), len(parent))
        moves = []
        for e in p.sort_events(p.delta[x1]):
            if e not in p.observable:
                moves.append(((p.delta[x1][e], x2), (e, None)))
        for e in p.sort_events(p.delta[x2]):
            if e not in p.observable:
                moves.append(((x1, p.delta[x2][e]), (None, e)))
        for e in p.sort_events(p.delta[x1].keys() & p.delta[x2].keys()):
            if e in p.observable:
                moves.append(((p.delta[x1][e], p.delta[x2][e]), (e, e)))
        for nxt, label in moves:
            if nxt not in parent:
                parent[nxt] = (pair, label)
                queue.append(nxt)
    return ObservabilityReport(True, None, len(parent))


def _reconstruct(parent, pair):
    left, right = [], []
    while parent[pair] is not None:
        pair, (a, b) = parent[pair]
        if a is not None:
            left.append(a)
        if b is not None:
            right.append(b)
    return tuple(reversed(left)), tuple(reversed(right))


def to_json(p: ProductAutomaton, rank: RankingFunction) -> dict:
    return {
        "alpha": rank.alpha,
        "ranks": [{"state": x, "name": p.names[x], "xi": rank.xi[x]} for x in range(p.n_states)],
    }


def from_json(doc: dict) -> RankingFunction:
    ranks = sorted(doc["ranks"], key=lambda r: r["state"])
    if [r["state"] for r in ranks] != list(range(len(ranks))):
        raise ValueError("rank entries must cover states 0..n-1 exactly once")
    return RankingFunction(tuple(int(r["xi"]) for r in ranks), int(doc["alpha"]))


def observability_to_json(report: ObservabilityReport, p: ProductAutomaton | None = None) -> dict:
    doc = {"observable": report.observable}
    w = report.witness
    if w is not None:
        name = (lambda x: p.names[x]) if p is not None else (lambda x: x)
        doc["witness"] = {"x1": name(w.x1), "x2": name(w.x2), "sigma": w.sigma,
                          "s": list(w.s), "s_prime": list(w.s_prime)}
    return doc
