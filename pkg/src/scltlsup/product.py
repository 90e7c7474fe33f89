"""Product of a DES with a good-prefix acceptor."""

from __future__ import annotations

from collections import deque
from enum import Enum
from typing import TYPE_CHECKING, Iterable, Mapping, Sequence

from .des import Des, DesError, Event, UndefinedTransitionError
from .dfa import Dfa, letter_index

if TYPE_CHECKING:
    from .ranking import RankingFunction


class ProductError(ValueError):
    pass


class TransitionClass(str, Enum):
    LEGAL = "legal"
    NEUTRAL = "neutral"
    ILLEGAL = "illegal"


class ProductAutomaton:
    """Game arena ``((X_P, Sigma_P, delta_P, x_P0), F_P)``.

    Only states reachable from the initial state exist; the initial state is
    always 0. ``jg``/``ja`` map each state to its plant and acceptor
    components when the product was built from a DES and a DFA.
    """

    def __init__(self, events: Sequence[Event], delta: Sequence[Mapping[str, int]],
                 accepting: Iterable[int], initial: int = 0, names: Sequence[str] | None = None,
                 jg: Sequence[int] | None = None, ja: Sequence[int] | None = None,
                 des: Des | None = None, dfa: Dfa | None = None):
        self.events = tuple(events)
        self.event_order = {e.name: i for i, e in enumerate(self.events)}
        self.controllable = frozenset(e.name for e in self.events if e.controllable)
        self.observable = frozenset(e.name for e in self.events if e.observable)
        self.delta = tuple(dict(row) for row in delta)
        n = len(self.delta)
        for x, row in enumerate(self.delta):
            for e, y in row.items():
                if e not in self.event_order or not 0 <= y < n:
                    raise ProductError(f"bad transition ({x}, {e!r}, {y})")
        self.accepting = frozenset(accepting)
        self.initial = initial
        self.names = tuple(names) if names is not None else tuple(str(x) for x in range(n))
        self.jg = tuple(jg) if jg is not None else None
        self.ja = tuple(ja) if ja is not None else None
        self.des = des
        self.dfa = dfa

    def __repr__(self):
        return f"ProductAutomaton({self.n_states} states, {len(self.accepting)} accepting)"

    @property
    def n_states(self) -> int:
        return len(self.delta)

    @property
    def event_names(self) -> tuple[str, ...]:
        return tuple(e.name for e in self.events)

    def enabled(self, x: int) -> frozenset[str]:
        return frozenset(self.delta[x])

    def step(self, x: int, e: str) -> int:
        try:
            return self.delta[x][e]
        except KeyError:
            raise UndefinedTransitionError(x, e) from None

    def run(self, s: Iterable[str], start: int | None = None) -> int:
        x = self.initial if start is None else start
        for e in s:
            x = self.step(x, e)
        return x

    def project(self, s: Iterable[str]) -> tuple[str, ...]:
        return tuple(e for e in s if e in self.observable)

    def sort_events(self, events: Iterable[str]) -> list[str]:
        return sorted(events, key=self.event_order.__getitem__)

    def find(self, plant_state: str | int, dfa_state: int) -> int:
        """Product state id with the given plant and acceptor components."""
        if self.jg is None:
            raise ProductError("product has no component projections")
        if isinstance(plant_state, str):
            plant_state = self.des.state_id(plant_state)
        for x in range(self.n_states):
            if self.jg[x] == plant_state and self.ja[x] == dfa_state:
                return x
        raise KeyError((plant_state, dfa_state))


def build(d: Des, a: Dfa) -> ProductAutomaton:
    if tuple(d.ap) != tuple(a.ap):
        raise ProductError(f"AP ordering mismatch: DES {list(d.ap)} vs DFA {list(a.ap)}")
    letters = [letter_index(a.ap, lab) for lab in d.labels]

    start = (d.initial, a.transitions[a.initial][letters[d.initial]])
    index = {start: 0}
    pairs = [start]
    delta = []
    queue = deque([start])
    while queue:
        xg, xa = queue.popleft()
        row = {}
        for e in d.sort_events(d.delta[xg]):
            yg = d.delta[xg][e]
            target = (yg, a.transitions[xa][letters[yg]])
            if target not in index:
                index[target] = len(pairs)
                pairs.append(target)
                queue.append(target)
            row[e] = index[target]
        delta.append(row)

    return ProductAutomaton(
        d.events, delta,
        accepting=[i for i, (_, xa) in enumerate(pairs) if xa in a.accepting],
        names=[f"({d.state_names[xg]},q{xa})" for xg, xa in pairs],
        jg=[xg for xg, _ in pairs], ja=[xa for _, xa in pairs], des=d, dfa=a,
    )


def classify(p: ProductAutomaton, rank: "RankingFunction", x: int, e: str) -> TransitionClass:
    y = p.step(x, e)
    if rank.xi[x] > rank.xi[y]:
        return TransitionClass.LEGAL
    if rank.xi[y] < rank.alpha:
        return TransitionClass.NEUTRAL
    return TransitionClass.ILLEGAL


def to_json(p: ProductAutomaton) -> dict:
    labels = [sorted(p.des.labels[g]) for g in p.jg] if p.des is not None else [[] for _ in p.delta]
    doc = {
        "ap": list(p.des.ap) if p.des is not None else [],
        "states": [{"id": x, "name": p.names[x], "label": labels[x]} for x in range(p.n_states)],
        "initial": p.initial,
        "events": [{"name": e.name, "controllable": e.controllable, "observable": e.observable}
                   for e in p.events],
        "transitions": [{"from": x, "event": e, "to": y}
                        for x, row in enumerate(p.delta) for e, y in row.items()],
        "accepting": sorted(p.accepting),
    }
    if p.jg is not None:
        doc["jg"] = list(p.jg)
        doc["ja"] = list(p.ja)
    return doc


def from_json(doc: dict) -> ProductAutomaton:
    n = len(doc["states"])
    ids = {st.get("id", i): i for i, st in enumerate(doc["states"])}
    delta = [dict() for _ in range(n)]
    for tr in doc["transitions"]:
        src = ids[tr["from"]]
        if tr["event"] in delta[src]:
            raise DesError(f"duplicate transition from {tr['from']!r} on {tr['event']!r}")
        delta[src][tr["event"]] = ids[tr["to"]]
    events = [Event(ev["name"], bool(ev.get("controllable", True)), bool(ev.get("observable", True)))
              for ev in doc["events"]]
    return ProductAutomaton(events, delta, [ids[x] for x in doc["accepting"]], ids[doc["initial"]],
                            names=[str(st.get("name", st.get("id", i))) for i, st in enumerate(doc["states"])],
                            jg=doc.get("jg"), ja=doc.get("ja"))
