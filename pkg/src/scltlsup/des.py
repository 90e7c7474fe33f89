"""Partially observed discrete event systems with labelled states."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence


class DesError(ValueError):
    pass


class UndefinedTransitionError(KeyError):
    def __init__(self, state, event):
        super().__init__(f"transition ({state}, {event!r}) is undefined")
        self.state = state
        self.event = event


@dataclass(frozen=True)
class Event:
    name: str
    controllable: bool = True
    observable: bool = True


class Des:
    """A DES ``((X, Sigma, delta, x0), AP, L)``.

    States are the integers ``0..n-1``; ``state_names`` gives display names.
    Events are referred to by name and ordered by their position in
    ``events``, which is the order used wherever a deterministic event
    ordering matters.
    """

    def __init__(self, states: Sequence[str], events: Sequence[Event],
                 transitions: Iterable[tuple[int, str, int]], initial: int = 0,
                 ap: Sequence[str] = (), labels: Mapping[int, Iterable[str]] | None = None):
        self.state_names = tuple(states)
        self.events = tuple(events)
        self.event_order = {e.name: i for i, e in enumerate(self.events)}
        if len(self.event_order) != len(self.events):
            raise DesError("duplicate event names")
        self.controllable = frozenset(e.name for e in self.events if e.controllable)
        self.observable = frozenset(e.name for e in self.events if e.observable)
        self.ap = tuple(ap)
        n = len(self.state_names)
        if not 0 <= initial < n:
            raise DesError(f"initial state {initial} out of range")
        self.initial = initial

        labels = dict(labels or {})
        self.missing_labels = tuple(x for x in range(n) if x not in labels)
        self.labels = tuple(frozenset(labels.get(x, ())) for x in range(n))
        for x, lab in enumerate(self.labels):
            if not lab <= set(self.ap):
                raise DesError(f"label of state {x} uses atoms outside AP: {sorted(lab - set(self.ap))}")

        delta = [dict() for _ in range(n)]
        self.duplicates = []
        self.transitions = []
        for src, ev, dst in transitions:
            if ev not in self.event_order:
                raise DesError(f"unknown event {ev!r}")
            if not (0 <= src < n and 0 <= dst < n):
                raise DesError(f"transition ({src}, {ev}, {dst}) references an unknown state")
            if ev in delta[src]:
                self.duplicates.append((src, ev, dst))
                continue
            delta[src][ev] = dst
            self.transitions.append((src, ev, dst))
        self.delta = tuple(delta)

    def __repr__(self):
        return f"Des({len(self.state_names)} states, {len(self.events)} events)"

    @property
    def n_states(self) -> int:
        return len(self.state_names)

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
        out = []
        for e in s:
            if e not in self.event_order:
                raise DesError(f"unknown event {e!r}")
            if e in self.observable:
                out.append(e)
        return tuple(out)

    def sort_events(self, events: Iterable[str]) -> list[str]:
        return sorted(events, key=self.event_order.__getitem__)

    def reachable(self) -> set[int]:
        seen = {self.initial}
        queue = deque([self.initial])
        while queue:
            x = queue.popleft()
            for y in self.delta[x].values():
                if y not in seen:
                    seen.add(y)
                    queue.append(y)
        return seen

    def state_id(self, name: str) -> int:
        return self.state_names.index(name)


def project(d: Des, s: Iterable[str]) -> tuple[str, ...]:
    return d.project(s)


@dataclass
class ValidationReport:
    unreachable: list[int] = field(default_factory=list)
    duplicates: list[tuple[int, str, int]] = field(default_factory=list)
    missing_labels: list[int] = field(default_factory=list)
    deadlocks: list[int] = field(default_factory=list)

    @property
    def deadlock_free(self) -> bool:
        return not self.deadlocks

    @property
    def ok(self) -> bool:
        # unreachable states are only a warning
        return not (self.duplicates or self.missing_labels or self.deadlocks)


def validate(d: Des) -> ValidationReport:
    reach = d.reachable()
    return ValidationReport(
        unreachable=sorted(set(range(d.n_states)) - reach),
        duplicates=list(d.duplicates),
        missing_labels=list(d.missing_labels),
        deadlocks=sorted(x for x in reach if not d.delta[x]),
    )


def to_json(d: Des) -> dict:
    return {
        "ap": list(d.ap),
        "states": [{"id": x, "name": d.state_names[x], "label": sorted(d.labels[x])}
                   for x in range(d.n_states)],
        "initial": d.initial,
        "events": [{"name": e.name, "controllable": e.controllable, "observable": e.observable}
                   for e in d.events],
        "transitions": [{"from": s, "event": e, "to": t} for s, e, t in d.transitions],
    }


def from_json(doc: dict) -> Des:
    ids = {}
    names = []
    labels = {}
    for i, st in enumerate(doc["states"]):
        sid = st.get("id", i)
        if sid in ids:
            raise DesError(f"duplicate state id {sid!r}")
        ids[sid] = i
        names.append(str(st.get("name", sid)))
        if "label" in st:
            labels[i] = st["label"]
    events = [Event(ev["name"], bool(ev.get("controllable", True)), bool(ev.get("observable", True)))
              for ev in doc["events"]]

    def sid(v):
        try:
            return ids[v]
        except KeyError:
            raise DesError(f"unknown state id {v!r}") from None

    seen = set()
    transitions = []
    for tr in doc["transitions"]:
        key = (sid(tr["from"]), tr["event"])
        if key in seen:
            raise DesError(f"duplicate transition from {tr['from']!r} on {tr['event']!r}")
        seen.add(key)
        transitions.append((key[0], tr["event"], sid(tr["to"])))
    return Des(names, events, transitions, sid(doc["initial"]), doc.get("ap", ()), labels)
