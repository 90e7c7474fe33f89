"""Deterministic acceptors of good prefixes.

A letter is a subset of the atomic propositions. Inside a :class:`Dfa` it is
stored as a bitset: bit ``i`` is set iff ``ap[i]`` holds, and the integer value
of the bitset indexes the transition rows.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Iterable, Sequence

from . import formula as fm

DEFAULT_STATE_CAP = 100_000


class StateExplosionError(RuntimeError):
    pass


class AlphabetError(ValueError):
    pass


def letter_index(ap: Sequence[str], letter: Iterable[str] | int) -> int:
    if isinstance(letter, int):
        if not 0 <= letter < 1 << len(ap):
            raise AlphabetError(f"letter index {letter} out of range for AP {list(ap)}")
        return letter
    idx = 0
    for name in letter:
        try:
            idx |= 1 << ap.index(name)
        except ValueError:
            raise AlphabetError(f"atom {name!r} is not in AP {list(ap)}") from None
    return idx


def letter_atoms(ap: Sequence[str], index: int) -> frozenset[str]:
    return frozenset(a for i, a in enumerate(ap) if index >> i & 1)


@dataclass(frozen=True)
class Dfa:
    ap: tuple[str, ...]
    transitions: tuple[tuple[int, ...], ...]
    initial: int
    accepting: frozenset[int]

    def __post_init__(self):
        width = 1 << len(self.ap)
        n = len(self.transitions)
        if not 0 <= self.initial < n:
            raise ValueError("initial state out of range")
        for q, row in enumerate(self.transitions):
            if len(row) != width:
                raise ValueError(f"state {q} has {len(row)} transitions, expected {width}")
            if any(not 0 <= t < n for t in row):
                raise ValueError(f"state {q} has a transition out of range")
        if any(not 0 <= q < n for q in self.accepting):
            raise ValueError("accepting state out of range")

    @property
    def n_states(self) -> int:
        return len(self.transitions)

    @property
    def n_letters(self) -> int:
        return 1 << len(self.ap)

    def step(self, q: int, letter) -> int:
        return self.transitions[q][letter_index(self.ap, letter)]

    def run(self, word, start: int | None = None) -> int:
        q = self.initial if start is None else start
        for letter in word:
            q = self.step(q, letter)
        return q

    def is_absorbing(self) -> bool:
        return all(t in self.accepting for q in self.accepting for t in self.transitions[q])


def accepts(d: Dfa, word) -> bool:
    """True iff the run of ``d`` on ``word`` visits an accepting state."""
    q = d.initial
    if q in d.accepting:
        return True
    for letter in word:
        q = d.step(q, letter)
        if q in d.accepting:
            return True
    return False


def compile(f: fm.Formula, ap: Sequence[str] | None = None, *,
            max_states: int = DEFAULT_STATE_CAP, minimal: bool = True) -> Dfa:
    """Derivative construction: states are the simplified residuals of ``f``."""
    ap = tuple(sorted(fm.atoms(f)) if ap is None else ap)
    missing = fm.atoms(f) - set(ap)
    if missing:
        raise AlphabetError(f"formula uses atoms outside AP: {sorted(missing)}")
    letters = [letter_atoms(ap, i) for i in range(1 << len(ap))]

    start = fm.simplify(f)
    index = {start: 0}
    states = [start]
    rows = []
    queue = deque([start])
    while queue:
        g = queue.popleft()
        row = []
        for letter in letters:
            h = fm.derivative(g, letter)
            if h not in index:
                if len(states) >= max_states:
                    raise StateExplosionError(
                        f"more than {max_states} derivative states for {fm.to_text(f)}")
                index[h] = len(states)
                states.append(h)
                queue.append(h)
            row.append(index[h])
        rows.append(tuple(row))

    accepting = frozenset(i for i, g in enumerate(states) if g == fm.TRUE)
    d = make_absorbing(Dfa(ap, tuple(rows), 0, accepting))
    return minimize(d) if minimal else d


def make_absorbing(d: Dfa) -> Dfa:
    """Redirect every edge leaving an accepting state to one accepting sink."""
    if not d.accepting:
        return d
    sink = min(d.accepting)
    rows = [tuple(sink if t in d.accepting else t for t in row) for row in d.transitions]
    for q in d.accepting:
        rows[q] = (sink,) * d.n_letters
    return Dfa(d.ap, tuple(rows), d.initial, d.accepting)


def minimize(d: Dfa) -> Dfa:
    """Moore partition refinement over the reachable part of ``d``."""
    reach = [d.initial]
    seen = {d.initial}
    for q in reach:
        for t in d.transitions[q]:
            if t not in seen:
                seen.add(t)
                reach.append(t)

    block = {q: int(q in d.accepting) for q in reach}
    while True:
        signature = {q: (block[q], tuple(block[t] for t in d.transitions[q])) for q in reach}
        ids = {}
        new_block = {q: ids.setdefault(signature[q], len(ids)) for q in reach}
        if len(ids) == len(set(block.values())):
            break
        block = new_block

    # number the blocks in BFS order from the initial state
    order = {block[d.initial]: 0}
    queue = deque([d.initial])
    rep = {0: d.initial}
    while queue:
        q = queue.popleft()
        for t in d.transitions[q]:
            b = block[t]
            if b not in order:
                order[b] = len(order)
                rep[order[b]] = t
                queue.append(t)
    rows = tuple(tuple(order[block[t]] for t in d.transitions[rep[i]]) for i in range(len(order)))
    accepting = frozenset(order[block[q]] for q in reach if q in d.accepting)
    return Dfa(d.ap, rows, 0, accepting)


def to_json(d: Dfa) -> dict:
    return {
        "ap": list(d.ap),
        "states": d.n_states,
        "initial": d.initial,
        "accepting": sorted(d.accepting),
        "transitions": [list(row) for row in d.transitions],
    }


def from_json(doc: dict) -> Dfa:
    d = Dfa(tuple(doc["ap"]), tuple(tuple(row) for row in doc["transitions"]),
            doc["initial"], frozenset(doc["accepting"]))
    if d.n_states != doc.get("states", d.n_states):
        raise ValueError("'states' does not match the number of transition rows")
    return d
