"""On-line permissive supervisor under partial observation.

The supervisor keeps the set ``ns`` of product states the plant may be in
right after the last observation. At every observation count ``k`` it issues
a control pattern made of

* the legal part: events that decrease the rank somewhere in the
  unobservable reach of an estimated state, and
* the permissive part: further controllable events whose every transition
  explored under the enlarged pattern lands below the permissiveness level
  ``eta(k)``.

``eta`` is nonincreasing and eventually 0, after which only legal events are
enabled and every move brings the product strictly closer to acceptance.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field, replace
from typing import Iterable

from .product import ProductAutomaton
from .ranking import RankingFunction

ALGORITHMIC = "algorithmic"
STRICT = "strict"
MODES = (ALGORITHMIC, STRICT)


class SupervisorError(RuntimeError):
    pass


class EstimatorDivergence(SupervisorError):
    """The observation is inconsistent with every estimated state."""


class PermissivenessError(ValueError):
    pass


@dataclass(frozen=True)
class Permissiveness:
    """Permissiveness schedule ``eta``.

    ``linear`` with ``(a, b)`` means ``k -> max(a - b*k, 0)``; ``table`` lists
    ``eta(0), eta(1), ...`` explicitly and is 0 afterwards.
    """
    kind: str
    params: tuple[float, ...]

    def __post_init__(self):
        if self.kind == "linear":
            if len(self.params) != 2:
                raise PermissivenessError("linear schedule takes exactly two numbers a,b")
            a, b = self.params
            if b < 0:
                raise PermissivenessError("linear schedule must be nonincreasing (b >= 0)")
            if a > 0 and b == 0:
                raise PermissivenessError("linear schedule never reaches 0")
        elif self.kind == "table":
            vals = self.params
            if any(v < w for v, w in zip(vals, vals[1:])):
                raise PermissivenessError("table schedule must be nonincreasing")
            if vals and vals[-1] < 0:
                raise PermissivenessError("table schedule must end at a value >= 0")
        else:
            raise PermissivenessError(f"unknown schedule kind {self.kind!r}")

    def __call__(self, k: int):
        if self.kind == "linear":
            a, b = self.params
            return max(a - b * k, 0)
        return self.params[k] if k < len(self.params) else 0

    @property
    def kbar(self) -> int:
        """Smallest ``k`` with ``eta(k) == 0``."""
        if self.kind == "linear":
            a, b = self.params
            return 0 if a <= 0 else math.ceil(a / b)
        for k, v in enumerate(self.params):
            if v <= 0:
                return k
        return len(self.params)

    def check(self, alpha: int) -> None:
        if self(0) > alpha:
            raise PermissivenessError(f"eta(0) = {self(0)} exceeds alpha = {alpha}")

    def __str__(self):
        return f"{self.kind}:" + ",".join(_fmt(v) for v in self.params)


def _fmt(v):
    return str(int(v)) if float(v).is_integer() else repr(float(v))


def _number(text):
    v = float(text)
    return int(v) if v.is_integer() else v


def parse_permissiveness(spec: str) -> Permissiveness:
    """Parse ``"linear:a,b"`` or ``"table:v0,v1,..."``."""
    m = re.fullmatch(r"\s*(linear|table)\s*:\s*(.*?)\s*", spec)
    if not m:
        raise PermissivenessError(f"bad permissiveness spec {spec!r}")
    try:
        values = tuple(_number(v) for v in m.group(2).split(",")) if m.group(2) else ()
    except ValueError:
        raise PermissivenessError(f"bad number in {spec!r}") from None
    return Permissiveness(m.group(1), values)


@dataclass(frozen=True)
class ControlPattern:
    events: frozenset[str]
    legal: frozenset[str] = frozenset()
    permissive: frozenset[str] = frozenset()
    # events seen to trigger illegal transitions while expanding legal moves
    rejected: frozenset[str] = frozenset()
    # uncontrollable events defined in the reach that no other rule added
    forced: frozenset[str] = frozenset()


@dataclass(frozen=True)
class SupervisorState:
    ns: frozenset[int]
    k: int = 0
    stopped: bool = False
    pattern: ControlPattern | None = field(default=None, compare=False)
    ur: frozenset[int] = field(default=frozenset(), compare=False)
    ns_next: frozenset[int] = field(default=frozenset(), compare=False)


def initial_state(p: ProductAutomaton) -> SupervisorState:
    ns = frozenset([p.initial])
    return SupervisorState(ns, 0, ns <= p.accepting)


def unobservable_reach(p: ProductAutomaton, xs: Iterable[int], sigma_prime: Iterable[str]) -> frozenset[int]:
    allowed = frozenset(sigma_prime) - p.observable
    seen = set(xs)
    stack = list(seen)
    while stack:
        x = stack.pop()
        for e, y in p.delta[x].items():
            if e in allowed and y not in seen:
                seen.add(y)
                stack.append(y)
    return frozenset(seen)


def gamma_leg(p: ProductAutomaton, rank: RankingFunction, x: int) -> frozenset[str]:
    """Events that decrease the rank after some unobservable string from ``x``."""
    xi = rank.xi
    out = set()
    for y in unobservable_reach(p, [x], p.event_names):
        out.update(e for e, z in p.delta[y].items() if xi[y] > xi[z])
    return frozenset(out)


def leg_expand(p: ProductAutomaton, rank: RankingFunction, ns: Iterable[int]):
    """Depth-first expansion along legal unobservable moves.

    Returns ``(gamma, gamma_bar, ur, ns_next)``: legal events found, events
    seen to lead into rank ``alpha``, the states visited and the targets of
    legal observable moves.
    """
    xi, alpha = rank.xi, rank.alpha
    gamma, gamma_bar, ur, ns_next = set(), set(), set(), set()
    for root in sorted(ns):
        stack = [root]
        while stack:
            x = stack.pop()
            if x in ur:
                continue
            ur.add(x)
            for e in reversed(p.sort_events(p.delta[x])):
                y = p.delta[x][e]
                if xi[x] > xi[y]:
                    gamma.add(e)
                    if e in p.observable:
                        ns_next.add(y)
                    else:
                        stack.append(y)
                elif xi[y] == alpha:
                    gamma_bar.add(e)
    return frozenset(gamma), frozenset(gamma_bar), frozenset(ur), frozenset(ns_next)


def _re_expand(p, rank, ns, gamma, eta_k, candidate):
    """Explore ``ns`` under ``gamma``; fail on the first target ranked >= eta_k.

    Returns ``(ok, defined)`` where ``defined`` tells whether ``candidate`` is
    defined at some explored state.
    """
    xi = rank.xi
    visited = set()
    defined = False
    for root in sorted(ns):
        stack = [root]
        while stack:
            x = stack.pop()
            if x in visited:
                continue
            visited.add(x)
            row = p.delta[x]
            defined = defined or candidate in row
            for e in gamma & row.keys():
                y = row[e]
                if xi[y] >= eta_k:
                    return False, defined
                if e not in p.observable:
                    stack.append(y)
    return True, defined


def _strict_candidates(p, rank, eta_k, x):
    """Per-state split of events into (defined in reach, violating in reach)."""
    xi = rank.xi
    defined, violating = set(), set()
    for y in unobservable_reach(p, [x], p.event_names):
        for e, z in p.delta[y].items():
            defined.add(e)
            if not xi[z] < eta_k:
                violating.add(e)
    return defined, violating


def gamma_per(p: ProductAutomaton, rank: RankingFunction, eta: Permissiveness, x: int, k: int,
              mode: str = ALGORITHMIC) -> frozenset[str]:
    """Permissive events for the single estimate ``{x}`` at observation count ``k``.

    ``strict``: events defined somewhere in the unobservable reach of ``x``
    whose every occurrence there lands below ``eta(k)``.
    ``algorithmic``: controllable candidates tried in event order on top of
    the legal events, each accepted only if the whole reach explored under
    the enlarged pattern stays below ``eta(k)``.
    """
    if mode == STRICT:
        defined, violating = _strict_candidates(p, rank, eta(k), x)
        return frozenset(defined - violating)
    if mode != ALGORITHMIC:
        raise ValueError(f"unknown mode {mode!r}")
    legal = gamma_leg(p, rank, x)
    _, rejected, _, _ = leg_expand(p, rank, [x])
    return frozenset(_permissive_pass(p, rank, [x], legal, rejected, eta(k)))


def _permissive_pass(p, rank, ns, legal, rejected, eta_k):
    gamma = set(legal)
    accepted = []
    for sigma in p.sort_events(p.controllable - gamma - rejected):
        ok, defined = _re_expand(p, rank, ns, frozenset(gamma | {sigma}), eta_k, sigma)
        if ok and defined:
            gamma.add(sigma)
            accepted.append(sigma)
    return accepted


def control_step(p: ProductAutomaton, rank: RankingFunction, eta: Permissiveness,
                 st: SupervisorState, mode: str = ALGORITHMIC) -> SupervisorState:
    """Compute the pattern for the current estimate.

    Returns ``st`` with ``pattern``, ``ur`` (reach of ``ns`` under the pattern)
    and ``ns_next`` (states reachable by one enabled observable event) filled.
    """
    if not st.ns:
        raise EstimatorDivergence("empty state estimate")
    if st.stopped or st.ns <= p.accepting:
        raise SupervisorError("the estimate is already accepting; control has stopped")
    if mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}")
    eta_k = eta(st.k)

    legal = frozenset().union(*(gamma_leg(p, rank, x) for x in st.ns))
    _, rejected, _, _ = leg_expand(p, rank, st.ns)
    if mode == ALGORITHMIC:
        permissive = frozenset(_permissive_pass(p, rank, st.ns, legal, rejected, eta_k))
    else:
        defined, violating = set(), set()
        for x in st.ns:
            d, v = _strict_candidates(p, rank, eta_k, x)
            defined |= d
            violating |= v
        permissive = frozenset(defined - violating - legal)

    events = legal | permissive
    forced = set()
    while True:
        ur = unobservable_reach(p, st.ns, events)
        extra = {e for x in ur for e in p.delta[x] if e not in p.controllable} - events
        if not extra:
            break
        forced |= extra
        events = events | extra

    ns_next = frozenset(y for x in ur for e, y in p.delta[x].items()
                        if e in events and e in p.observable)
    pattern = ControlPattern(frozenset(events), legal, permissive, rejected, frozenset(forced))
    return replace(st, pattern=pattern, ur=ur, ns_next=ns_next)


def observe_update(p: ProductAutomaton, st: SupervisorState, sigma_o: str) -> SupervisorState:
    """Advance the estimate after observing ``sigma_o`` under ``st.pattern``."""
    if st.pattern is None:
        raise SupervisorError("no pattern has been issued for this state")
    if sigma_o not in p.observable:
        raise SupervisorError(f"event {sigma_o!r} is not observable")
    if sigma_o not in st.pattern.events:
        raise EstimatorDivergence(f"observed {sigma_o!r}, which the issued pattern disables")
    ns = frozenset(p.delta[x][sigma_o] for x in st.ur if sigma_o in p.delta[x])
    if not ns:
        raise EstimatorDivergence(f"observation {sigma_o!r} is impossible from every estimated state")
    return SupervisorState(ns, st.k + 1, ns <= p.accepting)
