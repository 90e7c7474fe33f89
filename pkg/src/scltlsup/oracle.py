"""Independent reference implementations used to cross-check the main modules.

Nothing here reuses the traversal code of ``dfa``, ``product``, ``ranking`` or
``supervisor``; each reference is written for clarity rather than speed and
guards against instances that are too large to enumerate.
"""

from __future__ import annotations

import hashlib
import itertools
import json
from dataclasses import dataclass, field
from typing import Any, Sequence

from . import dfa as dfa_mod
from . import formula as fm
from .dfa import Dfa
from .product import ProductAutomaton
from .ranking import RankingFunction
from .supervisor import ALGORITHMIC, Permissiveness, SupervisorState, control_step, observe_update


class OracleLimitError(RuntimeError):
    """The instance is too large for brute-force enumeration."""


@dataclass
class OracleReport:
    component: str
    instance: str
    agree: bool
    # first divergence: {"input": ..., "main": ..., "oracle": ...}
    divergence: dict | None = None
    details: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        doc = {"component": self.component, "instance": self.instance, "agree": self.agree,
               "divergence": self.divergence}
        if self.details:
            doc["details"] = self.details
        return doc


def digest(doc: Any) -> str:
    text = json.dumps(doc, sort_keys=True, separators=(",", ":"), default=str)
    return hashlib.sha256(text.encode()).hexdigest()[:16]


# ---------------------------------------------------------------------------
# Ranking by level sets


def attractor_rank(p: ProductAutomaton) -> RankingFunction:
    """Ranks as the level at which a state is forced into the accepting set.

    Level 0 is the accepting set. A state with uncontrollable events joins the
    first level exceeding all levels of its uncontrollable successors; a state
    without them joins one level above its best controllable successor.
    Unlevelled states get ``alpha``.
    """
    n = len(p.delta)
    alpha = n - len(p.accepting) + 1
    level: dict[int, int] = {x: 0 for x in p.accepting}
    for lvl in range(1, alpha):
        new = {}
        for x in range(n):
            if x in level:
                continue
            succ_uc = [y for e, y in p.delta[x].items() if e not in p.controllable]
            succ_c = [y for e, y in p.delta[x].items() if e in p.controllable]
            if succ_uc:
                if all(y in level for y in succ_uc) and 1 + max(level[y] for y in succ_uc) == lvl:
                    new[x] = lvl
            elif any(level.get(y) == lvl - 1 for y in succ_c):
                new[x] = lvl
        level.update(new)
    return RankingFunction(tuple(level.get(x, alpha) for x in range(n)), alpha)


def check_rank(p: ProductAutomaton, rank: RankingFunction | None = None, instance: str = "") -> OracleReport:
    from .ranking import compute_ranking

    main = rank if rank is not None else compute_ranking(p)
    ref = attractor_rank(p)
    if main.alpha != ref.alpha:
        return OracleReport("rank", instance, False, {"input": "alpha", "main": main.alpha, "oracle": ref.alpha})
    for x in range(len(p.delta)):
        if main.xi[x] != ref.xi[x]:
            return OracleReport("rank", instance, False,
                                {"input": p.names[x], "main": main.xi[x], "oracle": ref.xi[x]})
    return OracleReport("rank", instance, True)


# ---------------------------------------------------------------------------
# Observability by bounded string-pair enumeration


@dataclass(frozen=True)
class BoundedVerdict:
    observable: bool
    s: tuple[str, ...] = ()
    s_prime: tuple[str, ...] = ()
    sigma: str | None = None
    maxlen: int = 0


def _decreasing_after(p, rank, x, e):
    return e in p.delta[x] and rank.xi[x] > rank.xi[p.delta[x][e]]


def _violating_event(p, rank, x1, x2):
    for e in (ev.name for ev in p.events):
        if e in p.delta[x1] and e in p.delta[x2]:
            if _decreasing_after(p, rank, x1, e) and not _decreasing_after(p, rank, x2, e):
                return e
    return None


def bounded_observability(p: ProductAutomaton, rank: RankingFunction, maxlen: int,
                          max_configs: int = 2_000_000) -> BoundedVerdict:
    """Observability with both strings restricted to length ``maxlen``.

    String pairs are enumerated by length, merging pairs that reach the same
    two states with the same two lengths; violations depend on the states
    only, so the merge loses no verdicts.
    """
    if maxlen < 1:
        raise ValueError("maxlen must be at least 1")
    obs = p.observable
    start = (p.initial, p.initial, 0, 0)
    back = {start: None}
    frontier = [start]
    while frontier:
        nxt = []
        for cfg in frontier:
            x1, x2, l1, l2 = cfg
            sigma = _violating_event(p, rank, x1, x2)
            if sigma is not None:
                s, s2 = [], []
                while back[cfg] is not None:
                    cfg, (a, b) = back[cfg]
                    if a:
                        s.append(a)
                    if b:
                        s2.append(b)
                return BoundedVerdict(False, tuple(reversed(s)), tuple(reversed(s2)), sigma, maxlen)
            cands = []
            if l1 < maxlen:
                cands += [((y, x2, l1 + 1, l2), (e, None)) for e, y in p.delta[x1].items() if e not in obs]
            if l2 < maxlen:
                cands += [((x1, y, l1, l2 + 1), (None, e)) for e, y in p.delta[x2].items() if e not in obs]
            if l1 < maxlen and l2 < maxlen:
                cands += [((y, p.delta[x2][e], l1 + 1, l2 + 1), (e, e))
                          for e, y in p.delta[x1].items() if e in obs and e in p.delta[x2]]
            for c, lab in cands:
                if c not in back:
                    back[c] = (cfg, lab)
                    nxt.append(c)
        if len(back) > max_configs:
            raise OracleLimitError("too many string pairs to enumerate")
        frontier = nxt
    return BoundedVerdict(True, maxlen=maxlen)


def replay_witness(p: ProductAutomaton, rank: RankingFunction, s: Sequence[str], s_prime: Sequence[str],
                   sigma: str) -> bool:
    """True iff ``(s, s_prime, sigma)`` really violates observability."""
    def run(word):
        x = p.initial
        for e in word:
            if e not in p.delta[x]:
                return None
            x = p.delta[x][e]
        return x

    x1, x2 = run(s), run(s_prime)
    if x1 is None or x2 is None:
        return False
    same_projection = [e for e in s if e in p.observable] == [e for e in s_prime if e in p.observable]
    return (same_projection and sigma in p.delta[x1] and sigma in p.delta[x2]
            and _decreasing_after(p, rank, x1, sigma) and not _decreasing_after(p, rank, x2, sigma))


def check_observability(p: ProductAutomaton, rank: RankingFunction, maxlen: int | None = None,
                        instance: str = "") -> OracleReport:
    from .ranking import is_observable

    main = is_observable(p, rank)
    maxlen = maxlen if maxlen is not None else 2 * len(p.delta)
    ref = bounded_observability(p, rank, maxlen)
    details = {"maxlen": maxlen}
    if main.witness is not None:
        w = main.witness
        details["witness_replays"] = replay_witness(p, rank, w.s, w.s_prime, w.sigma)
    if main.observable != ref.observable:
        return OracleReport("obs", instance, False,
                            {"input": f"maxlen={maxlen}", "main": main.observable, "oracle": ref.observable,
                             "oracle_witness": None if ref.observable else
                             {"s": list(ref.s), "s_prime": list(ref.s_prime), "sigma": ref.sigma}},
                            details)
    if details.get("witness_replays") is False:
        return OracleReport("obs", instance, False,
                            {"input": "witness replay", "main": "witness", "oracle": "not a violation"}, details)
    return OracleReport("obs", instance, True, None, details)


# ---------------------------------------------------------------------------
# Tableau construction for the good-prefix acceptor


def _alternatives(f: fm.Formula) -> list[tuple[frozenset, frozenset, frozenset]]:
    """Ways to satisfy ``f`` now: (atoms required, atoms forbidden, obligations for later)."""
    if isinstance(f, fm.TrueConst):
        return [(frozenset(), frozenset(), frozenset())]
    if isinstance(f, fm.FalseConst):
        return []
    if isinstance(f, fm.Atom):
        return [(frozenset([f.name]), frozenset(), frozenset())]
    if isinstance(f, fm.NegAtom):
        return [(frozenset(), frozenset([f.name]), frozenset())]
    if isinstance(f, fm.Next):
        return [(frozenset(), frozenset(), frozenset([f.sub]))]
    if isinstance(f, fm.Or):
        return _alternatives(f.lhs) + _alternatives(f.rhs)
    if isinstance(f, fm.And):
        out = []
        for p1, n1, o1 in _alternatives(f.lhs):
            for p2, n2, o2 in _alternatives(f.rhs):
                pos, neg = p1 | p2, n1 | n2
                if not pos & neg:
                    out.append((pos, neg, o1 | o2))
        return out
    if isinstance(f, fm.Until):
        now = _alternatives(f.rhs)
        later = [(pos, neg, obl | {f}) for pos, neg, obl in _alternatives(f.lhs)]
        return now + later
    raise TypeError(f"not a formula: {f!r}")


def _tableau_successors(obligations: frozenset, letter: frozenset) -> set[frozenset]:
    """NFA successors of a conjunction of obligations on one letter."""
    combos = [frozenset()]
    for g in obligations:
        step = []
        for pos, neg, obl in _alternatives(g):
            if pos <= letter and not neg & letter:
                step.append(obl)
        combos = [c | o for c in combos for o in step]
        if not combos:
            break
    return set(combos)


def _dnf(f: fm.Formula) -> list[frozenset]:
    """Cubes over literals and opaque temporal atoms, with trivial temporal atoms resolved."""
    if isinstance(f, fm.TrueConst):
        return [frozenset()]
    if isinstance(f, fm.FalseConst):
        return []
    if isinstance(f, fm.Atom):
        return [frozenset([(f.name, True)])]
    if isinstance(f, fm.NegAtom):
        return [frozenset([(f.name, False)])]
    if isinstance(f, fm.Or):
        return _dnf(f.lhs) + _dnf(f.rhs)
    if isinstance(f, fm.And):
        out = []
        for a in _dnf(f.lhs):
            for b in _dnf(f.rhs):
                c = a | b
                if not any((v, not pol) in c for v, pol in c if isinstance(v, str)):
                    out.append(c)
        return out
    if isinstance(f, fm.Next):
        inner = _dnf(f.sub)
        if _tautology(inner):
            return [frozenset()]
        return [] if not inner else [frozenset([(f, True)])]
    if isinstance(f, fm.Until):
        rhs = _dnf(f.rhs)
        if _tautology(rhs) or not rhs:
            return rhs if rhs else []
        if not _dnf(f.lhs):
            return rhs
        return [frozenset([(f, True)])]
    raise TypeError(f"not a formula: {f!r}")


def _tautology(cubes: list[frozenset]) -> bool:
    """Truth-table check; opaque temporal atoms only occur positively, so take them false."""
    names = sorted({v for c in cubes for v, _ in c if isinstance(v, str)})
    for values in itertools.product((False, True), repeat=len(names)):
        env = dict(zip(names, values))
        if not any(all(isinstance(v, str) and env[v] == pol for v, pol in c) for c in cubes):
            return False
    return True


def _subset_accepting(subset: frozenset) -> bool:
    cubes = []
    for obligations in subset:
        conj = [frozenset()]
        for g in obligations:
            conj = [a | b for a in conj for b in _dnf(g)
                    if not any((v, not pol) in (a | b) for v, pol in a | b if isinstance(v, str))]
        cubes.extend(conj)
    return _tautology(cubes)


def tableau_dfa(f: fm.Formula, ap: Sequence[str] | None = None, max_states: int = 20_000) -> Dfa:
    """Good-prefix acceptor via a tableau NFA and the subset construction."""
    ap = tuple(sorted(fm.atoms(f)) if ap is None else ap)
    letters = [frozenset(a for i, a in enumerate(ap) if idx >> i & 1) for idx in range(1 << len(ap))]
    start = frozenset([frozenset([f])])
    ids = {start: 0}
    order = [start]
    rows = []
    i = 0
    while i < len(order):
        subset = order[i]
        i += 1
        row = []
        for letter in letters:
            target = frozenset(s for obl in subset for s in _tableau_successors(obl, letter))
            if target not in ids:
                if len(order) >= max_states:
                    raise dfa_mod.StateExplosionError(f"tableau subset construction exceeded {max_states} states")
                ids[target] = len(order)
                order.append(target)
            row.append(ids[target])
        rows.append(tuple(row))
    accepting = frozenset(ids[s] for s in order if _subset_accepting(s))
    return Dfa(ap, tuple(rows), 0, accepting)


def language_difference(d1: Dfa, d2: Dfa) -> list[frozenset] | None:
    """Shortest word accepted (some prefix reaches acceptance) by exactly one DFA."""
    if tuple(d1.ap) != tuple(d2.ap):
        raise ValueError("acceptors over different AP orderings")
    n_letters = 1 << len(d1.ap)

    def cfg(q1, q2, a1, a2):
        return (q1, q2, a1 or q1 in d1.accepting, a2 or q2 in d2.accepting)

    start = cfg(d1.initial, d2.initial, False, False)
    back = {start: None}
    layer = [start]
    while layer:
        nxt = []
        for c in layer:
            if c[2] != c[3]:
                word = []
                while back[c] is not None:
                    c, letter = back[c]
                    word.append(dfa_mod.letter_atoms(d1.ap, letter))
                return list(reversed(word))
            for letter in range(n_letters):
                t = cfg(d1.transitions[c[0]][letter], d2.transitions[c[1]][letter], c[2], c[3])
                if t not in back:
                    back[t] = (c, letter)
                    nxt.append(t)
        layer = nxt
    return None


def check_dfa(f: fm.Formula, ap: Sequence[str] | None = None, maxlen: int = 4, instance: str = "") -> OracleReport:
    """compile vs tableau, plus the lb/ub sandwich on every word up to ``maxlen``."""
    ap = tuple(sorted(fm.atoms(f)) if ap is None else ap)
    main = dfa_mod.compile(f, ap)
    ref = tableau_dfa(f, ap)
    instance = instance or fm.to_text(f)
    diff = language_difference(main, ref)
    if diff is not None:
        word = [sorted(l) for l in diff]
        return OracleReport("dfa", instance, False,
                            {"input": word, "main": dfa_mod.accepts(main, diff), "oracle": dfa_mod.accepts(ref, diff)})
    letters = [dfa_mod.letter_atoms(ap, i) for i in range(1 << len(ap))]
    for n in range(maxlen + 1):
        for word in itertools.product(letters, repeat=n):
            lb = fm.good_prefix_lb(f, word)
            acc = dfa_mod.accepts(main, word)
            ub = fm.good_prefix_ub(f, word)
            if (lb and not acc) or (acc and not ub):
                return OracleReport("dfa", instance, False,
                                    {"input": [sorted(l) for l in word], "main": acc,
                                     "oracle": {"lb": lb, "ub": ub}})
    return OracleReport("dfa", instance, True, None,
                        {"compile_states": main.n_states, "tableau_states": ref.n_states})


# ---------------------------------------------------------------------------
# Exhaustive closed loop


@dataclass
class ClosedLoopVerdict:
    holds: bool | None  # None when the depth bound was exhausted
    reason: str = ""
    configurations: int = 0
    longest_branch: int = 0
    branch: tuple[str, ...] = ()


def exhaustive_closed_loop(p: ProductAutomaton, rank: RankingFunction, eta: Permissiveness, depth: int = 100,
                           mode: str = ALGORITHMIC, max_configs: int = 200_000) -> ClosedLoopVerdict:
    """Explore every plant resolution under the supervisor.

    A branch succeeds when the true state is accepting. It fails if the plant
    gets stuck, an empty pattern is issued, an issued pattern enables a move
    into rank ``alpha``, a move after ``eta`` reaches 0 does not decrease the
    rank, or the branch can continue forever. Configurations are
    ``(true state, estimate, k)`` with ``k`` clipped at the first zero of
    ``eta``, which is all the supervisor depends on.
    """
    kbar = eta.kbar
    xi, alpha = rank.xi, rank.alpha
    memo: dict = {}
    on_path: set = set()
    patterns: dict = {}

    class Fail(Exception):
        def __init__(self, reason, branch):
            self.reason, self.branch = reason, branch

    def pattern_for(ns, k):
        key = (ns, min(k, kbar))
        if key not in patterns:
            st = control_step(p, rank, eta, SupervisorState(ns, k), mode)
            patterns[key] = st
        return patterns[key]

    def explore(x, ns, k, path):
        """Longest number of events until acceptance from this configuration."""
        if x in p.accepting:
            return 0
        key = (x, ns, min(k, kbar))
        if key in memo:
            return memo[key]
        if key in on_path:
            raise Fail(f"the plant can cycle forever at k={k} without reaching acceptance", path)
        if len(memo) > max_configs:
            raise OracleLimitError("closed loop too large to enumerate")
        on_path.add(key)
        st = pattern_for(ns, k)
        gamma = st.pattern.events
        if not gamma:
            raise Fail("empty control pattern", path)
        for y in st.ur:
            if y in p.accepting:
                # the branch through y has already succeeded
                continue
            for e, z in p.delta[y].items():
                if e in gamma and xi[z] >= alpha:
                    raise Fail(f"pattern enables {e!r} into rank alpha at {p.names[y]}", path)
        moves = [e for e in (ev.name for ev in p.events) if e in gamma and e in p.delta[x]]
        if not moves:
            raise Fail(f"plant blocked at {p.names[x]}", path)
        worst = 0
        for e in moves:
            y = p.delta[x][e]
            if k >= kbar and not xi[y] < xi[x]:
                raise Fail(f"non-decreasing move {e!r} after eta reached 0", path + (e,))
            if e in p.observable:
                nst = observe_update(p, st, e)
                if y not in nst.ns:
                    raise Fail("estimate lost the true state", path + (e,))
                sub = explore(y, nst.ns, nst.k, path + (e,))
            else:
                sub = explore(y, ns, k, path + (e,))
            worst = max(worst, 1 + sub)
        if k >= kbar and worst > alpha:
            raise Fail(f"{worst} events may still occur after eta reached 0, alpha is {alpha}", path)
        on_path.discard(key)
        memo[key] = worst
        return worst

    if p.initial in p.accepting:
        return ClosedLoopVerdict(True, "initial state accepting", 0, 0)
    try:
        longest = explore(p.initial, frozenset([p.initial]), 0, ())
    except Fail as exc:
        return ClosedLoopVerdict(False, exc.reason, len(memo), 0, exc.branch)
    if longest > depth:
        return ClosedLoopVerdict(None, f"longest branch has {longest} events, over the depth bound {depth}",
                                 len(memo), longest)
    return ClosedLoopVerdict(True, "every branch reaches acceptance", len(memo), longest)


def check_closed_loop(p: ProductAutomaton, rank: RankingFunction, eta: Permissiveness, depth: int = 100,
                      mode: str = ALGORITHMIC, instance: str = "") -> OracleReport:
    v = exhaustive_closed_loop(p, rank, eta, depth, mode)
    details = {"configurations": v.configurations, "longest_branch": v.longest_branch, "reason": v.reason}
    if v.holds is False:
        return OracleReport("closedloop", instance, False,
                            {"input": list(v.branch), "main": "supervisor", "oracle": v.reason}, details)
    return OracleReport("closedloop", instance, True, None, details)
