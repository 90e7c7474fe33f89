"""Command-line front end.

Exit codes:
  0  success (for ``verify``: every oracle agrees)
  1  ``verify`` found a disagreement
  2  malformed input: formula syntax, JSON, DES or schedule errors
  3  acceptor state cap exceeded
  4  no supervisor: the product is not controllable or not observable
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from pathlib import Path

from . import demo, des, dfa, formula as fm, generators, oracle, product, ranking, sim, supervisor

EXIT_OK = 0
EXIT_DISAGREE = 1
EXIT_INPUT = 2
EXIT_CAP = 3
EXIT_NO_SUPERVISOR = 4

GRAMMAR = """\
formula grammar (loosest binding first):
  f ::= f | f          disjunction, left associative
      | f & f          conjunction, left associative
      | f U f          until, right associative
      | ! a | X f | F f | ( f ) | a | true
  '!' applies to atoms only; 'false' is not part of the language.

file formats (JSON):
  DES      {"ap": [...], "states": [{"id", "name"?, "label": [...]}], "initial": id,
            "events": [{"name", "controllable", "observable"}],
            "transitions": [{"from", "event", "to"}]}
  DFA      {"ap": [...], "states": n, "initial": q, "accepting": [...],
            "transitions": [[q per letter] per state]}  letter bit i <=> ap[i]
  product  DES format plus "accepting": [...]
  rank     {"alpha": n, "ranks": [{"state", "name", "xi"}]}
  trace    JSON lines: meta, control/step records, outcome
  eta      "linear:a,b" (max(a-b*k, 0)) or "table:v0,v1,..." (0 afterwards)
"""


class CliError(Exception):
    def __init__(self, message, code=EXIT_INPUT):
        super().__init__(message)
        self.code = code


def _read_json(path):
    try:
        return json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise CliError(f"cannot read JSON from {path}: {exc}") from None


def _emit(text, out):
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _dump(doc):
    return json.dumps(doc, indent=2, sort_keys=False) + "\n"


def _formula_text(args):
    if getattr(args, "formula", None) is not None:
        return args.formula
    if getattr(args, "formula_file", None):
        return Path(args.formula_file).read_text(encoding="utf-8").strip()
    return None


def _load_plant(args):
    if args.demo:
        return demo.demo_plant()
    if not args.des:
        raise CliError("a DES is required (--des FILE or --demo)")
    return des.from_json(_read_json(args.des))


def _load_acceptor(args, ap):
    text = _formula_text(args)
    if text is not None and args.dfa:
        raise CliError("give either a formula or a DFA, not both")
    if args.dfa:
        return dfa.from_json(_read_json(args.dfa))
    if text is None:
        if args.demo:
            text = demo.DEMO_FORMULA
        else:
            raise CliError("a specification is required (--formula, --formula-file or --dfa)")
    return dfa.compile(fm.parse(text, ap), ap, max_states=args.max_states)


def _load_product(args):
    plant = _load_plant(args)
    return product.build(plant, _load_acceptor(args, plant.ap))


def _checks(p, rank):
    obs = ranking.is_observable(p, rank)
    return ranking.is_controllable(p, rank), obs


# ---------------------------------------------------------------------------
# subcommands


def cmd_compile(args):
    ap = [a for a in args.ap.split(",") if a] if args.ap is not None else None
    text = _formula_text(args)
    if text is None:
        raise CliError("a formula is required")
    f = fm.parse(text, ap)
    d = dfa.compile(f, ap, max_states=args.max_states, minimal=not args.no_minimize)
    _emit(_dump(dfa.to_json(d)), args.output)
    return EXIT_OK


def cmd_rank(args):
    p = _load_product(args)
    rank = ranking.compute_ranking(p)
    controllable, obs = _checks(p, rank)
    doc = ranking.to_json(p, rank)
    doc.update({
        "states": p.n_states,
        "accepting": sorted(p.accepting),
        "controllable": controllable,
        "observable": obs.observable,
    })
    if obs.witness is not None:
        doc["observability_witness"] = ranking.observability_to_json(obs, p)["witness"]
    _emit(_dump(doc), args.output)
    if args.product_out:
        Path(args.product_out).write_text(_dump(product.to_json(p)), encoding="utf-8")
    return EXIT_OK if controllable and obs.observable else EXIT_NO_SUPERVISOR


def _policy(args):
    if args.policy == "random":
        return sim.RandomPolicy(args.seed)
    if args.policy == "adversarial":
        return sim.AdversarialPolicy()
    if args.policy == "interactive":
        return sim.InteractivePolicy(sys.stdin, sys.stderr)
    if not args.script:
        raise CliError("--policy script needs --script FILE")
    return sim.ScriptedPolicy(Path(args.script).read_text(encoding="utf-8").split())


def cmd_simulate(args):
    p = _load_product(args)
    rank = ranking.compute_ranking(p)
    eta = supervisor.parse_permissiveness(args.eta)
    limits = sim.Limits(args.max_unobservable, args.max_steps)
    try:
        trace = sim.run_episode(p, rank, eta, _policy(args), limits, args.mode)
    except sim.NoSupervisorError as exc:
        controllable, obs = _checks(p, rank)
        sys.stdout.write(_dump({"controllable": controllable, "observable": obs.observable,
                                "error": str(exc)}))
        return EXIT_NO_SUPERVISOR
    _emit(trace.to_jsonl(), args.output)
    print(f"outcome: {trace.outcome['outcome']} after {trace.outcome['steps']} events", file=sys.stderr)
    return EXIT_OK


def _instances(args):
    """Yield ``(name, product or None, formula or None, ap)`` for the selected corpus."""
    text = _formula_text(args)
    if args.demo:
        plant = demo.demo_plant()
        f = fm.parse(text or demo.DEMO_FORMULA, plant.ap)
        yield "demo", product.build(plant, dfa.compile(f, plant.ap)), f, plant.ap
    for path in args.instances:
        doc = _read_json(path)
        if "accepting" in doc:
            yield path, product.from_json(doc), None, tuple(doc.get("ap", ()))
            continue
        plant = des.from_json(doc)
        f = fm.parse(text, plant.ap) if text is not None else None
        if args.dfa:
            a = dfa.from_json(_read_json(args.dfa))
        elif f is not None:
            a = dfa.compile(f, plant.ap, max_states=args.max_states)
        else:
            raise CliError(f"{path} is a DES; give --formula or --dfa to build the product")
        yield path, product.build(plant, a), f, plant.ap
    if args.random:
        rng = random.Random(args.seed)
        for i in range(args.random):
            sub = random.Random(rng.getrandbits(64))
            ap = ("a", "b", "c")[:sub.randint(1, 3)]
            yield (f"random:{args.seed}:{i}", generators.random_product(sub),
                   generators.random_formula(sub, ap, 3), ap)
    if text is not None and not args.instances and not args.demo:
        ap = [a for a in args.ap.split(",") if a] if args.ap else None
        f = fm.parse(text, ap)
        yield "formula", None, f, tuple(ap) if ap else tuple(sorted(fm.atoms(f)))


def cmd_verify(args):
    suites = ("rank", "obs", "dfa", "closedloop") if args.suite == "all" else (args.suite,)
    given_rank = ranking.from_json(_read_json(args.rank)) if args.rank else None
    reports = []
    for name, p, f, ap in _instances(args):
        if p is not None:
            rank = given_rank if given_rank is not None else ranking.compute_ranking(p)
            if given_rank is not None and len(rank.xi) != p.n_states:
                reports.append(oracle.OracleReport("rank", name, False, {
                    "input": "rank file", "main": len(rank.xi), "oracle": p.n_states}))
                continue
            if "rank" in suites:
                reports.append(oracle.check_rank(p, rank, instance=name))
            if "obs" in suites:
                reports.append(oracle.check_observability(p, rank, args.maxlen, instance=name))
            if "closedloop" in suites and ranking.is_controllable(p, rank) \
                    and ranking.is_observable(p, rank).observable:
                eta = supervisor.parse_permissiveness(args.eta) if args.eta \
                    else supervisor.Permissiveness("linear", (rank.alpha, 1))
                reports.append(oracle.check_closed_loop(p, rank, eta, args.depth, args.mode, instance=name))
        if "dfa" in suites and f is not None:
            reports.append(oracle.check_dfa(f, ap, instance=f"{name}:{fm.to_text(f)}"))
    agree = all(r.agree for r in reports)
    _emit(_dump({"agree": agree, "checked": len(reports),
                 "disagreements": sum(not r.agree for r in reports),
                 "reports": [r.to_json() for r in reports]}), args.output)
    return EXIT_OK if agree else EXIT_DISAGREE


# ---------------------------------------------------------------------------


def _add_spec_args(sp):
    sp.add_argument("--des", metavar="FILE", help="DES JSON file")
    sp.add_argument("--formula", metavar="TEXT", help="scLTL formula text")
    sp.add_argument("--formula-file", metavar="FILE", help="file holding the formula text")
    sp.add_argument("--dfa", metavar="FILE", help="DFA JSON file (instead of a formula)")
    sp.add_argument("--demo", action="store_true", help="use the bundled example plant and formula")
    _add_cap_arg(sp)


def _add_cap_arg(sp):
    sp.add_argument("--max-states", type=int, default=dfa.DEFAULT_STATE_CAP,
                    help="acceptor state cap (default %(default)s)")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="scltlsup", description="scLTL supervisory control under partial observation.",
        epilog=GRAMMAR, formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("compile", help="formula to minimal good-prefix DFA JSON",
                        epilog=GRAMMAR, formatter_class=argparse.RawDescriptionHelpFormatter)
    sp.add_argument("formula", nargs="?", help="scLTL formula text")
    sp.add_argument("--formula-file", metavar="FILE")
    sp.add_argument("--ap", help="comma-separated atomic propositions, in letter-bit order")
    sp.add_argument("--no-minimize", action="store_true")
    _add_cap_arg(sp)
    sp.add_argument("-o", "--output", metavar="FILE")
    sp.set_defaults(func=cmd_compile)

    sp = sub.add_parser("rank", help="ranking function and controllability/observability report")
    _add_spec_args(sp)
    sp.add_argument("--product-out", metavar="FILE", help="also write the product JSON")
    sp.add_argument("-o", "--output", metavar="FILE")
    sp.set_defaults(func=cmd_rank)

    sp = sub.add_parser("simulate", help="run one closed-loop episode and write its trace")
    _add_spec_args(sp)
    sp.add_argument("--policy", choices=("random", "script", "adversarial", "interactive"), default="random")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--script", metavar="FILE", help="whitespace-separated event names")
    sp.add_argument("--eta", default="linear:5,1", help="permissiveness schedule (default %(default)s)")
    sp.add_argument("--mode", choices=supervisor.MODES, default=supervisor.ALGORITHMIC)
    sp.add_argument("--max-steps", type=int, help="total event limit (default 100 x product states)")
    sp.add_argument("--max-unobservable", type=int,
                    help="unobservable events per observation (default 10 x product states)")
    sp.add_argument("-o", "--output", metavar="FILE")
    sp.set_defaults(func=cmd_simulate)

    sp = sub.add_parser("verify", help="cross-check the main computations against brute-force oracles")
    _add_spec_args(sp)
    sp.add_argument("instances", nargs="*", metavar="FILE", help="DES or product JSON files")
    sp.add_argument("--suite", choices=("rank", "obs", "dfa", "closedloop", "all"), default="all")
    sp.add_argument("--random", type=int, default=0, metavar="N", help="add N seeded random instances")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--rank", metavar="FILE", help="rank JSON to check instead of recomputing")
    sp.add_argument("--ap", help="AP for a bare --formula (dfa suite)")
    sp.add_argument("--eta", help="schedule for the closed-loop suite (default linear:alpha,1)")
    sp.add_argument("--mode", choices=supervisor.MODES, default=supervisor.ALGORITHMIC)
    sp.add_argument("--depth", type=int, default=100)
    sp.add_argument("--maxlen", type=int, help="string length bound (default 2 x product states)")
    sp.add_argument("-o", "--output", metavar="FILE")
    sp.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except fm.FormulaSyntaxError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except dfa.StateExplosionError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CAP
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except (des.DesError, product.ProductError, supervisor.PermissivenessError, dfa.AlphabetError,
            sim.PolicyError, KeyError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
