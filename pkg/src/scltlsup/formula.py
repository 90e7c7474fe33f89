"""scLTL formulas: syntax tree, parser, derivatives and good-prefix oracles.

Concrete syntax, tightest binding first::

    unary      !a   X f   F f        (! only in front of an atom)
    until      f U g                 (right associative)
    and        f & g                 (left associative)
    or         f | g                 (left associative)

``F f`` is sugar for ``true U f``. Atoms are identifiers; ``true``, ``false``,
``X``, ``U`` and ``F`` are reserved.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations
from typing import Iterable, Sequence


class Formula:
    """Base class of all syntax tree nodes. Nodes are immutable and hashable."""

    __slots__ = ()

    def __str__(self) -> str:
        return to_text(self)


@dataclass(frozen=True, slots=True, repr=False)
class TrueConst(Formula):
    def __repr__(self):
        return "TRUE"


@dataclass(frozen=True, slots=True, repr=False)
class FalseConst(Formula):
    def __repr__(self):
        return "FALSE"


@dataclass(frozen=True, slots=True)
class Atom(Formula):
    name: str


@dataclass(frozen=True, slots=True)
class NegAtom(Formula):
    name: str


@dataclass(frozen=True, slots=True)
class And(Formula):
    lhs: Formula
    rhs: Formula


@dataclass(frozen=True, slots=True)
class Or(Formula):
    lhs: Formula
    rhs: Formula


@dataclass(frozen=True, slots=True)
class Next(Formula):
    sub: Formula


@dataclass(frozen=True, slots=True)
class Until(Formula):
    lhs: Formula
    rhs: Formula


TRUE = TrueConst()
FALSE = FalseConst()


def eventually(f: Formula) -> Until:
    return Until(TRUE, f)


class FormulaSyntaxError(ValueError):
    """Raised by :func:`parse`; ``offset`` is the byte offset of the problem."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (at byte {offset})")
        self.offset = offset


# ---------------------------------------------------------------------------
# Parsing

_TOKEN = re.compile(r"\s*(?:(?P<ident>[A-Za-z_][A-Za-z0-9_]*)|(?P<sym>[()!&|]))")
_KEYWORDS = {"true", "false", "X", "U", "F"}


def _tokenize(text: str):
    pos = 0
    tokens = []
    while True:
        while pos < len(text) and text[pos].isspace():
            pos += 1
        if pos >= len(text):
            break
        m = _TOKEN.match(text, pos)
        if m is None:
            raise FormulaSyntaxError(f"unexpected character {text[pos]!r}", _byte_offset(text, pos))
        start = m.start("ident") if m.group("ident") else m.start("sym")
        tokens.append((m.group("ident") or m.group("sym"), _byte_offset(text, start)))
        pos = m.end()
    tokens.append((None, _byte_offset(text, len(text))))
    return tokens


def _byte_offset(text: str, pos: int) -> int:
    return len(text[:pos].encode("utf-8"))


class _Parser:
    def __init__(self, text: str, ap: Sequence[str] | None):
        self.tokens = _tokenize(text)
        self.i = 0
        self.ap = None if ap is None else set(ap)

    def peek(self):
        return self.tokens[self.i]

    def advance(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, value):
        tok, off = self.advance()
        if tok != value:
            found = "end of input" if tok is None else repr(tok)
            raise FormulaSyntaxError(f"expected {value!r}, found {found}", off)

    def parse(self) -> Formula:
        f = self.disjunction()
        tok, off = self.peek()
        if tok is not None:
            raise FormulaSyntaxError(f"unexpected token {tok!r}", off)
        return f

    def disjunction(self):
        f = self.conjunction()
        while self.peek()[0] == "|":
            self.advance()
            f = Or(f, self.conjunction())
        return f

    def conjunction(self):
        f = self.until()
        while self.peek()[0] == "&":
            self.advance()
            f = And(f, self.until())
        return f

    def until(self):
        f = self.unary()
        if self.peek()[0] == "U":
            self.advance()
            return Until(f, self.until())
        return f

    def unary(self):
        tok, off = self.peek()
        if tok == "!":
            self.advance()
            sub = self.unary()
            if not isinstance(sub, Atom):
                raise FormulaSyntaxError("negation may only be applied to an atom", off)
            return NegAtom(sub.name)
        if tok == "X":
            self.advance()
            return Next(self.unary())
        if tok == "F":
            self.advance()
            return Until(TRUE, self.unary())
        return self.primary()

    def primary(self):
        tok, off = self.advance()
        if tok == "(":
            f = self.disjunction()
            self.expect(")")
            return f
        if tok == "true":
            return TRUE
        if tok == "false":
            raise FormulaSyntaxError("'false' is not part of the scLTL grammar", off)
        if tok is None:
            raise FormulaSyntaxError("unexpected end of input", off)
        if tok in _KEYWORDS or not tok[0].isalpha() and tok[0] != "_":
            raise FormulaSyntaxError(f"unexpected token {tok!r}", off)
        if self.ap is not None and tok not in self.ap:
            raise FormulaSyntaxError(f"undeclared atom {tok!r}", off)
        return Atom(tok)


def parse(text: str, ap: Sequence[str] | None = None) -> Formula:
    """Parse ``text`` into a formula, checking atoms against ``ap`` if given."""
    return _Parser(text, ap).parse()


# ---------------------------------------------------------------------------
# Printing and serialization

_PREC = {Or: 1, And: 2, Until: 3}


def _prec(f):
    if isinstance(f, Until) and f.lhs == TRUE:
        return 4  # printed as F
    return _PREC.get(type(f), 4)


def to_text(f: Formula) -> str:
    if isinstance(f, TrueConst):
        return "true"
    if isinstance(f, FalseConst):
        return "false"
    if isinstance(f, Atom):
        return f.name
    if isinstance(f, NegAtom):
        return "!" + f.name
    if isinstance(f, Next):
        return "X " + _wrap(f.sub, 4)
    if isinstance(f, Until):
        if f.lhs == TRUE:
            return "F " + _wrap(f.rhs, 4)
        # right associative: a parenthesised left operand is needed for nested U
        return f"{_wrap(f.lhs, 4)} U {_wrap(f.rhs, 3)}"
    if isinstance(f, And):
        return f"{_wrap(f.lhs, 2)} & {_wrap(f.rhs, 3)}"
    if isinstance(f, Or):
        return f"{_wrap(f.lhs, 1)} | {_wrap(f.rhs, 2)}"
    raise TypeError(f"not a formula: {f!r}")


def _wrap(f, min_prec):
    s = to_text(f)
    return s if _prec(f) >= min_prec else f"({s})"


def to_json(f: Formula) -> dict:
    if isinstance(f, TrueConst):
        return {"op": "true"}
    if isinstance(f, FalseConst):
        return {"op": "false"}
    if isinstance(f, Atom):
        return {"op": "atom", "name": f.name}
    if isinstance(f, NegAtom):
        return {"op": "negatom", "name": f.name}
    if isinstance(f, Next):
        return {"op": "next", "sub": to_json(f.sub)}
    tag = {And: "and", Or: "or", Until: "until"}[type(f)]
    return {"op": tag, "lhs": to_json(f.lhs), "rhs": to_json(f.rhs)}


def from_json(doc: dict) -> Formula:
    op = doc["op"]
    if op == "true":
        return TRUE
    if op == "false":
        return FALSE
    if op == "atom":
        return Atom(doc["name"])
    if op == "negatom":
        return NegAtom(doc["name"])
    if op == "next":
        return Next(from_json(doc["sub"]))
    cls = {"and": And, "or": Or, "until": Until}.get(op)
    if cls is None:
        raise ValueError(f"unknown formula node tag {op!r}")
    return cls(from_json(doc["lhs"]), from_json(doc["rhs"]))


def atoms(f: Formula) -> set[str]:
    if isinstance(f, (Atom, NegAtom)):
        return {f.name}
    if isinstance(f, Next):
        return atoms(f.sub)
    if isinstance(f, (And, Or, Until)):
        return atoms(f.lhs) | atoms(f.rhs)
    return set()


# ---------------------------------------------------------------------------
# Simplification
#
# The propositional layer of a formula (And/Or over literals and temporal
# subterms) is brought into Blake canonical form: the disjunction of all prime
# implicants, temporal subterms being opaque variables. Prime implicants are
# unique, so propositionally equivalent formulas simplify to the same tree,
# which keeps the set of derivatives finite.


@lru_cache(maxsize=None)
def simplify(f: Formula) -> Formula:
    if isinstance(f, (TrueConst, FalseConst, Atom, NegAtom)):
        return f
    if isinstance(f, Next):
        sub = simplify(f.sub)
        if isinstance(sub, (TrueConst, FalseConst)):
            return sub
        return Next(sub)
    if isinstance(f, Until):
        lhs, rhs = simplify(f.lhs), simplify(f.rhs)
        if rhs == TRUE or rhs == FALSE:
            return rhs
        if lhs == FALSE:
            return rhs
        return Until(lhs, rhs)
    return _from_cubes(_blake(_cubes(f)))


def _cubes(f) -> set[frozenset]:
    """DNF of the propositional layer as a set of cubes (sets of literals)."""
    if isinstance(f, (And, Or)):
        left, right = _cubes(f.lhs), _cubes(f.rhs)
        if isinstance(f, Or):
            return left | right
        out = set()
        for a in left:
            for b in right:
                c = a | b
                if not _contradictory(c):
                    out.add(c)
        return out
    g = simplify(f)
    if g == TRUE:
        return {frozenset()}
    if g == FALSE:
        return set()
    if isinstance(g, (And, Or)):
        return _cubes(g)
    if isinstance(g, NegAtom):
        return {frozenset([(g.name, False)])}
    if isinstance(g, Atom):
        return {frozenset([(g.name, True)])}
    return {frozenset([(g, True)])}


def _contradictory(cube) -> bool:
    return any((var, not pol) in cube for var, pol in cube if isinstance(var, str))


def _absorb(cubes):
    out = set()
    for c in sorted(cubes, key=len):
        if not any(d <= c for d in out):
            out.add(c)
    return out


def _blake(cubes):
    cubes = _absorb(cubes)
    changed = True
    while changed:
        changed = False
        for c1, c2 in combinations(list(cubes), 2):
            clash = [v for v, p in c1 if isinstance(v, str) and (v, not p) in c2]
            if len(clash) != 1:
                continue
            v = clash[0]
            res = (c1 | c2) - {(v, True), (v, False)}
            if not any(d <= res for d in cubes):
                cubes.add(res)
                changed = True
        if changed:
            cubes = _absorb(cubes)
    return cubes


def _literal(lit) -> Formula:
    var, pol = lit
    if isinstance(var, str):
        return Atom(var) if pol else NegAtom(var)
    return var


@lru_cache(maxsize=None)
def sort_key(f: Formula) -> str:
    return to_text(f)


def _from_cubes(cubes) -> Formula:
    if not cubes:
        return FALSE
    if frozenset() in cubes:
        return TRUE
    terms = []
    for cube in cubes:
        lits = sorted((_literal(l) for l in cube), key=sort_key)
        term = lits[0]
        for lit in lits[1:]:
            term = And(term, lit)
        terms.append(term)
    terms.sort(key=sort_key)
    out = terms[0]
    for t in terms[1:]:
        out = Or(out, t)
    return out


# ---------------------------------------------------------------------------
# Derivatives


@lru_cache(maxsize=None)
def _derive(f: Formula, letter: frozenset) -> Formula:
    if isinstance(f, (TrueConst, FalseConst)):
        return f
    if isinstance(f, Atom):
        return TRUE if f.name in letter else FALSE
    if isinstance(f, NegAtom):
        return FALSE if f.name in letter else TRUE
    if isinstance(f, And):
        return And(_derive(f.lhs, letter), _derive(f.rhs, letter))
    if isinstance(f, Or):
        return Or(_derive(f.lhs, letter), _derive(f.rhs, letter))
    if isinstance(f, Next):
        return f.sub
    if isinstance(f, Until):
        return Or(_derive(f.rhs, letter), And(_derive(f.lhs, letter), f))
    raise TypeError(f"not a formula: {f!r}")


def raw_derivative(f: Formula, letter: Iterable[str]) -> Formula:
    """Residual of ``f`` after one letter, without simplification."""
    return _derive(f, frozenset(letter))


def derivative(f: Formula, letter: Iterable[str]) -> Formula:
    """Residual obligation of ``f`` after reading ``letter`` (a set of atoms)."""
    return simplify(_derive(f, frozenset(letter)))


def good_prefix_lb(f: Formula, word: Sequence[Iterable[str]]) -> bool:
    """Sound test: True only if ``word`` is a good prefix of ``f``."""
    g = simplify(f)
    if g == TRUE:
        return True
    for letter in word:
        g = derivative(g, letter)
        if g == TRUE:
            return True
        if g == FALSE:
            return False
    return False


def good_prefix_ub(f: Formula, word: Sequence[Iterable[str]]) -> bool:
    """Necessary test: False only if no extension of ``word`` satisfies ``f``."""
    g = simplify(f)
    for letter in word:
        if g == FALSE:
            break
        g = derivative(g, letter)
    return g != FALSE
