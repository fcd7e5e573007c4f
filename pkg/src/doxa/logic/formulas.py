"""LTL and belief-LTL abstract syntax, parser and printer.

Grammar (whitespace-insensitive, lowest binding first)::

    formula := iff
    iff     := impl ('<->' impl)*
    impl    := or ('->' impl)?          right associative
    or      := and ('|' and)*
    and     := until ('&' until)*
    until   := unary (('U' | 'R') until)?
    unary   := ('!' | 'X' | 'G' | 'F' | 'K' | 'Kc') unary | atom | '(' formula ')'
    atom    := 'true' | 'false' | name | name '=' value

``K`` and ``Kc`` are only accepted by :func:`parse_bltl` and may not occur
below another temporal or knowledge operator.
"""
from __future__ import annotations

import re
from dataclasses import dataclass


class FormulaSyntaxError(ValueError):
    def __init__(self, message, pos):
        super().__init__(f"{message} at position {pos}")
        self.pos = pos


class Formula:
    __slots__ = ()

    def __str__(self):
        return format_formula(self)


@dataclass(frozen=True, repr=False)
class Const(Formula):
    value: bool

    def __repr__(self):
        return "true" if self.value else "false"


@dataclass(frozen=True, repr=False)
class Prop(Formula):
    name: str

    def __repr__(self):
        return self.name


@dataclass(frozen=True, repr=False)
class Not(Formula):
    arg: Formula

    def __repr__(self):
        return f"Not({self.arg!r})"


@dataclass(frozen=True, repr=False)
class Next(Formula):
    arg: Formula

    def __repr__(self):
        return f"X({self.arg!r})"


@dataclass(frozen=True, repr=False)
class Globally(Formula):
    arg: Formula

    def __repr__(self):
        return f"G({self.arg!r})"


@dataclass(frozen=True, repr=False)
class Eventually(Formula):
    arg: Formula

    def __repr__(self):
        return f"F({self.arg!r})"


@dataclass(frozen=True, repr=False)
class And(Formula):
    left: Formula
    right: Formula

    def __repr__(self):
        return f"And({self.left!r}, {self.right!r})"


@dataclass(frozen=True, repr=False)
class Or(Formula):
    left: Formula
    right: Formula

    def __repr__(self):
        return f"Or({self.left!r}, {self.right!r})"


@dataclass(frozen=True, repr=False)
class Implies(Formula):
    left: Formula
    right: Formula

    def __repr__(self):
        return f"Implies({self.left!r}, {self.right!r})"


@dataclass(frozen=True, repr=False)
class Iff(Formula):
    left: Formula
    right: Formula

    def __repr__(self):
        return f"Iff({self.left!r}, {self.right!r})"


@dataclass(frozen=True, repr=False)
class Until(Formula):
    left: Formula
    right: Formula

    def __repr__(self):
        return f"U({self.left!r}, {self.right!r})"


@dataclass(frozen=True, repr=False)
class Release(Formula):
    left: Formula
    right: Formula

    def __repr__(self):
        return f"R({self.left!r}, {self.right!r})"


@dataclass(frozen=True, repr=False)
class Know(Formula):
    """``K psi`` (current=False) or ``Kc psi`` (current=True)."""

    arg: Formula
    current: bool = False

    def __repr__(self):
        return f"{'Kc' if self.current else 'K'}({self.arg!r})"


TRUE = Const(True)
FALSE = Const(False)
UNARY = (Not, Next, Globally, Eventually, Know)
BINARY = (And, Or, Implies, Iff, Until, Release)


def conj(items):
    items = list(items)
    if not items:
        return TRUE
    out = items[0]
    for f in items[1:]:
        out = And(out, f)
    return out


def disj(items):
    items = list(items)
    if not items:
        return FALSE
    out = items[0]
    for f in items[1:]:
        out = Or(out, f)
    return out


def atoms(f) -> frozenset:
    if isinstance(f, Prop):
        return frozenset([f.name])
    if isinstance(f, Const):
        return frozenset()
    if isinstance(f, UNARY):
        return atoms(f.arg)
    return atoms(f.left) | atoms(f.right)


def subformulas(f):
    yield f
    if isinstance(f, UNARY):
        yield from subformulas(f.arg)
    elif isinstance(f, BINARY):
        yield from subformulas(f.left)
        yield from subformulas(f.right)


def depth(f) -> int:
    if isinstance(f, (Prop, Const)):
        return 0
    if isinstance(f, UNARY):
        return 1 + depth(f.arg)
    return 1 + max(depth(f.left), depth(f.right))


def is_ltl(f) -> bool:
    return not any(isinstance(g, Know) for g in subformulas(f))


def is_propositional(f) -> bool:
    return all(isinstance(g, (Prop, Const, Not, And, Or, Implies, Iff)) for g in subformulas(f))


# --------------------------------------------------------------------------
# tokenizer and parser

_TOKEN_RE = re.compile(r"""
    (?P<ws>\s+)
  | (?P<op><->|->|[!&|()])
  | (?P<uni>[¬∧∨→⇒↔⇔□◇])
  | (?P<word>[A-Za-z_][A-Za-z0-9_]*(?:\s*=\s*[A-Za-z0-9_.]+)?)
""", re.VERBOSE)

_UNICODE = {"¬": "!", "∧": "&", "∨": "|", "→": "->", "⇒": "->",
            "↔": "<->", "⇔": "<->", "□": "G", "◇": "F"}
_KEYWORDS = {"X", "G", "F", "U", "R", "K", "Kc", "true", "false"}


def _tokenize(text):
    pos, out = 0, []
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if not m:
            raise FormulaSyntaxError(f"unexpected character {text[pos]!r}", pos)
        kind = m.lastgroup
        if kind == "op":
            out.append((m.group(), pos))
        elif kind == "uni":
            out.append((_UNICODE[m.group()], pos))
        elif kind == "word":
            word = re.sub(r"\s+", "", m.group())
            out.append((word if word in _KEYWORDS else ("atom", word), pos))
        pos = m.end()
    out.append(("end", len(text)))
    return out


class _Parser:
    def __init__(self, text, allow_k):
        self.toks = _tokenize(text)
        self.i = 0
        self.allow_k = allow_k

    def peek(self):
        return self.toks[self.i][0]

    def pos(self):
        return self.toks[self.i][1]

    def take(self):
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def expect(self, tok):
        if self.peek() != tok:
            raise FormulaSyntaxError(f"expected {tok!r}", self.pos())
        self.take()

    def parse(self):
        if self.peek() == "end":
            raise FormulaSyntaxError("empty formula", self.pos())
        f = self.iff()
        if self.peek() != "end":
            raise FormulaSyntaxError(f"unexpected token {self._show()}", self.pos())
        return f

    def _show(self):
        t = self.peek()
        return repr(t[1]) if isinstance(t, tuple) else repr(t)

    def iff(self):
        f = self.impl()
        while self.peek() == "<->":
            self.take()
            f = Iff(f, self.impl())
        return f

    def impl(self):
        f = self.disj()
        if self.peek() == "->":
            self.take()
            return Implies(f, self.impl())
        return f

    def disj(self):
        f = self.conj()
        while self.peek() == "|":
            self.take()
            f = Or(f, self.conj())
        return f

    def conj(self):
        f = self.until()
        while self.peek() == "&":
            self.take()
            f = And(f, self.until())
        return f

    def until(self):
        f = self.unary()
        if self.peek() in ("U", "R"):
            op = self.take()[0]
            rhs = self.until()
            return Until(f, rhs) if op == "U" else Release(f, rhs)
        return f

    def unary(self):
        tok, pos = self.toks[self.i]
        if tok == "!":
            self.take()
            return Not(self.unary())
        if tok in ("X", "G", "F"):
            self.take()
            return {"X": Next, "G": Globally, "F": Eventually}[tok](self.unary())
        if tok in ("K", "Kc"):
            if not self.allow_k:
                raise FormulaSyntaxError("knowledge operator in an LTL formula", pos)
            self.take()
            return Know(self.unary(), tok == "Kc")
        if tok == "(":
            self.take()
            f = self.iff()
            self.expect(")")
            return f
        if tok == "true":
            self.take()
            return TRUE
        if tok == "false":
            self.take()
            return FALSE
        if isinstance(tok, tuple):
            self.take()
            return Prop(tok[1])
        if tok == "end":
            raise FormulaSyntaxError("expected operand", pos)
        raise FormulaSyntaxError(f"unexpected token {tok!r}", pos)


def parse_ltl(text: str) -> Formula:
    return _Parser(text, allow_k=False).parse()


def parse_bltl(text: str) -> Formula:
    f = _Parser(text, allow_k=True).parse()
    check_bltl(f)
    return f


def check_bltl(f):
    """Raise unless ``f`` is a Boolean combination of K/Kc over plain LTL."""
    if isinstance(f, Know):
        if not is_ltl(f.arg):
            raise FormulaSyntaxError("nested knowledge operator", 0)
        return
    if isinstance(f, Const):
        return
    if isinstance(f, Not):
        return check_bltl(f.arg)
    if isinstance(f, (And, Or, Implies, Iff)):
        check_bltl(f.left)
        check_bltl(f.right)
        return
    raise FormulaSyntaxError("belief formula must combine K or Kc terms only", 0)


# --------------------------------------------------------------------------
# printer

_PREC = {Iff: 1, Implies: 2, Or: 3, And: 4, Until: 5, Release: 5}


def _prec(f):
    return _PREC.get(type(f), 6)


def format_formula(f) -> str:
    if isinstance(f, Const):
        return "true" if f.value else "false"
    if isinstance(f, Prop):
        return f.name
    if isinstance(f, UNARY):
        op = {Not: "!", Next: "X ", Globally: "G ", Eventually: "F "}.get(type(f))
        if op is None:
            op = "Kc " if f.current else "K "
        inner = format_formula(f.arg)
        if _prec(f.arg) < 6:
            inner = f"({inner})"
        return op + inner
    op = {And: "&", Or: "|", Implies: "->", Iff: "<->", Until: "U", Release: "R"}[type(f)]
    p = _prec(f)
    left, right = format_formula(f.left), format_formula(f.right)
    right_assoc = isinstance(f, (Implies, Until, Release))
    if _prec(f.left) < p or (right_assoc and _prec(f.left) == p):
        left = f"({left})"
    if _prec(f.right) < p or (not right_assoc and _prec(f.right) == p):
        right = f"({right})"
    return f"{left} {op} {right}"


# --------------------------------------------------------------------------
# normal forms

def to_core(f) -> Formula:
    """Rewrite into the core {const, atom, !, &, X, U}."""
    if isinstance(f, (Const, Prop)):
        return f
    if isinstance(f, Not):
        return Not(to_core(f.arg))
    if isinstance(f, Next):
        return Next(to_core(f.arg))
    if isinstance(f, And):
        return And(to_core(f.left), to_core(f.right))
    if isinstance(f, Or):
        return Not(And(Not(to_core(f.left)), Not(to_core(f.right))))
    if isinstance(f, Implies):
        return Not(And(to_core(f.left), Not(to_core(f.right))))
    if isinstance(f, Iff):
        a, b = to_core(f.left), to_core(f.right)
        return And(Not(And(a, Not(b))), Not(And(b, Not(a))))
    if isinstance(f, Until):
        return Until(to_core(f.left), to_core(f.right))
    if isinstance(f, Eventually):
        return Until(TRUE, to_core(f.arg))
    if isinstance(f, Globally):
        return Not(Until(TRUE, Not(to_core(f.arg))))
    if isinstance(f, Release):
        return Not(Until(Not(to_core(f.left)), Not(to_core(f.right))))
    raise TypeError(f"not an LTL formula: {f!r}")


def nnf(f, neg=False) -> Formula:
    """Negation normal form over {const, atom, !atom, &, |, X, U, R}."""
    if isinstance(f, Const):
        return Const(f.value != neg)
    if isinstance(f, Prop):
        return Not(f) if neg else f
    if isinstance(f, Not):
        return nnf(f.arg, not neg)
    if isinstance(f, Next):
        return Next(nnf(f.arg, neg))
    if isinstance(f, And):
        cls = Or if neg else And
        return cls(nnf(f.left, neg), nnf(f.right, neg))
    if isinstance(f, Or):
        cls = And if neg else Or
        return cls(nnf(f.left, neg), nnf(f.right, neg))
    if isinstance(f, Implies):
        return nnf(Or(Not(f.left), f.right), neg)
    if isinstance(f, Iff):
        return nnf(Or(And(f.left, f.right), And(Not(f.left), Not(f.right))), neg)
    if isinstance(f, Until):
        cls = Release if neg else Until
        return cls(nnf(f.left, neg), nnf(f.right, neg))
    if isinstance(f, Release):
        cls = Until if neg else Release
        return cls(nnf(f.left, neg), nnf(f.right, neg))
    if isinstance(f, Eventually):
        return nnf(Until(TRUE, f.arg), neg)
    if isinstance(f, Globally):
        return nnf(Release(FALSE, f.arg), neg)
    raise TypeError(f"not an LTL formula: {f!r}")
