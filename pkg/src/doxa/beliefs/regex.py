"""Regular expressions over observation letters.

A letter is a frozenset of atom names.  Expressions are written as
whitespace-separated tokens: a letter alias or canonical letter (sorted atoms
joined by ``.``, ``{}`` for the empty letter), ``.`` for any letter, ``()`` for
the empty word, and the operators ``| * + ? ( )``.
"""
from __future__ import annotations

import re

ANY = ("any",)
EPS = ("eps",)

_TOK = re.compile(r"\(\s*\)|[()|*+?]|[^\s()|*+?]+")


class RegexError(ValueError):
    pass


def letter_token(letter) -> str:
    return ".".join(sorted(letter)) if letter else "{}"


def token_letter(tok) -> frozenset:
    return frozenset() if tok == "{}" else frozenset(tok.split("."))


def parse_regex(text, resolve):
    """``resolve(word)`` maps a letter word to a frozenset."""
    toks = [t if not t.startswith("(") or t == "(" else "()" for t in _TOK.findall(text)]
    if not toks:
        raise RegexError("empty expression")
    pos = 0

    def peek():
        return toks[pos] if pos < len(toks) else None

    def alt():
        nonlocal pos
        node = cat()
        while peek() == "|":
            pos += 1
            node = ("alt", node, cat())
        return node

    def cat():
        items = []
        while peek() is not None and peek() not in ("|", ")"):
            items.append(post())
        if not items:
            raise RegexError(f"empty alternative near token {pos}")
        node = items[0]
        for it in items[1:]:
            node = ("cat", node, it)
        return node

    def post():
        nonlocal pos
        node = atom()
        while peek() in ("*", "+", "?"):
            op = toks[pos]
            pos += 1
            node = ({"*": "star", "+": "plus", "?": "opt"}[op], node)
        return node

    def atom():
        nonlocal pos
        t = peek()
        if t is None:
            raise RegexError("unexpected end of expression")
        pos += 1
        if t == "()":
            return EPS
        if t == "(":
            node = alt()
            if peek() != ")":
                raise RegexError("missing ')'")
            pos += 1
            return node
        if t in (")", "|", "*", "+", "?"):
            raise RegexError(f"unexpected {t!r}")
        if t == ".":
            return ANY
        return ("sym", resolve(t))

    node = alt()
    if pos != len(toks):
        raise RegexError(f"unexpected {toks[pos]!r}")
    return node


def regex_letters(node):
    if node[0] == "sym":
        return {node[1]}
    out = set()
    for child in node[1:]:
        if isinstance(child, tuple):
            out |= regex_letters(child)
    return out


class NFA:
    """Thompson automaton; edges carry a letter, ANY, or None (epsilon)."""

    def __init__(self, node):
        self.edges = []
        self.start = self._new()
        self.accept = self._new()
        self._build(node, self.start, self.accept)
        self._closure = {}

    def _new(self):
        self.edges.append([])
        return len(self.edges) - 1

    def _build(self, node, a, b):
        kind = node[0]
        if kind == "sym":
            self.edges[a].append((node[1], b))
        elif kind == "any":
            self.edges[a].append((ANY, b))
        elif kind == "eps":
            self.edges[a].append((None, b))
        elif kind == "cat":
            mid = self._new()
            self._build(node[1], a, mid)
            self._build(node[2], mid, b)
        elif kind == "alt":
            self._build(node[1], a, b)
            self._build(node[2], a, b)
        elif kind in ("star", "plus", "opt"):
            i, o = self._new(), self._new()
            self.edges[a].append((None, i))
            self.edges[o].append((None, b))
            self._build(node[1], i, o)
            if kind in ("star", "plus"):
                self.edges[o].append((None, i))
            if kind in ("star", "opt"):
                self.edges[a].append((None, b))
        else:
            raise RegexError(f"bad node {node!r}")

    def closure(self, states) -> frozenset:
        key = frozenset(states)
        hit = self._closure.get(key)
        if hit is not None:
            return hit
        seen = set(key)
        stack = list(key)
        while stack:
            s = stack.pop()
            for lab, t in self.edges[s]:
                if lab is None and t not in seen:
                    seen.add(t)
                    stack.append(t)
        out = self._closure[key] = frozenset(seen)
        return out

    def initial(self):
        return self.closure({self.start})

    def step(self, states, letter) -> frozenset:
        nxt = set()
        for s in states:
            for lab, t in self.edges[s]:
                if lab is ANY or (lab is not None and lab == letter):
                    nxt.add(t)
        return self.closure(nxt)

    def matches(self, word) -> bool:
        cur = self.initial()
        for letter in word:
            cur = self.step(cur, letter)
            if not cur:
                return False
        return self.accept in cur


def format_regex(node, name=letter_token) -> str:
    """Render an AST back to token syntax."""
    kind = node[0]
    if kind == "sym":
        return name(node[1])
    if kind == "any":
        return "."
    if kind == "eps":
        return "()"
    if kind == "cat":
        parts = []
        for child in (node[1], node[2]):
            s = format_regex(child, name)
            parts.append(f"( {s} )" if child[0] == "alt" else s)
        return " ".join(parts)
    if kind == "alt":
        return f"{format_regex(node[1], name)} | {format_regex(node[2], name)}"
    op = {"star": "*", "plus": "+", "opt": "?"}[kind]
    inner = format_regex(node[1], name)
    if node[1][0] in ("cat", "alt") or node[1][0] in ("star", "plus", "opt"):
        inner = f"( {inner} )"
    return inner + op
