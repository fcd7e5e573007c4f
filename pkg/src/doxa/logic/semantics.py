"""Direct LTL evaluation on ultimately periodic words ``stem . loop^omega``.

Every letter is a set of atom names.  Used as the reference semantics that
the automaton translation is tested against.
"""
from __future__ import annotations

from .formulas import (And, Const, Eventually, Globally, Iff, Implies, Next, Not, Or,
                       Prop, Release, Until)


def evaluate_lasso(f, stem, loop) -> bool:
    """Truth of ``f`` at position 0 of ``stem loop loop ...``."""
    if not loop:
        raise ValueError("loop part of a lasso must be nonempty")
    word = [frozenset(x) for x in list(stem) + list(loop)]
    return _sat(f, word, len(stem))[0]


def _fix(word, back, step, start):
    n = len(word)
    nxt = [i + 1 if i + 1 < n else back for i in range(n)]
    sat = [start] * n
    for _ in range(n + 1):
        new = [step(i, sat[nxt[i]]) for i in range(n)]
        if new == sat:
            break
        sat = new
    return sat


def _sat(f, word, back):
    n = len(word)
    if isinstance(f, Const):
        return [f.value] * n
    if isinstance(f, Prop):
        return [f.name in letter for letter in word]
    if isinstance(f, Not):
        return [not v for v in _sat(f.arg, word, back)]
    if isinstance(f, (And, Or, Implies, Iff)):
        a, b = _sat(f.left, word, back), _sat(f.right, word, back)
        if isinstance(f, And):
            return [x and y for x, y in zip(a, b)]
        if isinstance(f, Or):
            return [x or y for x, y in zip(a, b)]
        if isinstance(f, Implies):
            return [(not x) or y for x, y in zip(a, b)]
        return [x == y for x, y in zip(a, b)]
    if isinstance(f, Next):
        a = _sat(f.arg, word, back)
        return [a[i + 1] if i + 1 < n else a[back] for i in range(n)]
    if isinstance(f, Until):
        a, b = _sat(f.left, word, back), _sat(f.right, word, back)
        return _fix(word, back, lambda i, nx: b[i] or (a[i] and nx), False)
    if isinstance(f, Release):
        a, b = _sat(f.left, word, back), _sat(f.right, word, back)
        return _fix(word, back, lambda i, nx: b[i] and (a[i] or nx), True)
    if isinstance(f, Eventually):
        a = _sat(f.arg, word, back)
        return _fix(word, back, lambda i, nx: a[i] or nx, False)
    if isinstance(f, Globally):
        a = _sat(f.arg, word, back)
        return _fix(word, back, lambda i, nx: a[i] and nx, True)
    raise TypeError(f"cannot evaluate {f!r} on a word")


def holds_propositional(f, letter) -> bool:
    """Evaluate a state formula on a single letter."""
    return _sat(f, [frozenset(letter)], 0)[0]
