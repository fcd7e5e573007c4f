"""LTL to nondeterministic Büchi automaton.

On-the-fly tableau expansion of the negation normal form (the classic
new/old/next node splitting), followed by counter degeneralization.
Automaton states carry literal guards: a run reads letter ``w[i]`` in state
``q[i]`` and requires the letter to satisfy the guard of ``q[i]``.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from .formulas import And, Const, Next, Not, Or, Prop, Release, Until, nnf


@dataclass(frozen=True)
class BuchiAutomaton:
    pos: tuple          # per state: frozenset of atoms that must hold
    neg: tuple          # per state: frozenset of atoms that must not hold
    init: tuple
    succ: tuple         # per state: tuple of successor ids
    accepting: frozenset

    @property
    def size(self):
        return len(self.pos)

    def guard_ok(self, q, letter) -> bool:
        return self.pos[q] <= letter and not (self.neg[q] & letter)


def _is_literal(f):
    return isinstance(f, Prop) or (isinstance(f, Not) and isinstance(f.arg, Prop))


def _tableau(root):
    nodes = []      # list of [incoming:set, old:frozenset, nxt:frozenset]
    index = {}      # (old, nxt) -> node id
    INIT = -1

    def expand(incoming, new, old, nxt):
        stack = [(incoming, new, old, nxt)]
        while stack:
            incoming, new, old, nxt = stack.pop()
            if not new:
                key = (old, nxt)
                if key in index:
                    nodes[index[key]][0].update(incoming)
                    continue
                nid = len(nodes)
                index[key] = nid
                nodes.append([set(incoming), old, nxt])
                stack.append(({nid}, nxt, frozenset(), frozenset()))
                continue
            eta = next(iter(sorted(new, key=repr)))
            new = new - {eta}
            if eta in old:
                stack.append((incoming, new, old, nxt))
                continue
            if isinstance(eta, Const):
                if eta.value:
                    stack.append((incoming, new, old, nxt))
                continue
            if _is_literal(eta):
                neg = eta.arg if isinstance(eta, Not) else Not(eta)
                if neg in old:
                    continue
                stack.append((incoming, new, old | {eta}, nxt))
                continue
            old2 = old | {eta}
            if isinstance(eta, And):
                stack.append((incoming, new | ({eta.left, eta.right} - old2), old2, nxt))
            elif isinstance(eta, Next):
                stack.append((incoming, new, old2, nxt | {eta.arg}))
            elif isinstance(eta, Or):
                stack.append((incoming, new | ({eta.left} - old2), old2, nxt))
                stack.append((incoming, new | ({eta.right} - old2), old2, nxt))
            elif isinstance(eta, Until):
                stack.append((incoming, new | ({eta.left} - old2), old2, nxt | {eta}))
                stack.append((incoming, new | ({eta.right} - old2), old2, nxt))
            elif isinstance(eta, Release):
                stack.append((incoming, new | ({eta.right} - old2), old2, nxt | {eta}))
                stack.append((incoming, new | ({eta.left, eta.right} - old2), old2, nxt))
            else:
                raise TypeError(f"unexpected node {eta!r}")

    expand({INIT}, frozenset([root]), frozenset(), frozenset())
    return nodes, INIT


def _untils(f, acc):
    if isinstance(f, Until):
        acc.add(f)
    for child in ("arg", "left", "right"):
        if hasattr(f, child):
            _untils(getattr(f, child), acc)
    return acc


@lru_cache(maxsize=2048)
def ltl_to_buchi(formula) -> BuchiAutomaton:
    root = nnf(formula)
    nodes, INIT = _tableau(root)
    n = len(nodes)
    succ = [[] for _ in range(n)]
    init = []
    for j, (incoming, _, _) in enumerate(nodes):
        for i in incoming:
            if i == INIT:
                init.append(j)
            else:
                succ[i].append(j)
    pos, neg = [], []
    for _, old, _ in nodes:
        pos.append(frozenset(f.name for f in old if isinstance(f, Prop)))
        neg.append(frozenset(f.arg.name for f in old
                             if isinstance(f, Not) and isinstance(f.arg, Prop)))
    untils = sorted(_untils(root, set()), key=repr)
    fsets = [frozenset(j for j, (_, old, _) in enumerate(nodes)
                       if u not in old or u.right in old or u.right == Const(True)) for u in untils]
    if len(fsets) <= 1:
        acc = fsets[0] if fsets else frozenset(range(n))
        return _prune(BuchiAutomaton(tuple(pos), tuple(neg), tuple(sorted(init)),
                                     tuple(tuple(sorted(s)) for s in succ), acc))
    k = len(fsets)
    ids = {}
    order = []

    def sid(q, i):
        key = (q, i)
        if key not in ids:
            ids[key] = len(order)
            order.append(key)
        return ids[key]

    dinit = [sid(q, 0) for q in sorted(init)]
    dsucc = []
    head = 0
    while head < len(order):
        q, i = order[head]
        head += 1
        j = (i + 1) % k if q in fsets[i] else i
        dsucc.append(tuple(sorted(sid(q2, j) for q2 in succ[q])))
    acc = frozenset(ids[(q, 0)] for (q, i) in order if i == 0 and q in fsets[0])
    return _prune(BuchiAutomaton(tuple(pos[q] for q, _ in order), tuple(neg[q] for q, _ in order),
                                 tuple(dinit), tuple(dsucc), acc))


def _prune(aut):
    """Drop states with contradictory guards; keep ids dense."""
    keep = [q for q in range(aut.size) if not (aut.pos[q] & aut.neg[q])]
    if len(keep) == aut.size:
        return aut
    remap = {q: i for i, q in enumerate(keep)}
    return BuchiAutomaton(
        tuple(aut.pos[q] for q in keep), tuple(aut.neg[q] for q in keep),
        tuple(remap[q] for q in aut.init if q in remap),
        tuple(tuple(remap[t] for t in aut.succ[q] if t in remap) for q in keep),
        frozenset(remap[q] for q in aut.accepting if q in remap))
