"""Universal model checking over worlds and beliefs.

``world_satisfies`` builds the product of a world with the automaton of the
negated property and searches for a reachable accepting cycle (Tarjan SCCs).
A failure comes with a stem + loop lasso over world states.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from functools import lru_cache

from .buchi import ltl_to_buchi
from .formulas import And, Const, Iff, Implies, Know, Not, Or


@dataclass(frozen=True)
class Lasso:
    stem: tuple
    loop: tuple

    def unroll(self, n):
        seq = list(self.stem)
        while len(seq) < n:
            seq.extend(self.loop)
        return seq[:n]


def find_accepting_lasso(init, succ, accepting):
    """Reachable accepting cycle in an implicit graph, or None.

    ``succ(node)`` returns an iterable of successors, ``accepting(node)`` a
    bool.  The result is a :class:`Lasso` of graph nodes with the accepting
    node first in the loop.
    """
    index, low, on_stack, stack = {}, {}, set(), []
    counter = 0
    succ_cache = {}

    def succs(v):
        s = succ_cache.get(v)
        if s is None:
            s = succ_cache[v] = tuple(succ(v))
        return s

    parent = {}
    found = None
    for root in init:
        if root in index:
            continue
        parent.setdefault(root, None)
        work = [(root, iter(succs(root)))]
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on_stack.add(root)
        while work and found is None:
            v, it = work[-1]
            advanced = False
            for w in it:
                if w not in index:
                    parent[w] = v
                    index[w] = low[w] = counter
                    counter += 1
                    stack.append(w)
                    on_stack.add(w)
                    work.append((w, iter(succs(w))))
                    advanced = True
                    break
                if w in on_stack:
                    low[v] = min(low[v], index[w])
            if advanced:
                continue
            work.pop()
            if work:
                u = work[-1][0]
                low[u] = min(low[u], low[v])
            if low[v] == index[v]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack.discard(w)
                    comp.append(w)
                    if w == v:
                        break
                comp_set = set(comp)
                for a in sorted(comp, key=lambda x: index[x]):
                    if not accepting(a):
                        continue
                    if len(comp) > 1 or a in succs(a):
                        found = (a, comp_set)
                        break
        if found is not None:
            break
    if found is None:
        return None
    a, comp = found
    stem = _bfs_path(list(init), succs, lambda x: x == a, None)
    loop = _bfs_path([t for t in succs(a) if t in comp], succs, lambda x: x == a, comp)
    if loop is None:
        raise AssertionError("accepting SCC without a cycle")
    return Lasso(tuple(stem[:-1]), (a,) + tuple(loop[:-1]))


def _bfs_path(sources, succs, goal, within):
    prev = {}
    queue = deque()
    for s in sources:
        if s not in prev:
            prev[s] = None
            queue.append(s)
    while queue:
        v = queue.popleft()
        if goal(v):
            path = [v]
            while prev[path[-1]] is not None:
                path.append(prev[path[-1]])
            return path[::-1]
        for w in succs(v):
            if w not in prev and (within is None or w in within):
                prev[w] = v
                queue.append(w)
    return None


def graph_counterexample(init, succ, label, formula):
    """Lasso of graph nodes whose trace violates ``formula``, else None.

    ``label(node)`` is the set of atom names true at the node.
    """
    aut = ltl_to_buchi(Not(formula))
    start = [(g, q) for g in init for q in aut.init if aut.guard_ok(q, label(g))]

    def step(node):
        g, q = node
        for g2 in succ(g):
            lab = label(g2)
            for q2 in aut.succ[q]:
                if aut.guard_ok(q2, lab):
                    yield (g2, q2)

    lasso = find_accepting_lasso(start, step, lambda n: n[1] in aut.accepting)
    if lasso is None:
        return None
    return Lasso(tuple(g for g, _ in lasso.stem), tuple(g for g, _ in lasso.loop))


def world_counterexample(w, sources, formula):
    return graph_counterexample(sorted(sources), lambda s: w.succ[s],
                                lambda s: w.label_sets[s], formula)


@lru_cache(maxsize=65536)
def _world_sat(w, sources, formula):
    return world_counterexample(w, sources, formula) is None


def world_satisfies(w, sources, formula) -> bool:
    """Every infinite trace of ``w`` starting in ``sources`` satisfies ``formula``."""
    return _world_sat(w, frozenset(sources), formula)


def belief_satisfies(belief, formula) -> bool:
    """BLTL satisfaction: K quantifies over initial traces, Kc over current ones."""
    if isinstance(formula, Know):
        for r in belief.realities:
            sources = r.current if formula.current else r.world.init
            if not world_satisfies(r.world, sources, formula.arg):
                return False
        return True
    if isinstance(formula, Const):
        return formula.value
    if isinstance(formula, Not):
        return not belief_satisfies(belief, formula.arg)
    if isinstance(formula, And):
        return belief_satisfies(belief, formula.left) and belief_satisfies(belief, formula.right)
    if isinstance(formula, Or):
        return belief_satisfies(belief, formula.left) or belief_satisfies(belief, formula.right)
    if isinstance(formula, Implies):
        return (not belief_satisfies(belief, formula.left)) or belief_satisfies(belief, formula.right)
    if isinstance(formula, Iff):
        return belief_satisfies(belief, formula.left) == belief_satisfies(belief, formula.right)
    raise TypeError(f"not a belief formula: {formula!r}")
