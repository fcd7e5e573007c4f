"""Bounded synthesis for arbitrary LTL objectives.

Strategy tables are filled lazily, entry by entry, in the order the closed
product discovers them.  After every assignment the partial product with the
automaton of the negated objective is searched for an accepting lasso; a hit
means the partial table is already refuted.  New memory states are introduced
in order (a table may only jump to the next unused memory), which removes
renaming symmetry.
"""
from __future__ import annotations

import itertools
from collections import deque

from ..logic.buchi import ltl_to_buchi
from ..logic.checking import find_accepting_lasso
from ..logic.formulas import Not
from .machine import StrategyMachine

REALIZABLE = "realizable"
UNREALIZABLE = "unrealizable"
EXHAUSTED = "bound-exhausted"


def default_bound(arena, formula) -> int:
    return len(arena) * (1 + ltl_to_buchi(Not(formula)).size)


class _Budget(Exception):
    pass


def _partial_refuted(arena, aut, table, k):
    """Accepting lasso in arena x partial table x NBA(!phi)?  Also returns the
    undefined table keys in discovery order."""
    missing = []
    seen_missing = set()

    def succ(node):
        v, m, q = node
        key = (m, arena.tokens[v])
        entry = table.get(key)
        if entry is None:
            if key not in seen_missing:
                seen_missing.add(key)
                missing.append(key)
            return ()
        m2, a = entry
        out = []
        for t in arena.succ[v][a]:
            lab = arena.labels[t]
            for q2 in aut.succ[q]:
                if aut.guard_ok(q2, lab):
                    out.append((t, m2, q2))
        return out

    init = [(v, 0, q) for v in arena.init for q in aut.init if aut.guard_ok(q, arena.labels[v])]
    lasso = find_accepting_lasso(init, succ, lambda n: n[2] in aut.accepting)
    if lasso is not None:
        return True, missing
    # find_accepting_lasso stops early only on success, so the whole graph was
    # explored and ``missing`` is complete
    return False, missing


def _machine(arena, table, k, prefer_first=0):
    memory = [f"m{i}" for i in range(k)]
    rows = {}
    for m in range(k):
        for tok in arena.alphabet:
            m2, a = table.get((m, tok), (m, prefer_first))
            rows[(memory[m], tok)] = (memory[m2], arena.actions[a])
    return StrategyMachine.from_table(memory, "m0", rows).compact(arena.alphabet)


def bounded_synthesis(arena, formula, bound=None, budget=200000, action_order=None):
    """Search machines with 1..bound memory states.

    Returns ``(status, machine, memory_size)``.  ``unrealizable`` is never
    returned here: failing every size up to the bound is ``bound-exhausted``.
    """
    aut = ltl_to_buchi(Not(formula))
    if bound is None:
        bound = default_bound(arena, formula)
    order = list(action_order) if action_order is not None else list(range(len(arena.actions)))
    counter = [0]

    def search(table, used, k):
        counter[0] += 1
        if counter[0] > budget:
            raise _Budget()
        refuted, missing = _partial_refuted(arena, aut, table, k)
        if refuted:
            return None
        if not missing:
            return dict(table)
        key = missing[0]
        for m2 in range(min(used + 1, k)):
            for a in order:
                table[key] = (m2, a)
                found = search(table, max(used, m2 + 1), k)
                if found is not None:
                    return found
                del table[key]
        return None

    try:
        for k in range(1, bound + 1):
            found = search({}, 1, k)
            if found is not None:
                return REALIZABLE, _machine(arena, found, k, order[0]), k
    except _Budget:
        return EXHAUSTED, None, None
    return EXHAUSTED, None, None


def enumerate_synthesis(arena, formula, k):
    """Plain enumeration of every total table with ``k`` memory states."""
    aut = ltl_to_buchi(Not(formula))
    keys = [(m, tok) for m in range(k) for tok in arena.alphabet]
    choices = [(m2, a) for m2 in range(k) for a in range(len(arena.actions))]
    for combo in itertools.product(choices, repeat=len(keys)):
        table = dict(zip(keys, combo))
        refuted, missing = _partial_refuted(arena, aut, table, k)
        if not refuted and not missing:
            return _machine(arena, table, k)
    return None


def reachable_tokens(arena):
    seen, queue = set(arena.init), deque(arena.init)
    while queue:
        v = queue.popleft()
        for t in arena.any_succ(v):
            if t not in seen:
                seen.add(t)
                queue.append(t)
    return {arena.tokens[v] for v in seen}
