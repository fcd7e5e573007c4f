"""Exact solver for conjunctions of ``G p``, ``F p`` and ``p`` (p propositional).

The arena is paired with a reach mask (which ``F`` targets were seen) and a
violation mask (which safety conjuncts failed), then the knowledge-subset game
is built over sets of such product nodes, one set per observation history.
Per priority level, safety is a greatest fixpoint and the reach goal an
attractor inside it.  Every level shares the same knowledge graph, which lets
the witness play the best level still open from each knowledge set.
"""
from __future__ import annotations

from dataclasses import dataclass

from ..logic.formulas import And, Const, Eventually, Globally, is_propositional
from ..logic.semantics import holds_propositional
from .machine import StrategyMachine


@dataclass(frozen=True)
class Fragment:
    safety: tuple = ()
    initial: tuple = ()
    reach: tuple = ()


def split_fragment(formula):
    """Decompose into the exact fragment, or None if outside it."""
    parts = []

    def flat(f):
        if isinstance(f, And):
            flat(f.left)
            flat(f.right)
        else:
            parts.append(f)

    flat(formula)
    safety, initial, reach = [], [], []
    for p in parts:
        if isinstance(p, Const) and p.value:
            continue
        if isinstance(p, Globally) and is_propositional(p.arg):
            safety.append(p.arg)
        elif isinstance(p, Eventually) and is_propositional(p.arg):
            reach.append(p.arg)
        elif is_propositional(p):
            initial.append(p)
        else:
            return None
    return Fragment(tuple(safety), tuple(initial), tuple(reach))


def fragment_depth(goals) -> int:
    """Largest k such that every goal of priority <= k is in the fragment."""
    k = 0
    for g in goals:
        if split_fragment(g) is None:
            break
        k += 1
    return k


class KnowledgeGame:
    def __init__(self, arena, goals, n_min, k_max, prefer=None, limit=400000):
        self.arena = arena
        self.n_min = max(1, n_min)
        self.k_max = k_max
        self.prefer = prefer
        frags = [split_fragment(g) for g in goals.goals[:k_max]]
        # bit layout
        self.safety_items, self.initial_items, self.reach_items = [], [], []
        rbits = [0] * (k_max + 1)
        for lvl, fr in enumerate(frags, 1):
            for p in fr.safety:
                self.safety_items.append(p)
            for p in fr.initial:
                self.initial_items.append(p)
            for p in fr.reach:
                self.reach_items.append(p)
            nr = len(self.reach_items)
            rbits[lvl] = (1 << nr) - 1
        ns = len(self.safety_items)
        # safety bits: [0, ns) safety items, [ns, ns+ni) initial items
        smask = []
        imask = []
        cum_s = cum_i = 0
        for fr in frags:
            smask.append(((1 << len(fr.safety)) - 1) << cum_s)
            imask.append(((1 << len(fr.initial)) - 1) << (ns + cum_i))
            cum_s += len(fr.safety)
            cum_i += len(fr.initial)
        self.level_sbits = [0] * (k_max + 1)
        acc = 0
        for lvl in range(1, k_max + 1):
            acc |= smask[lvl - 1] | imask[lvl - 1]
            self.level_sbits[lvl] = acc
        self.level_rbits = rbits
        cache = {}

        def holds(p, lab):
            key = (p, lab)
            v = cache.get(key)
            if v is None:
                v = cache[key] = holds_propositional(p, lab)
            return v

        n = len(arena)
        self.viol = [0] * n
        self.reach = [0] * n
        self.init_viol = [0] * n
        for v in range(n):
            lab = arena.labels[v]
            for i, p in enumerate(self.safety_items):
                if not holds(p, lab):
                    self.viol[v] |= 1 << i
            for j, p in enumerate(self.reach_items):
                if holds(p, lab):
                    self.reach[v] |= 1 << j
            for i, p in enumerate(self.initial_items):
                if not holds(p, lab):
                    self.init_viol[v] |= 1 << (ns + i)
        self._explore(limit)

    # exploration -----------------------------------------------------------
    def _explore(self, limit):
        arena = self.arena
        self.sets = []
        self.set_index = {}
        self.children = []          # children[K][a] -> tuple of (token, K')
        self.init_sets = {}         # token -> K
        bad_min = self.level_sbits[self.n_min]
        self.vmask = []             # union of violation bits over members
        self.rmin = []              # intersection of reach masks over members

        def intern(nodes):
            k = self.set_index.get(nodes)
            if k is None:
                if len(self.sets) >= limit:
                    raise RuntimeError("knowledge game too large")
                k = len(self.sets)
                self.set_index[nodes] = k
                self.sets.append(nodes)
                vm, rm = 0, -1
                for (_, r, x) in nodes:
                    vm |= x
                    rm &= r
                self.vmask.append(vm)
                self.rmin.append(rm)
                self.children.append(None)
                stack.append(k)
            return k

        stack = []
        groups = {}
        for v in arena.init:
            node = (v, self.reach[v], self.viol[v] | self.init_viol[v])
            groups.setdefault(arena.tokens[v], set()).add(node)
        for tok in sorted(groups):
            self.init_sets[tok] = intern(frozenset(groups[tok]))
        while stack:
            k = stack.pop()
            if self.vmask[k] & bad_min:
                self.children[k] = ()
                continue
            row = []
            for a in range(len(arena.actions)):
                split = {}
                for (v, r, x) in self.sets[k]:
                    for t in arena.succ[v][a]:
                        split.setdefault(arena.tokens[t], set()).add(
                            (t, r | self.reach[t], x | self.viol[t]))
                row.append(tuple((tok, intern(frozenset(split[tok]))) for tok in sorted(split)))
            self.children[k] = tuple(row)

    # solving ---------------------------------------------------------------
    def _order(self, k, candidates):
        if self.prefer is None or len(candidates) <= 1:
            return candidates
        nodes = frozenset(v for v, _, _ in self.sets[k])
        ranked = self.prefer(self.arena, nodes, [self.arena.actions[a] for a in candidates])
        pos = {a: i for i, a in enumerate(ranked)}
        return sorted(candidates, key=lambda a: pos.get(self.arena.actions[a], len(pos)))

    def solve_level(self, lvl):
        """Winning sets and one action per winning set for level ``lvl``."""
        sb, rb = self.level_sbits[lvl], self.level_rbits[lvl]
        nsets = len(self.sets)
        actions = range(len(self.arena.actions))
        safe = [not (self.vmask[k] & sb) and self.children[k] != () for k in range(nsets)]
        # sets bad at n_min were not expanded; unexpanded sets are losing
        changed = True
        while changed:
            changed = False
            for k in range(nsets):
                if safe[k] and not any(all(safe[c] for _, c in self.children[k][a]) for a in actions):
                    safe[k] = False
                    changed = True
        rank = [None] * nsets
        choice = [None] * nsets
        for k in range(nsets):
            if safe[k] and (self.rmin[k] & rb) == rb:
                ok = [a for a in actions if all(safe[c] for _, c in self.children[k][a])]
                rank[k] = 0
                choice[k] = self._order(k, ok)[0]
        r = 0
        while True:
            r += 1
            new = []
            for k in range(nsets):
                if rank[k] is not None or not safe[k]:
                    continue
                ok = [a for a in actions
                      if all(rank[c] is not None and rank[c] < r for _, c in self.children[k][a])]
                if ok:
                    new.append((k, self._order(k, ok)[0]))
            if not new:
                break
            for k, a in new:
                rank[k] = r
                choice[k] = a
        return rank, choice

    def solve(self):
        self.levels = {}
        for lvl in range(self.n_min, self.k_max + 1):
            rank, choice = self.solve_level(lvl)
            won = all(rank[k] is not None for k in self.init_sets.values())
            self.levels[lvl] = (won, rank, choice)
            if not won:
                break           # higher levels imply this one
        return {lvl: v[0] for lvl, v in self.levels.items()}

    def strategy(self, n):
        """Best-effort choice: at each set, the action of the highest level it wins."""
        strat = {}
        for k in range(len(self.sets)):
            for lvl in sorted(self.levels, reverse=True):
                if lvl < n:
                    break
                won, rank, choice = self.levels[lvl]
                if rank[k] is not None:
                    strat[k] = choice[k]
                    break
        return strat

    # machine ----------------------------------------------------------------
    def machine(self, n, default_action=None, lost_tracker=None):
        """Build a total machine over the arena alphabet from the level-n strategy.

        ``lost_tracker`` = (step(E, token) -> E', policy(E) -> action) keeps an
        estimate when the observed history leaves the strategy's knowledge.
        """
        strat = self.strategy(n)
        arena = self.arena
        alphabet = arena.alphabet
        names = {"start": "m0"}
        order = ["start"]
        table = {}
        default_action = default_action or arena.actions[0]

        counts = {"K": 0, "L": 0}

        def name_of(key):
            if key not in names:
                counts[key[0]] += 1
                names[key] = (f"m{counts['K']}" if key[0] == "K" else f"x{counts['L'] - 1}")
                order.append(key)
            return names[key]

        head = 0
        while head < len(order):
            key = order[head]
            head += 1
            for tok in alphabet:
                nxt = None
                if key == "start":
                    k2 = self.init_sets.get(tok)
                    est_prev = None
                elif key[0] == "K":
                    k = key[1]
                    k2 = dict(self.children[k][strat[k]]).get(tok) if self.children[k] else None
                    est_prev = key[2]
                else:
                    k2 = None
                    est_prev = key[1]
                est = None
                if lost_tracker is not None:
                    est = lost_tracker[0](est_prev, tok)
                if k2 is not None and k2 in strat:
                    nxt = ("K", k2, est)
                    action = arena.actions[strat[k2]]
                else:
                    nxt = ("L", est)
                    action = lost_tracker[1](est) if lost_tracker is not None else default_action
                table[(names[key], tok)] = (name_of(nxt), action)
        memory = [names[k] for k in order]
        return StrategyMachine.from_table(memory, "m0", table).compact(alphabet)
