"""Knowledge labelings and the knowledge-consistency check."""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from functools import lru_cache

from ..logic.checking import belief_satisfies
from ..logic.formulas import format_formula, parse_bltl
from ..world import WorldError


class KnowledgeLabeling:
    """Named belief formulas plus, per design-world state, the names that hold."""

    def __init__(self, world, formulas: dict, per_state):
        self.world = world
        self.formulas = dict(formulas)
        self.per_state = tuple(frozenset(x) for x in per_state)
        if len(self.per_state) != len(world.states):
            raise WorldError("knowledge labeling must cover every state")
        for names in self.per_state:
            for n in names:
                if n not in self.formulas:
                    raise WorldError(f"unknown knowledge formula {n!r}")

    @classmethod
    def empty(cls, world):
        return cls(world, {}, [()] * len(world.states))

    @classmethod
    def uniform(cls, world, formulas: dict):
        return cls(world, formulas, [tuple(formulas)] * len(world.states))

    def at(self, s):
        return tuple(self.formulas[n] for n in sorted(self.per_state[s]))

    def names_at(self, s):
        return self.per_state[s]

    def restrict(self, per_state):
        """Same formula table, smaller per-state sets."""
        return KnowledgeLabeling(self.world, self.formulas, per_state)

    def key(self):
        return (tuple(sorted((k, str(v)) for k, v in self.formulas.items())), self.per_state)

    def __eq__(self, other):
        return isinstance(other, KnowledgeLabeling) and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def format(self) -> str:
        lines = [f"formula {n} = {format_formula(f)}" for n, f in self.formulas.items()]
        w = self.world
        for s, names in enumerate(self.per_state):
            lines.append(f"at {w.states[s]} {' '.join(sorted(names))}".rstrip())
        return "\n".join(lines) + "\n"


def parse_knowledge(text: str, world) -> KnowledgeLabeling:
    formulas, default, extra, cleared = {}, set(), {}, set()
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        head, _, rest = line.partition(" ")
        if head == "formula":
            name, eq, body = rest.partition("=")
            if not eq:
                raise WorldError("formula <name> = <bltl>", lineno)
            try:
                formulas[name.strip()] = parse_bltl(body)
            except ValueError as exc:
                raise WorldError(str(exc), lineno) from None
        elif head == "default":
            default.update(rest.split())
        elif head in ("at", "clear"):
            parts = rest.split()
            if not parts:
                raise WorldError(f"{head} <state> ...", lineno)
            s = world.state_id(parts[0])
            if head == "clear":
                cleared.add(s)
            extra.setdefault(s, set()).update(parts[1:])
        else:
            raise WorldError(f"unknown directive {head!r}", lineno)
    per_state = []
    for s in range(len(world.states)):
        names = set() if s in cleared else set(default)
        names |= extra.get(s, set())
        per_state.append(names)
    return KnowledgeLabeling(world, formulas, per_state)


@lru_cache(maxsize=65536)
def satisfies_all(belief, formulas) -> bool:
    return all(belief_satisfies(belief, f) for f in formulas)


def failed_formulas(belief, labeling, s):
    return [n for n in sorted(labeling.names_at(s))
            if not belief_satisfies(belief, labeling.formulas[n])]


@dataclass(frozen=True)
class ConsistencyReport:
    consistent: bool
    witness: tuple = ()          # design-world state names along a violating path
    belief: str | None = None
    failed: tuple = ()
    reason: str = ""

    def __bool__(self):
        return self.consistent


def check_knowledge_consistency(formation, world, labeling, catalog) -> ConsistencyReport:
    """Every initial path's formed belief satisfies the knowledge at its last state.

    Decided on the product of ``world`` (all actions) with the formation
    automaton; the witness is a shortest violating path.
    """
    dfa = formation.dfa
    letter = [formation.letter_of(world.label_sets[s]) for s in range(len(world.states))]
    parent = {}
    queue = deque()
    for s in sorted(world.init):
        node = (s, dfa.step(dfa.initial, letter[s]))
        if node not in parent:
            parent[node] = None
            queue.append(node)
    while queue:
        node = queue.popleft()
        s, q = node
        bid = dfa.output(q)
        problem = None
        if bid is None:
            problem = (None, (), "no-rule-matches")
        elif bid not in catalog:
            problem = (bid, (), f"unknown belief {bid}")
        else:
            b = catalog[bid]
            if not satisfies_all(b, labeling.at(s)):
                problem = (bid, tuple(failed_formulas(b, labeling, s)), "knowledge violated")
        if problem is not None:
            path = [node]
            while parent[path[-1]] is not None:
                path.append(parent[path[-1]])
            names = tuple(world.states[x] for x, _ in reversed(path))
            return ConsistencyReport(False, names, problem[0], problem[1], problem[2])
        for s2 in world.succ[s]:
            nxt = (s2, dfa.step(q, letter[s2]))
            if nxt not in parent:
                parent[nxt] = node
                queue.append(nxt)
    return ConsistencyReport(True)
