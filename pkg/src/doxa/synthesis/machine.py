"""Finite-state strategy transducers and their text format.

A machine in memory ``m`` reads an observation token, moves to ``m'`` and
outputs an ego action.  Rows may use the token ``*`` as a per-memory
fallback; ``default`` covers anything else.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from ..logic.checking import Lasso, graph_counterexample


class MachineError(ValueError):
    pass


@dataclass(frozen=True)
class StrategyMachine:
    memory: tuple
    init: str
    rows: tuple                     # sorted ((m, token), (m2, action)) pairs
    default: str | None = None
    _table: dict = field(default=None, compare=False, hash=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "_table", dict(self.rows))
        if self.init not in self.memory:
            raise MachineError(f"initial memory {self.init!r} not declared")
        for (m, _), (m2, _) in self.rows:
            if m not in self.memory or m2 not in self.memory:
                raise MachineError(f"row uses undeclared memory {m!r} or {m2!r}")

    @classmethod
    def from_table(cls, memory, init, table, default=None):
        return cls(tuple(memory), init, tuple(sorted(table.items())), default)

    @property
    def table(self):
        return self._table

    def step(self, m, token):
        hit = self._table.get((m, token))
        if hit is None:
            hit = self._table.get((m, "*"))
        if hit is None:
            if self.default is None:
                raise MachineError(f"no row for memory {m!r} and observation {token!r}")
            return m, self.default
        return hit

    def run(self, tokens):
        m, out = self.init, []
        for t in tokens:
            m, a = self.step(m, t)
            out.append(a)
        return out

    def is_total(self, alphabet) -> bool:
        if self.default is not None:
            return True
        return all((m, t) in self._table or (m, "*") in self._table
                   for m in self.memory for t in alphabet)

    def actions(self):
        out = {a for _, (_, a) in self.rows}
        if self.default is not None:
            out.add(self.default)
        return out

    def compact(self, alphabet=None):
        """Equivalent machine using one ``*`` row per memory for the most common entry."""
        by_mem = {}
        for (m, t), v in self.rows:
            by_mem.setdefault(m, {})[t] = v
        table = {}
        for m, rows in by_mem.items():
            if "*" in rows or len(rows) < 3:
                table.update({(m, t): v for t, v in rows.items()})
                continue
            if alphabet is not None and set(rows) != set(alphabet):
                table.update({(m, t): v for t, v in rows.items()})
                continue
            counts = {}
            for v in rows.values():
                counts[v] = counts.get(v, 0) + 1
            common = max(sorted(counts), key=lambda v: counts[v])
            table[(m, "*")] = common
            table.update({(m, t): v for t, v in rows.items() if v != common})
        return StrategyMachine.from_table(self.memory, self.init, table, self.default)

    def format(self) -> str:
        lines = ["memory " + " ".join(self.memory), f"init {self.init}"]
        if self.default is not None:
            lines.append(f"default {self.default}")
        for (m, t), (m2, a) in self.rows:
            lines.append(f"row {m} {t} -> {m2} {a}")
        return "\n".join(lines) + "\n"


def parse_machine(text: str) -> StrategyMachine:
    memory, init, default, table = [], None, None, {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        head = parts[0]
        if head == "memory":
            memory.extend(parts[1:])
        elif head == "init":
            init = parts[1]
        elif head == "default":
            default = parts[1]
        elif head == "row":
            if len(parts) != 6 or parts[3] != "->":
                raise MachineError(f"line {lineno}: row <m> <token> -> <m'> <action>")
            key = (parts[1], parts[2])
            if key in table:
                raise MachineError(f"line {lineno}: duplicate row for {key}")
            table[key] = (parts[4], parts[5])
        else:
            raise MachineError(f"line {lineno}: unknown directive {head!r}")
    if not memory:
        raise MachineError("machine needs a memory line")
    if init is None:
        init = memory[0]
    return StrategyMachine.from_table(memory, init, table, default)


def memoryless(mapping: dict, default=None) -> StrategyMachine:
    """One-state machine from ``token -> action``."""
    return StrategyMachine.from_table(["m0"], "m0",
                                      {("m0", t): ("m0", a) for t, a in mapping.items()}, default)


def constant(action) -> StrategyMachine:
    return StrategyMachine.from_table(["m0"], "m0", {("m0", "*"): ("m0", action)})


# --------------------------------------------------------------------------
# closing an arena with a machine

def closed_graph(arena, machine):
    """Initial nodes and successor function of arena x machine.

    A node ``(v, m)`` means the play is at arena node ``v`` and the machine,
    in memory ``m``, is about to read ``token(v)``.
    """
    aidx = {a: i for i, a in enumerate(arena.actions)}

    def succ(node):
        v, m = node
        m2, a = machine.step(m, arena.tokens[v])
        i = aidx.get(a)
        if i is None:
            raise MachineError(f"machine action {a!r} is not an arena action")
        return [(t, m2) for t in arena.succ[v][i]]

    init = [(v, machine.init) for v in arena.init]
    return init, succ


def machine_counterexample(arena, machine, formula):
    """Lasso of ``(node, memory)`` pairs violating ``formula``, or None."""
    init, succ = closed_graph(arena, machine)
    return graph_counterexample(init, succ, lambda n: arena.labels[n[0]], formula)


def reachable_closed(arena, machine):
    init, succ = closed_graph(arena, machine)
    seen, stack = set(init), list(init)
    while stack:
        n = stack.pop()
        for t in succ(n):
            if t not in seen:
                seen.add(t)
                stack.append(t)
    return seen


def lasso_states(arena, lasso: Lasso):
    """Project a closed-graph lasso onto world states."""
    ws = arena.world_state
    return Lasso(tuple(ws[v] for v, _ in lasso.stem), tuple(ws[v] for v, _ in lasso.loop))
