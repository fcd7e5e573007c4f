"""Synthesis front end: verify, synthesize, maximal level, dominance."""
from __future__ import annotations

from dataclasses import dataclass

from ..logic.checking import Lasso
from .arena import build_arena
from .bounded import EXHAUSTED, REALIZABLE, UNREALIZABLE, bounded_synthesis
from .exact import KnowledgeGame, fragment_depth
from .machine import StrategyMachine, constant, lasso_states, machine_counterexample


@dataclass(frozen=True)
class SynthesisResult:
    status: str                 # realizable | unrealizable | bound-exhausted
    machine: StrategyMachine | None
    level: int
    exact: bool                 # True when the verdict is definitive
    method: str                 # "exact" or "bounded"

    def __bool__(self):
        return self.status == REALIZABLE

    @property
    def definitive(self):
        return self.status != EXHAUSTED


@dataclass(frozen=True)
class Achievement:
    level: int
    machine: StrategyMachine
    conditional: bool           # a higher level was only refuted up to the bound

    def __int__(self):
        return self.level


@dataclass(frozen=True)
class VerifyResult:
    ok: bool
    counterexample: Lasso | None = None     # world state names
    memory: Lasso | None = None             # machine memory along the lasso

    def __bool__(self):
        return self.ok


def solve_arena(arena, goals, n, bound=None, prefer=None, lost_tracker=None,
                default_action=None) -> SynthesisResult:
    """Synthesize a machine achieving every goal of priority <= n on ``arena``."""
    if n <= 1:
        return SynthesisResult(REALIZABLE, constant(default_action or arena.actions[0]), n,
                               True, "exact")
    depth = fragment_depth(goals)
    if n <= depth:
        game = KnowledgeGame(arena, goals, n, depth, prefer=prefer)
        won = game.solve()
        if won.get(n):
            m = game.machine(n, default_action=default_action, lost_tracker=lost_tracker)
            return SynthesisResult(REALIZABLE, m, n, True, "exact")
        return SynthesisResult(UNREALIZABLE, None, n, True, "exact")
    status, machine, _ = bounded_synthesis(arena, goals.up_to(n), bound)
    return SynthesisResult(status, machine, n, status == REALIZABLE, "bounded")


def max_level_arena(arena, goals, bound=None, prefer=None, lost_tracker=None,
                    default_action=None) -> Achievement:
    depth = fragment_depth(goals)
    top, machine = 1, constant(default_action or arena.actions[0])
    if depth >= 2:
        game = KnowledgeGame(arena, goals, 2, depth, prefer=prefer)
        won = game.solve()
        wins = [lvl for lvl, ok in won.items() if ok]
        if wins:
            top = max(wins)
            machine = game.machine(top, default_action=default_action, lost_tracker=lost_tracker)
    if top < depth or depth == len(goals):
        return Achievement(top, machine, False)
    conditional = False
    for lvl in range(len(goals), top, -1):
        res = solve_arena(arena, goals, lvl, bound)
        if res:
            return Achievement(lvl, res.machine, conditional)
        if not res.definitive:
            conditional = True
    return Achievement(top, machine, conditional)


def synthesize(world, goals, n, obs, bound=None, prefer=None) -> SynthesisResult:
    return solve_arena(build_arena(world, obs), goals, n, bound, prefer)


def max_achievable(world, goals, obs, bound=None, prefer=None) -> Achievement:
    return max_level_arena(build_arena(world, obs), goals, bound, prefer)


def verify_arena(arena, goals, n, machine) -> VerifyResult:
    ce = machine_counterexample(arena, machine, goals.up_to(n))
    if ce is None:
        return VerifyResult(True)
    states = lasso_states(arena, ce)
    mem = Lasso(tuple(m for _, m in ce.stem), tuple(m for _, m in ce.loop))
    return VerifyResult(False, states, mem)


def verify_strategy(world, goals, n, obs, machine) -> VerifyResult:
    """Every play of ``machine`` under ``obs`` satisfies the goals up to ``n``.

    The counterexample lists world state names."""
    res = verify_arena(build_arena(world, obs), goals, n, machine)
    if res.ok:
        return res
    ce = res.counterexample
    named = Lasso(tuple(world.states[s] for s in ce.stem), tuple(world.states[s] for s in ce.loop))
    return VerifyResult(False, named, res.memory)


def strategy_level(world, goals, obs, machine) -> int:
    """Greatest n the machine achieves (its dominance rank)."""
    arena = build_arena(world, obs)
    for n in range(len(goals), 0, -1):
        if verify_arena(arena, goals, n, machine):
            return n
    return 0


def dominates(n1, n2) -> bool:
    """A strategy reaching level ``n1`` dominates one reaching ``n2``."""
    return int(n2) <= int(n1)
