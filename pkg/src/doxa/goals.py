"""Prioritized goal lists.

A goal list is stored in priority order: ``goals[i]`` has priority ``i + 1``.
Normalization always puts ``true`` at priority 1 and ``G !undef`` at 2.
"""
from __future__ import annotations

from dataclasses import dataclass

from .logic.checking import world_satisfies
from .logic.formulas import TRUE, Formula, Globally, Not, Prop, conj, parse_ltl
from .logic.semantics import evaluate_lasso

NO_UNDEF = Globally(Not(Prop("undef")))


class GoalError(ValueError):
    pass


@dataclass(frozen=True)
class GoalList:
    goals: tuple

    def __len__(self):
        return len(self.goals)

    def prio(self, i):
        return i + 1

    def up_to(self, n) -> Formula:
        """Conjunction of every goal with priority at most ``n``."""
        if n < 0 or n > len(self.goals):
            raise GoalError(f"priority {n} outside 0..{len(self.goals)}")
        return conj(self.goals[:n]) if n else TRUE

    def __iter__(self):
        return iter(self.goals)


def normalize_goal_list(user_goals, user_prios=None) -> GoalList:
    """Sort user goals by priority and prepend the two technical goals."""
    goals = [parse_ltl(g) if isinstance(g, str) else g for g in user_goals]
    if user_prios is None:
        user_prios = list(range(1, len(goals) + 1))
    user_prios = list(user_prios)
    if len(user_prios) != len(goals):
        raise GoalError("one priority per goal is required")
    if len(set(user_prios)) != len(user_prios):
        raise GoalError("duplicate-priority")
    if sorted(user_prios) != list(range(1, len(goals) + 1)):
        raise GoalError("priorities must be exactly 1..n")
    ordered = [g for _, g in sorted(zip(user_prios, goals), key=lambda x: x[0])]
    return GoalList((TRUE, NO_UNDEF, *ordered))


def lasso_satisfies_up_to(stem, loop, g: GoalList, n) -> bool:
    return evaluate_lasso(g.up_to(n), stem, loop)


def world_satisfies_up_to(w, sources, g: GoalList, n) -> bool:
    return world_satisfies(w, sources, g.up_to(n))


def trace_satisfies_up_to(source, g: GoalList, n) -> bool:
    """``source`` is a lasso ``(stem, loop)`` of label sets or ``(world, states)``."""
    a, b = source
    if hasattr(a, "succ"):
        return world_satisfies_up_to(a, b, g, n)
    return lasso_satisfies_up_to(a, b, g, n)


def achieved_level(check, g: GoalList) -> int:
    """Greatest n with ``check(n)`` true, descending from the top."""
    for n in range(len(g), 0, -1):
        if check(n):
            return n
    return 0
