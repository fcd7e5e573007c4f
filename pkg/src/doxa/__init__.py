"""Doxastic models of autonomous systems.

Worlds with concurrent ego/environment actions, beliefs as sets of realities,
knowledge labelings in belief-LTL, regular belief formations, strategy
synthesis under partial observation, autonomy checks and relevance of
(knowledge, observation, belief) tuples.
"""
from .autonomy import (best_choice_table, best_choices, conserves_autonomous, conserves_doxastic,
                       current_state_choices, disjoint_union, run_doxastic_system,
                       synthesize_autonomous, synthesize_current_state_decisive)
from .beliefs import (Belief, BeliefCatalog, KnowledgeLabeling, Reality, RegularBeliefFormation,
                      check_knowledge_consistency, validate_reality)
from .goals import GoalList, normalize_goal_list
from .io.bundle import load_bundle
from .logic import belief_satisfies, parse_bltl, parse_ltl, world_satisfies
from .relevance import relevance, weak_relevance
from .synthesis import (StrategyMachine, dominates, max_achievable, strategy_level, synthesize,
                        verify_strategy)
from .world import World, WorldBuilder, observable_history, parse_world, validate_world

__version__ = "0.1.0"

__all__ = [
    "best_choice_table", "best_choices", "conserves_autonomous", "conserves_doxastic",
    "current_state_choices", "disjoint_union", "run_doxastic_system", "synthesize_autonomous",
    "synthesize_current_state_decisive", "Belief", "BeliefCatalog", "KnowledgeLabeling",
    "Reality", "RegularBeliefFormation", "check_knowledge_consistency", "validate_reality",
    "GoalList", "normalize_goal_list", "load_bundle", "belief_satisfies", "parse_bltl",
    "parse_ltl", "world_satisfies", "relevance", "weak_relevance", "StrategyMachine",
    "dominates", "max_achievable", "strategy_level", "synthesize", "verify_strategy", "World",
    "WorldBuilder", "observable_history", "parse_world", "validate_world",
]
