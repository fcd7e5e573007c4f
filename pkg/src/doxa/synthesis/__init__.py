from .api import (Achievement, SynthesisResult, VerifyResult, dominates, max_achievable,
                  max_level_arena, solve_arena, strategy_level, synthesize, verify_arena,
                  verify_strategy)
from .arena import (Arena, FormationObservation, FullObservation, MaskObservation, build_arena,
                    estimate_step)
from .bounded import (EXHAUSTED, REALIZABLE, UNREALIZABLE, bounded_synthesis, default_bound,
                      enumerate_synthesis)
from .exact import KnowledgeGame, fragment_depth, split_fragment
from .machine import (MachineError, StrategyMachine, constant, memoryless, parse_machine)

__all__ = [
    "Achievement", "SynthesisResult", "VerifyResult", "dominates", "max_achievable",
    "max_level_arena", "solve_arena", "strategy_level", "synthesize", "verify_arena",
    "verify_strategy", "Arena", "FormationObservation", "FullObservation", "MaskObservation",
    "build_arena", "estimate_step", "EXHAUSTED", "REALIZABLE", "UNREALIZABLE",
    "bounded_synthesis", "default_bound", "enumerate_synthesis", "KnowledgeGame",
    "fragment_depth", "split_fragment", "MachineError", "StrategyMachine", "constant",
    "memoryless", "parse_machine",
]
