from .buchi import BuchiAutomaton, ltl_to_buchi
from .checking import (Lasso, belief_satisfies, find_accepting_lasso, graph_counterexample,
                       world_counterexample, world_satisfies)
from .formulas import (FALSE, TRUE, And, Const, Eventually, Formula, FormulaSyntaxError, Globally,
                       Iff, Implies, Know, Next, Not, Or, Prop, Release, Until, conj, disj,
                       format_formula, nnf, parse_bltl, parse_ltl, to_core)
from .semantics import evaluate_lasso

__all__ = [
    "BuchiAutomaton", "ltl_to_buchi", "Lasso", "belief_satisfies", "find_accepting_lasso",
    "graph_counterexample", "world_counterexample", "world_satisfies", "FALSE", "TRUE", "And",
    "Const", "Eventually", "Formula", "FormulaSyntaxError", "Globally", "Iff", "Implies", "Know",
    "Next", "Not", "Or", "Prop", "Release", "Until", "conj", "disj", "format_formula", "nnf",
    "parse_bltl", "parse_ltl", "to_core", "evaluate_lasso",
]
