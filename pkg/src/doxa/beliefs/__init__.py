from .formation import (NoRuleMatches, OutputAutomaton, RegularBeliefFormation, automaton_rules,
                        minimize, parse_formation)
from .knowledge import (ConsistencyReport, KnowledgeLabeling, check_knowledge_consistency,
                        parse_knowledge)
from .reality import (Belief, BeliefCatalog, Reality, format_catalog, parse_catalog,
                      validate_catalog, validate_reality)
from .regex import RegexError, letter_token, token_letter

__all__ = [
    "NoRuleMatches", "OutputAutomaton", "RegularBeliefFormation", "automaton_rules", "minimize",
    "parse_formation", "ConsistencyReport", "KnowledgeLabeling", "check_knowledge_consistency",
    "parse_knowledge", "Belief", "BeliefCatalog", "Reality", "format_catalog", "parse_catalog",
    "validate_catalog", "validate_reality", "RegexError", "letter_token", "token_letter",
]
