"""Relational sequence mining for two-robot soccer team behaviour analysis."""

from .logic import (
    Atom,
    Pattern,
    RelationalSequence,
    Substitution,
    Term,
    apply_substitution,
    count_embeddings,
    occurs_in,
    parse_atom,
    parse_pattern,
    support,
    theta_subsumes,
)
from .miner import BackgroundKnowledge, FrequentPattern, MiningConfig, mine
from .scoring import class_stats, fisher_score, rank

__version__ = "0.1.0"

__all__ = [
    "Atom",
    "BackgroundKnowledge",
    "FrequentPattern",
    "MiningConfig",
    "Pattern",
    "RelationalSequence",
    "Substitution",
    "Term",
    "apply_substitution",
    "class_stats",
    "count_embeddings",
    "fisher_score",
    "mine",
    "occurs_in",
    "parse_atom",
    "parse_pattern",
    "rank",
    "support",
    "theta_subsumes",
]
