"""Discriminative ranking of mined patterns.

The feature value of a pattern in a sequence is its number of embeddings
(or 1/0 in binary mode); the Fisher score is the ratio of between-class to
within-class scatter of that feature, with population standard deviations.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .logic import Pattern, RelationalSequence, count_embeddings, occurs_in
from .miner import FrequentPattern, canonical_form
from .vocab import ACTION_PREDICATES

FEATURE_EMBEDDINGS = "embeddings"
FEATURE_BINARY = "binary"


@dataclass
class ClassStats:
    counts: dict[str, int]        # sequences per class
    means: dict[str, float]       # mean feature value per class
    stds: dict[str, float]        # population standard deviation per class
    grand_mean: float


@dataclass
class RankedPattern:
    pattern: Pattern
    fisher: float
    attributed_class: str
    stats: ClassStats
    support_total: int
    support_per_class: dict[str, int]


def _feature_values(
    pattern: Pattern, seqs: list[RelationalSequence], feature: str
) -> np.ndarray:
    if feature == FEATURE_EMBEDDINGS:
        return np.array([count_embeddings(pattern, s) for s in seqs], dtype=float)
    if feature == FEATURE_BINARY:
        return np.array([1.0 if occurs_in(pattern, s) else 0.0 for s in seqs])
    raise ValueError(f"unknown feature mode {feature!r}")


def class_stats(
    pattern: Pattern,
    corpus: list[RelationalSequence],
    feature: str = FEATURE_EMBEDDINGS,
) -> ClassStats:
    by_class: dict[str, list[RelationalSequence]] = {}
    for s in corpus:
        by_class.setdefault(s.class_label, []).append(s)
    counts: dict[str, int] = {}
    means: dict[str, float] = {}
    stds: dict[str, float] = {}
    total = 0.0
    n_total = 0
    for label in sorted(by_class):
        values = _feature_values(pattern, by_class[label], feature)
        counts[label] = len(values)
        means[label] = float(values.mean())
        stds[label] = float(values.std())  # population form
        total += float(values.sum())
        n_total += len(values)
    return ClassStats(counts, means, stds, total / n_total)


def fisher_score(stats: ClassStats) -> float:
    """sum_i n_i (mu_i - mu)^2 over sum_i n_i sigma_i^2.

    A zero denominator with a positive numerator returns +inf (a perfectly
    separating feature); zero over zero is 0.
    """
    numerator = sum(
        stats.counts[c] * (stats.means[c] - stats.grand_mean) ** 2 for c in stats.counts
    )
    denominator = sum(stats.counts[c] * stats.stds[c] ** 2 for c in stats.counts)
    if denominator == 0.0:
        return math.inf if numerator > 0.0 else 0.0
    return numerator / denominator


def attribute_class(stats: ClassStats) -> str:
    """Class with the larger mean feature value; ties go to the smaller label."""
    best = None
    for label in sorted(stats.means):
        if best is None or stats.means[label] > stats.means[best]:
            best = label
    return best


def rank(
    patterns: list[FrequentPattern],
    corpus: list[RelationalSequence],
    top_k: int,
    feature: str = FEATURE_EMBEDDINGS,
) -> list[RankedPattern]:
    """Patterns by descending Fisher score (inf first), ties by total support
    then canonical key, truncated to top_k."""
    ranked: list[RankedPattern] = []
    for fp in patterns:
        stats = class_stats(fp.pattern, corpus, feature)
        ranked.append(
            RankedPattern(
                pattern=fp.pattern,
                fisher=fisher_score(stats),
                attributed_class=attribute_class(stats),
                stats=stats,
                support_total=fp.support_total,
                support_per_class=dict(fp.support_per_class),
            )
        )
    ranked.sort(
        key=lambda r: (
            0 if math.isinf(r.fisher) else 1,
            -r.fisher if not math.isinf(r.fisher) else 0.0,
            -r.support_total,
            canonical_form(r.pattern),
        )
    )
    return ranked[: max(top_k, 0)]


def action_distribution(
    corpus: list[RelationalSequence],
) -> dict[str, dict[str, int]]:
    """Counts of each action predicate per class, plus sequence and action
    totals, in the layout of the per-configuration concept tables."""
    table: dict[str, dict[str, int]] = {}
    for s in corpus:
        row = table.setdefault(
            s.class_label,
            {"n_sequences": 0, **{p: 0 for p in ACTION_PREDICATES}, "total_actions": 0},
        )
        row["n_sequences"] += 1
        for a in s.atoms:
            if a.predicate in ACTION_PREDICATES:
                row[a.predicate] += 1
                row["total_actions"] += 1
    return dict(sorted(table.items()))


def action_distribution_pct(corpus: list[RelationalSequence]) -> dict[str, dict[str, float]]:
    """Per-class percentage of each action among that class's actions."""
    counts = action_distribution(corpus)
    pct: dict[str, dict[str, float]] = {}
    for label, row in counts.items():
        total = row["total_actions"]
        pct[label] = {
            p: (100.0 * row[p] / total if total else 0.0) for p in ACTION_PREDICATES
        }
    return pct
