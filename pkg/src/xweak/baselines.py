"""Reference baselines: majority class and keyword voting."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Iterable

from .class_repr import ClassRepresentation
from .corpus import Corpus, Taxonomy
from .errors import ValidationError


def majority_class(
    labels: Iterable[str], taxonomy: Taxonomy, prior: str | None = None
) -> str:
    """Most frequent label, with ties broken by taxonomy order.

    An empty label stream returns ``prior`` when one is configured and is an
    error otherwise.
    """
    counts = Counter()
    for label in labels:
        if label not in taxonomy.classes:
            raise ValidationError(f"label {label!r} is not a known class")
        counts[label] += 1
    if not counts:
        if prior is not None:
            taxonomy.index_of(prior)
            return prior
        raise ValidationError("cannot take the majority of zero labels and no prior is set")
    best = max(counts.values())
    for name in taxonomy.classes:
        if counts.get(name) == best:
            return name
    raise AssertionError("unreachable")


@dataclass(frozen=True)
class VotingRule:
    """Per-class keyword weight tables for the voting baselines."""

    classes: tuple[str, ...]
    keyword_weights: tuple[dict[str, float], ...]

    def __post_init__(self) -> None:
        if len(self.classes) != len(self.keyword_weights):
            raise ValidationError("voting rule classes and weight tables are misaligned")


def name_voting_rule(taxonomy: Taxonomy) -> VotingRule:
    """One vote per occurrence of a class's seed words (the class name by default)."""
    return VotingRule(
        classes=taxonomy.classes,
        keyword_weights=tuple({s: 1.0 for s in seeds} for seeds in taxonomy.seeds),
    )


def expanded_voting_rule(reps: list[ClassRepresentation]) -> VotingRule:
    """Votes weighted by each keyword's rank weight in its class representation."""
    if not reps:
        raise ValidationError("no class representations given")
    return VotingRule(
        classes=tuple(r.class_name for r in reps),
        keyword_weights=tuple(
            {w: float(wt) for w, wt in zip(r.keywords, r.weights)} for r in reps
        ),
    )


def keyword_vote(tokens: Iterable[str], rule: VotingRule, fallback: str) -> str:
    """Score each class by summed keyword weights; strict maximum wins.

    A tie for the top score, or a document touching no keywords at all,
    falls back to ``fallback`` (typically the majority class).
    """
    if fallback not in rule.classes:
        raise ValidationError(f"fallback {fallback!r} is not a known class")
    scores = [0.0] * len(rule.classes)
    for token in tokens:
        for c, table in enumerate(rule.keyword_weights):
            w = table.get(token)
            if w is not None:
                scores[c] += w
    best = max(scores)
    if best == 0.0:
        return fallback
    winners = [c for c, s in enumerate(scores) if s == best]
    if len(winners) > 1:
        return fallback
    return rule.classes[winners[0]]


def vote_predict(corpus: Corpus, rule: VotingRule, fallback: str) -> list[tuple[str, str]]:
    return [(d.doc_id, keyword_vote(d.tokens, rule, fallback)) for d in corpus]
