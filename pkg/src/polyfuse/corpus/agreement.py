"""Inter-annotator agreement as pairwise percent agreement.

For every utterance carrying two or more annotations, count the fraction
of annotator pairs that agree on the requested facet, then average those
fractions over utterances and scale to [0, 100]. For the gesture facet a
pair agrees iff the two gesture sets are equal. Chance-corrected
coefficients are deliberately out of scope.
"""

from __future__ import annotations

from itertools import combinations
from typing import Iterable

from polyfuse import errors
from polyfuse.corpus.types import AnnotationRecord

AGREEMENT_FACETS = ("polarity", "subjectivity", "gestures")


def compute_agreement(annotations: Iterable[AnnotationRecord], facet: str) -> float:
    """Mean over co-annotated utterances of agreeing-pair fraction, in [0, 100].

    For the polarity facet only subjective judgments enter the comparison;
    an utterance contributes once it has two such judgments.

    Raises InsufficientOverlap when no utterance has >= 2 comparable
    annotations.
    """
    if facet not in AGREEMENT_FACETS:
        raise ValueError(f"unknown agreement facet {facet!r}")

    grouped: dict[str, list[AnnotationRecord]] = {}
    for ann in annotations:
        grouped.setdefault(ann.utterance_id, []).append(ann)

    per_utterance: list[float] = []
    for uid in sorted(grouped):
        anns = grouped[uid]
        if facet == "polarity":
            anns = [a for a in anns if a.subjectivity == "subjective"]
        if len(anns) < 2:
            continue
        values = [_facet_value(a, facet) for a in anns]
        pairs = list(combinations(values, 2))
        agreeing = sum(1 for x, y in pairs if x == y)
        per_utterance.append(agreeing / len(pairs))

    if not per_utterance:
        raise errors.InsufficientOverlap(
            f"no utterance has two or more annotations comparable on {facet!r}"
        )
    return 100.0 * sum(per_utterance) / len(per_utterance)


def _facet_value(ann: AnnotationRecord, facet: str):
    if facet == "polarity":
        return ann.polarity
    if facet == "subjectivity":
        return ann.subjectivity
    return frozenset(ann.gestures)


def format_agreement(percentage: float) -> str:
    """Render an agreement percentage the way reports quote it, e.g. '89.23%'."""
    from polyfuse.evaluation.metrics import round_half_up

    return f"{round_half_up(percentage, 2):.2f}%"
