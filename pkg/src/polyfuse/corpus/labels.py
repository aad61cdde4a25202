"""Label resolution and subjectivity filtering.

Resolution policy ``majority_discard_ties``: a facet resolves only when a
strict majority of its annotators agree. Three-way polarity disagreement,
or a subjectivity tie, leaves the facet unresolved; unresolved utterances
are excluded from classifier training but retained in statistics.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import replace

from polyfuse import errors
from polyfuse.corpus.types import AnnotationRecord, CorpusManifest, ResolvedLabel

RESOLUTION_POLICIES = ("majority_discard_ties",)


def _strict_majority(values) -> object | None:
    counts = Counter(values)
    if not counts:
        return None
    (top, n), total = counts.most_common(1)[0], sum(counts.values())
    return top if n * 2 > total else None


def resolve_labels(
    manifest: CorpusManifest, policy: str = "majority_discard_ties"
) -> CorpusManifest:
    """Return a manifest with ``resolved_labels`` filled for every
    annotated utterance. Idempotent.

    Subjectivity resolves by strict majority over all annotators of the
    utterance. Polarity resolves by strict majority over the polarity
    votes of the annotators who marked it subjective (polarity is only
    meaningful on subjective judgments).
    """
    if policy not in RESOLUTION_POLICIES:
        raise ValueError(f"unknown resolution policy {policy!r}")

    resolved: dict[str, ResolvedLabel] = {}
    for utt in manifest.utterances:
        anns = manifest.annotations_by_utterance.get(utt.utterance_id, ())
        if not anns:
            continue
        resolved[utt.utterance_id] = _resolve_one(anns)
        label = resolved[utt.utterance_id]
        if label.subjectivity == "subjective" and not utt.transcript.strip():
            raise errors.EmptyTranscript(
                f"utterance {utt.utterance_id}: resolved subjective but transcript is empty"
            )
    return manifest.with_resolved_labels(resolved)


def _resolve_one(anns: tuple[AnnotationRecord, ...]) -> ResolvedLabel:
    subjectivity = _strict_majority(a.subjectivity for a in anns)
    if subjectivity != "subjective":
        return ResolvedLabel(subjectivity=subjectivity, polarity=None)
    polarity = _strict_majority(
        a.polarity for a in anns if a.subjectivity == "subjective"
    )
    return ResolvedLabel(subjectivity="subjective", polarity=polarity)


def require_resolution(manifest: CorpusManifest, utterance_id: str) -> ResolvedLabel:
    if utterance_id not in manifest.resolved_labels:
        raise errors.NoAnnotations(f"utterance {utterance_id}: no annotations to resolve")
    return manifest.resolved_labels[utterance_id]


def filter_subjective(manifest: CorpusManifest) -> CorpusManifest:
    """Keep only utterances resolved subjective; videos are retained.

    Annotations and resolved labels are filtered to the surviving
    utterances, preserving referential integrity. Idempotent.
    """
    keep = {
        uid
        for uid, label in manifest.resolved_labels.items()
        if label.subjectivity == "subjective"
    }
    utterances = tuple(u for u in manifest.utterances if u.utterance_id in keep)
    annotations = tuple(a for a in manifest.annotations if a.utterance_id in keep)
    resolved = {uid: lab for uid, lab in manifest.resolved_labels.items() if uid in keep}
    return replace(
        manifest, utterances=utterances, annotations=annotations, resolved_labels=resolved
    )


def trainable_labels(manifest: CorpusManifest) -> dict[str, int]:
    """Utterance ids with a binary (+1/-1) resolved polarity.

    Neutral-majority and unresolved utterances are excluded: the
    classifiers are trained on the positive/negative subset only.
    """
    return {
        uid: label.polarity
        for uid, label in manifest.resolved_labels.items()
        if label.trainable
    }
