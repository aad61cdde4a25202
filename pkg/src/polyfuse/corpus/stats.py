"""Corpus statistics and their plain-text / JSON rendering."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass

from polyfuse.corpus.types import CorpusManifest


@dataclass(frozen=True)
class StatisticsReport:
    positive: int
    negative: int
    neutral: int
    subjective: int
    objective: int
    unresolved: int
    unique_words: int
    speakers: int
    videos: int
    utterances: int
    annotations: int

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True, indent=2) + "\n"


def compute_statistics(manifest: CorpusManifest) -> StatisticsReport:
    """Count labels, unique words, and speakers. Empty manifests yield zeros.

    Counts depend only on record content, never on record order.
    """
    positive = negative = neutral = subjective = objective = unresolved = 0
    for label in manifest.resolved_labels.values():
        if label.subjectivity == "subjective":
            subjective += 1
        elif label.subjectivity == "objective":
            objective += 1
        else:
            unresolved += 1
        if label.polarity == 1:
            positive += 1
        elif label.polarity == -1:
            negative += 1
        elif label.subjectivity == "subjective" and label.polarity == 0:
            neutral += 1

    words: set[str] = set()
    for utt in manifest.utterances:
        words.update(utt.tokens)

    return StatisticsReport(
        positive=positive,
        negative=negative,
        neutral=neutral,
        subjective=subjective,
        objective=objective,
        unresolved=unresolved,
        unique_words=len(words),
        speakers=len({v.speaker_id for v in manifest.videos}),
        videos=len(manifest.videos),
        utterances=len(manifest.utterances),
        annotations=len(manifest.annotations),
    )


_TABLE_ROWS = (
    ("Total number of positive segmented", "positive"),
    ("Total number of negative segmented", "negative"),
    ("Total number of subjective", "subjective"),
    ("Total number of objective", "objective"),
    ("Total number of unique words in the dataset", "unique_words"),
    ("Total number of speakers", "speakers"),
)


def render_statistics(report: StatisticsReport) -> str:
    """Fixed-width two-column table over the headline corpus counts."""
    values = asdict(report)
    width = max(len(label) for label, _ in _TABLE_ROWS)
    lines = [f"{label:<{width}} | {values[key]}" for label, key in _TABLE_ROWS]
    return "\n".join(lines) + "\n"
