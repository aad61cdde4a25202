"""Core corpus data model.

A corpus is a set of single-speaker videos, each divided into time-bounded
utterances. Annotators attach polarity / subjectivity / gesture judgments
to utterances; label resolution collapses those into one resolved label per
utterance. Manifests are immutable after load: every operation returns a
new object.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from functools import cached_property
from typing import Iterable, Optional

POLARITIES = (-1, 0, 1)
SUBJECTIVITY_VALUES = ("subjective", "objective")
SUBJECTIVITY_RULES = ("explicit_criticism", "third_person_opinion", "implicit_opinion")
GESTURES = ("smile", "frown", "head_nod", "head_shake")
SPLIT_NAMES = ("train", "validation", "test")

MANIFEST_FORMAT_VERSION = 1


@dataclass(frozen=True)
class VideoRecord:
    video_id: str
    speaker_id: str
    audio_path: str
    video_path: str
    duration: float
    speaker_meta: Optional[dict] = None


@dataclass(frozen=True)
class Utterance:
    utterance_id: str
    video_id: str
    start: float
    end: float
    transcript: str

    @cached_property
    def tokens(self) -> tuple[str, ...]:
        from polyfuse.text.tokenize import tokenize

        return tuple(tokenize(self.transcript))

    @property
    def duration(self) -> float:
        return self.end - self.start


@dataclass(frozen=True)
class AnnotationRecord:
    utterance_id: str
    annotator_id: str
    polarity: int
    subjectivity: str
    subjectivity_rule: Optional[str] = None
    gestures: frozenset[str] = frozenset()

    def validate(self) -> None:
        from polyfuse import errors

        if self.polarity not in POLARITIES:
            raise errors.ValidationError(
                f"annotation ({self.utterance_id}, {self.annotator_id}): "
                f"polarity {self.polarity!r} not in {POLARITIES}"
            )
        if self.subjectivity not in SUBJECTIVITY_VALUES:
            raise errors.ValidationError(
                f"annotation ({self.utterance_id}, {self.annotator_id}): "
                f"subjectivity {self.subjectivity!r} not in {SUBJECTIVITY_VALUES}"
            )
        if self.subjectivity_rule is not None and self.subjectivity_rule not in SUBJECTIVITY_RULES:
            raise errors.ValidationError(
                f"annotation ({self.utterance_id}, {self.annotator_id}): "
                f"subjectivity_rule {self.subjectivity_rule!r} not in {SUBJECTIVITY_RULES}"
            )
        bad = set(self.gestures) - set(GESTURES)
        if bad:
            raise errors.ValidationError(
                f"annotation ({self.utterance_id}, {self.annotator_id}): "
                f"unknown gestures {sorted(bad)}"
            )


@dataclass(frozen=True)
class ResolvedLabel:
    """Outcome of label resolution for one utterance.

    ``subjectivity`` or ``polarity`` is None when the annotators produced
    no strict majority on that facet; such utterances are excluded from
    classifier training but still counted by the statistics.
    """

    subjectivity: Optional[str]
    polarity: Optional[int]

    @property
    def trainable(self) -> bool:
        return self.subjectivity == "subjective" and self.polarity in (-1, 1)


@dataclass(frozen=True)
class CorpusManifest:
    videos: tuple[VideoRecord, ...]
    utterances: tuple[Utterance, ...]
    annotations: tuple[AnnotationRecord, ...]
    resolved_labels: dict[str, ResolvedLabel] = field(default_factory=dict)
    format_version: int = MANIFEST_FORMAT_VERSION

    @cached_property
    def videos_by_id(self) -> dict[str, VideoRecord]:
        return {v.video_id: v for v in self.videos}

    @cached_property
    def utterances_by_id(self) -> dict[str, Utterance]:
        return {u.utterance_id: u for u in self.utterances}

    @cached_property
    def annotations_by_utterance(self) -> dict[str, tuple[AnnotationRecord, ...]]:
        grouped: dict[str, list[AnnotationRecord]] = {}
        for a in self.annotations:
            grouped.setdefault(a.utterance_id, []).append(a)
        return {k: tuple(v) for k, v in grouped.items()}

    def speaker_of(self, utterance_id: str) -> str:
        utt = self.utterances_by_id[utterance_id]
        return self.videos_by_id[utt.video_id].speaker_id

    def with_resolved_labels(self, labels: dict[str, ResolvedLabel]) -> "CorpusManifest":
        return replace(self, resolved_labels=dict(labels))


@dataclass(frozen=True)
class SplitAssignment:
    split: dict[str, str]  # utterance_id -> train|validation|test
    seed: int
    ratios: tuple[float, float, float]

    def utterances_in(self, name: str) -> tuple[str, ...]:
        return tuple(uid for uid, s in sorted(self.split.items()) if s == name)

    def realized_fractions(self) -> dict[str, float]:
        total = len(self.split)
        if total == 0:
            return {name: 0.0 for name in SPLIT_NAMES}
        return {
            name: sum(1 for s in self.split.values() if s == name) / total
            for name in SPLIT_NAMES
        }

    def fingerprint(self) -> str:
        import hashlib

        h = hashlib.sha256()
        h.update(f"seed={self.seed};ratios={self.ratios}".encode())
        for uid, name in sorted(self.split.items()):
            h.update(f"{uid}:{name};".encode())
        return h.hexdigest()[:16]


def speakers_of(manifest: CorpusManifest, utterance_ids: Iterable[str]) -> set[str]:
    return {manifest.speaker_of(uid) for uid in utterance_ids}
