"""Corpus data model, ingestion, labels, agreement, statistics, and splits."""

from polyfuse.corpus.agreement import compute_agreement, format_agreement
from polyfuse.corpus.labels import filter_subjective, resolve_labels, trainable_labels
from polyfuse.corpus.manifest import (
    dump_manifest,
    load_manifest,
    save_manifest,
    validate_manifest,
)
from polyfuse.corpus.splits import check_speaker_exclusive, make_splits
from polyfuse.corpus.stats import StatisticsReport, compute_statistics, render_statistics
from polyfuse.corpus.types import (
    GESTURES,
    POLARITIES,
    SPLIT_NAMES,
    SUBJECTIVITY_RULES,
    SUBJECTIVITY_VALUES,
    AnnotationRecord,
    CorpusManifest,
    ResolvedLabel,
    SplitAssignment,
    Utterance,
    VideoRecord,
)

__all__ = [
    "AnnotationRecord",
    "CorpusManifest",
    "GESTURES",
    "POLARITIES",
    "ResolvedLabel",
    "SPLIT_NAMES",
    "SUBJECTIVITY_RULES",
    "SUBJECTIVITY_VALUES",
    "SplitAssignment",
    "StatisticsReport",
    "Utterance",
    "VideoRecord",
    "check_speaker_exclusive",
    "compute_agreement",
    "compute_statistics",
    "dump_manifest",
    "filter_subjective",
    "format_agreement",
    "load_manifest",
    "make_splits",
    "render_statistics",
    "resolve_labels",
    "save_manifest",
    "trainable_labels",
    "validate_manifest",
]
