"""Annotation persistence: an append-only JSONL log compacted to
last-write-wins state on load and on every read.

Appending one line per submission keeps the full audit history and makes
crashes harmless; the in-memory map holds exactly one record per
(annotator, utterance) at all times, updated atomically under a lock.
"""

from __future__ import annotations

import json
import threading
from pathlib import Path
from typing import Optional

from polyfuse.corpus.types import AnnotationRecord


def _to_line(record: AnnotationRecord) -> str:
    return json.dumps(
        {
            "utterance_id": record.utterance_id,
            "annotator_id": record.annotator_id,
            "polarity": record.polarity,
            "subjectivity": record.subjectivity,
            "subjectivity_rule": record.subjectivity_rule,
            "gestures": sorted(record.gestures),
        },
        sort_keys=True,
        ensure_ascii=False,
    )


def _from_line(line: str) -> AnnotationRecord:
    data = json.loads(line)
    return AnnotationRecord(
        utterance_id=data["utterance_id"],
        annotator_id=data["annotator_id"],
        polarity=int(data["polarity"]),
        subjectivity=data["subjectivity"],
        subjectivity_rule=data.get("subjectivity_rule"),
        gestures=frozenset(data.get("gestures", ())),
    )


class AnnotationStore:
    def __init__(self, path: str | Path):
        self.path = Path(path)
        self._lock = threading.Lock()
        self._state: dict[tuple[str, str], AnnotationRecord] = {}
        if self.path.exists():
            for line in self.path.read_text(encoding="utf-8").splitlines():
                if line.strip():
                    record = _from_line(line)
                    self._state[(record.annotator_id, record.utterance_id)] = record
        else:
            self.path.parent.mkdir(parents=True, exist_ok=True)

    def submit(self, record: AnnotationRecord) -> None:
        """Persist and apply one judgment; resubmission overwrites."""
        with self._lock:
            with open(self.path, "a", encoding="utf-8") as fh:
                fh.write(_to_line(record) + "\n")
            self._state[(record.annotator_id, record.utterance_id)] = record

    def records(self) -> tuple[AnnotationRecord, ...]:
        """Consistent snapshot, sorted by (utterance, annotator)."""
        with self._lock:
            return tuple(
                self._state[key]
                for key in sorted(self._state, key=lambda k: (k[1], k[0]))
            )

    def get(self, annotator_id: str, utterance_id: str) -> Optional[AnnotationRecord]:
        with self._lock:
            return self._state.get((annotator_id, utterance_id))

    def done_utterances(self, annotator_id: str) -> set[str]:
        with self._lock:
            return {uid for (ann, uid) in self._state if ann == annotator_id}
