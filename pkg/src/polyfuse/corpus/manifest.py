"""Manifest ingestion, validation, and serialization.

On-disk format: UTF-8 JSON lines. The first line is a header carrying the
format version; every following line is one record tagged with its kind:

    {"kind": "header", "format_version": 1}
    {"kind": "video", "video_id": ..., "speaker_id": ..., ...}
    {"kind": "utterance", "utterance_id": ..., "video_id": ..., ...}
    {"kind": "annotation", "utterance_id": ..., "annotator_id": ..., ...}

Media paths are relative to the manifest's directory unless a media root
is given.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Optional

from polyfuse import errors
from polyfuse.corpus.types import (
    MANIFEST_FORMAT_VERSION,
    AnnotationRecord,
    CorpusManifest,
    Utterance,
    VideoRecord,
)


def load_manifest(
    path: str | Path,
    media_root: Optional[str | Path] = None,
    check_media: bool = True,
) -> CorpusManifest:
    """Load and fully validate a JSONL manifest.

    Raises SchemaVersionMismatch, InvalidRecord, DuplicateRecord,
    DanglingReference, OverlappingUtterances, or MissingMedia; the message
    always names the offending record.
    """
    path = Path(path)
    root = Path(media_root) if media_root is not None else path.parent

    videos: list[VideoRecord] = []
    utterances: list[Utterance] = []
    annotations: list[AnnotationRecord] = []

    with open(path, encoding="utf-8") as fh:
        lines = [ln for ln in (raw.strip() for raw in fh) if ln]
    if not lines:
        raise errors.InvalidRecord(f"{path}: empty manifest file")

    header = _parse_line(path, 1, lines[0])
    if header.get("kind") != "header":
        raise errors.SchemaVersionMismatch(f"{path}: first line must be the format header")
    version = header.get("format_version")
    if version != MANIFEST_FORMAT_VERSION:
        raise errors.SchemaVersionMismatch(
            f"{path}: format_version {version!r}, expected {MANIFEST_FORMAT_VERSION}"
        )

    for lineno, line in enumerate(lines[1:], start=2):
        rec = _parse_line(path, lineno, line)
        kind = rec.pop("kind", None)
        try:
            if kind == "video":
                videos.append(
                    VideoRecord(
                        video_id=str(rec["video_id"]),
                        speaker_id=str(rec["speaker_id"]),
                        audio_path=str(rec["audio_path"]),
                        video_path=str(rec["video_path"]),
                        duration=float(rec["duration"]),
                        speaker_meta=rec.get("speaker_meta"),
                    )
                )
            elif kind == "utterance":
                utterances.append(
                    Utterance(
                        utterance_id=str(rec["utterance_id"]),
                        video_id=str(rec["video_id"]),
                        start=float(rec["start"]),
                        end=float(rec["end"]),
                        transcript=str(rec.get("transcript", "")),
                    )
                )
            elif kind == "annotation":
                annotations.append(
                    AnnotationRecord(
                        utterance_id=str(rec["utterance_id"]),
                        annotator_id=str(rec["annotator_id"]),
                        polarity=int(rec["polarity"]),
                        subjectivity=str(rec["subjectivity"]),
                        subjectivity_rule=rec.get("subjectivity_rule"),
                        gestures=frozenset(rec.get("gestures", ())),
                    )
                )
            else:
                raise errors.InvalidRecord(f"{path}:{lineno}: unknown record kind {kind!r}")
        except (KeyError, TypeError, ValueError) as exc:
            raise errors.InvalidRecord(f"{path}:{lineno}: malformed {kind} record: {exc}") from exc

    manifest = CorpusManifest(
        videos=tuple(videos),
        utterances=tuple(utterances),
        annotations=tuple(annotations),
        format_version=MANIFEST_FORMAT_VERSION,
    )
    validate_manifest(manifest, media_root=root, check_media=check_media)
    return manifest


def _parse_line(path: Path, lineno: int, line: str) -> dict:
    try:
        rec = json.loads(line)
    except json.JSONDecodeError as exc:
        raise errors.InvalidRecord(f"{path}:{lineno}: not valid JSON: {exc}") from exc
    if not isinstance(rec, dict):
        raise errors.InvalidRecord(f"{path}:{lineno}: record must be a JSON object")
    return rec


def validate_manifest(
    manifest: CorpusManifest,
    media_root: Optional[str | Path] = None,
    check_media: bool = False,
) -> None:
    """Check all structural invariants; raise on the first violation found.

    Records are checked in id order so failures are deterministic
    regardless of file order.
    """
    seen_videos: set[str] = set()
    for v in sorted(manifest.videos, key=lambda v: v.video_id):
        if v.video_id in seen_videos:
            raise errors.DuplicateRecord(f"video {v.video_id}: duplicate id")
        seen_videos.add(v.video_id)
        if not v.speaker_id:
            raise errors.InvalidRecord(f"video {v.video_id}: empty speaker_id")
        if not v.duration > 0:
            raise errors.InvalidRecord(f"video {v.video_id}: duration must be > 0")

    videos_by_id = {v.video_id: v for v in manifest.videos}
    seen_utts: set[str] = set()
    for u in sorted(manifest.utterances, key=lambda u: u.utterance_id):
        if u.utterance_id in seen_utts:
            raise errors.DuplicateRecord(f"utterance {u.utterance_id}: duplicate id")
        seen_utts.add(u.utterance_id)
        parent = videos_by_id.get(u.video_id)
        if parent is None:
            raise errors.DanglingReference(
                f"utterance {u.utterance_id}: unknown video {u.video_id}"
            )
        if not (0 <= u.start < u.end):
            raise errors.InvalidRecord(
                f"utterance {u.utterance_id}: requires 0 <= start < end, "
                f"got [{u.start}, {u.end})"
            )
        if u.end > parent.duration + 1e-9:
            raise errors.InvalidRecord(
                f"utterance {u.utterance_id}: end {u.end} exceeds video duration "
                f"{parent.duration}"
            )

    by_video: dict[str, list[Utterance]] = {}
    for u in manifest.utterances:
        by_video.setdefault(u.video_id, []).append(u)
    for vid, utts in sorted(by_video.items()):
        utts = sorted(utts, key=lambda u: (u.start, u.utterance_id))
        for a, b in zip(utts, utts[1:]):
            if b.start < a.end - 1e-9:
                raise errors.OverlappingUtterances(
                    f"video {vid}: utterances {a.utterance_id} and {b.utterance_id} overlap"
                )

    seen_pairs: set[tuple[str, str]] = set()
    for ann in sorted(manifest.annotations, key=lambda a: (a.utterance_id, a.annotator_id)):
        if ann.utterance_id not in seen_utts:
            raise errors.DanglingReference(
                f"annotation ({ann.utterance_id}, {ann.annotator_id}): unknown utterance"
            )
        key = (ann.utterance_id, ann.annotator_id)
        if key in seen_pairs:
            raise errors.DuplicateRecord(
                f"annotation ({ann.utterance_id}, {ann.annotator_id}): duplicate record"
            )
        seen_pairs.add(key)
        ann.validate()

    for uid in sorted(manifest.resolved_labels):
        if uid not in seen_utts:
            raise errors.DanglingReference(f"resolved label for unknown utterance {uid}")

    if check_media:
        root = Path(media_root) if media_root is not None else Path(".")
        for v in sorted(manifest.videos, key=lambda v: v.video_id):
            for p in (v.audio_path, v.video_path):
                if not (root / p).exists():
                    raise errors.MissingMedia(f"video {v.video_id}: missing media file {p}")


def dump_manifest(manifest: CorpusManifest) -> str:
    """Serialize to the JSONL format, byte-deterministically.

    Records are emitted sorted by id so two manifests with equal content
    serialize identically regardless of construction order.
    """
    out = [json.dumps({"kind": "header", "format_version": manifest.format_version},
                      sort_keys=True, ensure_ascii=False)]
    for v in sorted(manifest.videos, key=lambda v: v.video_id):
        rec = {
            "kind": "video",
            "video_id": v.video_id,
            "speaker_id": v.speaker_id,
            "audio_path": v.audio_path,
            "video_path": v.video_path,
            "duration": v.duration,
        }
        if v.speaker_meta is not None:
            rec["speaker_meta"] = v.speaker_meta
        out.append(json.dumps(rec, sort_keys=True, ensure_ascii=False))
    for u in sorted(manifest.utterances, key=lambda u: u.utterance_id):
        out.append(json.dumps({
            "kind": "utterance",
            "utterance_id": u.utterance_id,
            "video_id": u.video_id,
            "start": u.start,
            "end": u.end,
            "transcript": u.transcript,
        }, sort_keys=True, ensure_ascii=False))
    for a in sorted(manifest.annotations, key=lambda a: (a.utterance_id, a.annotator_id)):
        out.append(json.dumps({
            "kind": "annotation",
            "utterance_id": a.utterance_id,
            "annotator_id": a.annotator_id,
            "polarity": a.polarity,
            "subjectivity": a.subjectivity,
            "subjectivity_rule": a.subjectivity_rule,
            "gestures": sorted(a.gestures),
        }, sort_keys=True, ensure_ascii=False))
    return "\n".join(out) + "\n"


def save_manifest(manifest: CorpusManifest, path: str | Path) -> None:
    Path(path).write_text(dump_manifest(manifest), encoding="utf-8")
