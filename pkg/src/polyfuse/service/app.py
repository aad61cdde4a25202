"""HTTP + JSON annotation backend.

Endpoints:
  GET  /api/tasks/next?annotator=ID      next pending task or null
  GET  /api/media/{utterance_id}.wav     trimmed utterance audio (Range ok)
  GET  /api/media/{utterance_id}.mp4     parent video stream (Range ok)
  POST /api/annotations                  submit one AnnotationRecord
  GET  /api/agreement                    live per-facet agreement + progress
  GET  /api/export                       merged JSONL manifest

Payload field names match the corpus types exactly. The browser UI, when
built, is served statically under /ui.
"""

from __future__ import annotations

import io
from pathlib import Path
from typing import Optional

import scipy.io.wavfile
import numpy as np
from fastapi import Body, FastAPI, Request, Response
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles

from polyfuse import errors
from polyfuse.corpus.agreement import AGREEMENT_FACETS, compute_agreement
from polyfuse.corpus.manifest import dump_manifest, load_manifest
from polyfuse.corpus.types import AnnotationRecord, CorpusManifest
from polyfuse.evaluation.metrics import round_half_up
from polyfuse.service.store import AnnotationStore

DEFAULT_ANNOTATORS = ("a1", "a2", "a3")


def create_app(
    manifest_path: str | Path,
    media_root: str | Path,
    store_path: str | Path,
    annotators: tuple[str, ...] = DEFAULT_ANNOTATORS,
    manifest: Optional[CorpusManifest] = None,
    ui_dir: Optional[str | Path] = None,
) -> FastAPI:
    manifest = manifest or load_manifest(manifest_path, media_root=media_root)
    media_root = Path(media_root)
    store = AnnotationStore(store_path)
    app = FastAPI(title="polyfuse annotation service")

    utterance_order = sorted(u.utterance_id for u in manifest.utterances)

    def error_response(status: int, exc: Exception) -> JSONResponse:
        return JSONResponse(
            status_code=status,
            content={"error": type(exc).__name__, "detail": str(exc)},
        )

    def task_payload(utterance_id: str, annotator_id: str, done: bool) -> dict:
        utt = manifest.utterances_by_id[utterance_id]
        video = manifest.videos_by_id[utt.video_id]
        media = {"wav": f"/api/media/{utterance_id}.wav"}
        media["mp4"] = (
            f"/api/media/{utterance_id}.mp4"
            if video.video_path.endswith(".mp4")
            else None
        )
        return {
            "utterance_id": utterance_id,
            "transcript": utt.transcript,
            "start": utt.start,
            "end": utt.end,
            "media": media,
            "assigned_annotator": annotator_id,
            "status": "done" if done else "pending",
        }

    @app.get("/api/tasks/next")
    def next_task(annotator: str):
        if annotator not in annotators:
            return error_response(404, errors.UnknownAnnotator(
                f"annotator {annotator!r} is not registered ({', '.join(annotators)})"
            ))
        done = store.done_utterances(annotator)
        for uid in utterance_order:
            if uid not in done:
                return {"task": task_payload(uid, annotator, done=False)}
        return {"task": None}

    @app.post("/api/annotations")
    def submit(payload: dict = Body(...)):
        try:
            record = AnnotationRecord(
                utterance_id=str(payload["utterance_id"]),
                annotator_id=str(payload["annotator_id"]),
                polarity=_strict_int(payload.get("polarity")),
                subjectivity=payload.get("subjectivity"),
                subjectivity_rule=payload.get("subjectivity_rule"),
                gestures=frozenset(payload.get("gestures", ())),
            )
        except (KeyError, TypeError, ValueError) as exc:
            return error_response(422, errors.ValidationError(f"malformed payload: {exc}"))
        if record.annotator_id not in annotators:
            return error_response(404, errors.UnknownAnnotator(record.annotator_id))
        if record.utterance_id not in manifest.utterances_by_id:
            return error_response(404, errors.UnknownUtterance(record.utterance_id))
        try:
            record.validate()
        except errors.ValidationError as exc:
            return error_response(422, exc)
        store.submit(record)
        return {"status": "ok", "utterance_id": record.utterance_id,
                "annotator_id": record.annotator_id}

    @app.get("/api/agreement")
    def agreement():
        records = store.records()
        facets: dict[str, Optional[float]] = {}
        computable = False
        for facet in AGREEMENT_FACETS:
            try:
                facets[facet] = round_half_up(compute_agreement(records, facet), 2)
                computable = True
            except errors.InsufficientOverlap:
                facets[facet] = None
        total = len(utterance_order)
        progress = {
            annotator: {"done": len(store.done_utterances(annotator)), "total": total}
            for annotator in annotators
        }
        return {**facets, "computable": computable, "progress": progress}

    @app.get("/api/export")
    def export():
        merged: dict[tuple[str, str], AnnotationRecord] = {
            (a.utterance_id, a.annotator_id): a for a in manifest.annotations
        }
        for record in store.records():
            merged[(record.utterance_id, record.annotator_id)] = record
        combined = CorpusManifest(
            videos=manifest.videos,
            utterances=manifest.utterances,
            annotations=tuple(merged[k] for k in sorted(merged)),
        )
        return Response(
            content=dump_manifest(combined),
            media_type="application/jsonl; charset=utf-8",
        )

    @app.get("/api/media/{name}")
    def media(name: str, request: Request):
        utterance_id, _, ext = name.rpartition(".")
        utt = manifest.utterances_by_id.get(utterance_id)
        if utt is None:
            return error_response(404, errors.UnknownUtterance(utterance_id))
        video = manifest.videos_by_id[utt.video_id]
        if ext == "wav":
            from polyfuse.audio.signal import read_wav

            signal = read_wav(media_root / video.audio_path).slice(utt.start, utt.end)
            buffer = io.BytesIO()
            pcm = np.clip(signal.samples, -1.0, 1.0)
            scipy.io.wavfile.write(
                buffer, signal.sample_rate, (pcm * 32767).astype(np.int16)
            )
            return _ranged(buffer.getvalue(), "audio/wav", request)
        if ext == "mp4":
            path = media_root / video.video_path
            if not path.suffix == ".mp4" or not path.exists():
                return error_response(404, errors.DecodeFailure(
                    f"no mp4 stream for utterance {utterance_id}"
                ))
            return _ranged(path.read_bytes(), "video/mp4", request)
        return error_response(404, errors.DecodeFailure(f"unknown media type .{ext}"))

    if ui_dir and Path(ui_dir).is_dir():
        app.mount("/ui", StaticFiles(directory=str(ui_dir), html=True), name="ui")

    return app


def _strict_int(value) -> int:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ValueError(f"polarity must be an integer, got {value!r}")
    if isinstance(value, float) and not value.is_integer():
        raise ValueError(f"polarity must be an integer, got {value!r}")
    return int(value)


def _ranged(data: bytes, media_type: str, request: Request) -> Response:
    """Serve bytes honouring a single-range Range header (for scrubbing)."""
    range_header = request.headers.get("range")
    total = len(data)
    headers = {"Accept-Ranges": "bytes"}
    if not range_header or not range_header.startswith("bytes="):
        return Response(content=data, media_type=media_type, headers=headers)
    spec = range_header[len("bytes="):].split(",")[0].strip()
    start_text, _, end_text = spec.partition("-")
    try:
        if start_text:
            start = int(start_text)
            end = int(end_text) if end_text else total - 1
        else:  # suffix range: last N bytes
            start = max(total - int(end_text), 0)
            end = total - 1
    except ValueError:
        return Response(content=data, media_type=media_type, headers=headers)
    if start >= total or end < start:
        return Response(
            status_code=416, headers={**headers, "Content-Range": f"bytes */{total}"}
        )
    end = min(end, total - 1)
    headers["Content-Range"] = f"bytes {start}-{end}/{total}"
    return Response(
        content=data[start : end + 1],
        status_code=206,
        media_type=media_type,
        headers=headers,
    )
