"""Corpus-wide feature building into the cache, and loading back for
training. Building fans out over a worker pool; each utterance writes its
own cache entry, so workers share no mutable state.
"""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from polyfuse import cache
from polyfuse.audio.functionals import FUNCTIONAL_NAMES, apply_functionals
from polyfuse.audio.llds import (
    AUDIO_PIPELINE_VERSION,
    DEFAULT_FUNCTIONAL_DESCRIPTORS,
    extract_llds,
)
from polyfuse.audio.signal import frame_signal, read_wav
from polyfuse.corpus.types import CorpusManifest, Utterance
from polyfuse.errors import MissingModality
from polyfuse.text.embeddings import EmbeddingTable, embed_sequence
from polyfuse.text.model import TEXT_PIPELINE_VERSION
from polyfuse.visual.decode import decode_video, decoder_identity
from polyfuse.visual.sampling import VISUAL_PIPELINE_VERSION, FrameTensor, sample_frames

logger = logging.getLogger(__name__)


@dataclass
class BuildReport:
    built: list[str] = field(default_factory=list)
    skipped: list[str] = field(default_factory=list)
    failed: dict[str, str] = field(default_factory=dict)

    def merge(self, other: "BuildReport") -> None:
        self.built.extend(other.built)
        self.skipped.extend(other.skipped)
        self.failed.update(other.failed)


@dataclass(frozen=True)
class AudioFeatureParams:
    frame_len: float = 0.050
    hop: float = 0.025
    voiced_gate: bool = False
    voicing_threshold: float = 0.45
    functionals: tuple[str, ...] = FUNCTIONAL_NAMES
    descriptors: tuple[str, ...] = DEFAULT_FUNCTIONAL_DESCRIPTORS

    def digest(self) -> str:
        return cache.content_hash(repr(self))


@dataclass(frozen=True)
class VisualFeatureParams:
    frames: int = 16
    height: int = 64
    width: int = 64

    def digest(self) -> str:
        return cache.content_hash(repr(self))


def build_text_features(
    manifest: CorpusManifest,
    table: EmbeddingTable,
    table_digest: str,
    cache_dir: str | Path,
    max_tokens: int = 60,
) -> BuildReport:
    report = BuildReport()
    for utt in sorted(manifest.utterances, key=lambda u: u.utterance_id):
        content = cache.content_hash(utt.transcript, table_digest, str(max_tokens))
        if cache.entry_is_current(cache_dir, "text", utt.utterance_id,
                                  TEXT_PIPELINE_VERSION, content):
            report.skipped.append(utt.utterance_id)
            continue
        tensor = embed_sequence(utt.tokens, table, max_tokens=max_tokens)
        cache.write_entry(
            cache_dir, "text", utt.utterance_id,
            {"values": tensor.values, "mask": tensor.mask},
            TEXT_PIPELINE_VERSION, content,
        )
        report.built.append(utt.utterance_id)
    return report


def build_audio_features(
    manifest: CorpusManifest,
    media_root: str | Path,
    cache_dir: str | Path,
    params: AudioFeatureParams = AudioFeatureParams(),
    workers: int = 1,
) -> BuildReport:
    root = Path(media_root)
    report = BuildReport()
    jobs: list[tuple[Utterance, Path, str]] = []
    for video in sorted(manifest.videos, key=lambda v: v.video_id):
        wav_path = root / video.audio_path
        utts = sorted(
            (u for u in manifest.utterances if u.video_id == video.video_id),
            key=lambda u: u.utterance_id,
        )
        if not utts:
            continue
        try:
            media_digest = cache.file_hash(wav_path)
        except OSError as exc:
            for utt in utts:
                report.failed[utt.utterance_id] = f"{wav_path}: {exc}"
            continue
        for utt in utts:
            content = cache.content_hash(
                media_digest, f"{utt.start}:{utt.end}", params.digest()
            )
            if cache.entry_is_current(cache_dir, "audio", utt.utterance_id,
                                      AUDIO_PIPELINE_VERSION, content):
                report.skipped.append(utt.utterance_id)
            else:
                jobs.append((utt, wav_path, content))

    def build_one(job: tuple[Utterance, Path, str]) -> tuple[str, Optional[str]]:
        utt, wav_path, content = job
        try:
            signal = read_wav(wav_path).slice(utt.start, utt.end)
            llds = extract_llds(frame_signal(signal, params.frame_len, params.hop))
            vector = apply_functionals(
                llds,
                voiced_gate=params.voiced_gate,
                voicing_threshold=params.voicing_threshold,
                descriptors=params.descriptors,
                functionals=params.functionals,
            )
            cache.write_entry(
                cache_dir, "audio", utt.utterance_id,
                {"values": vector.values},
                AUDIO_PIPELINE_VERSION, content,
                extra_metadata={
                    "descriptor_names": list(params.descriptors),
                    "functionals": list(params.functionals),
                    "frame_hop": params.hop,
                    "voicing_threshold": params.voicing_threshold,
                    "layout_hash": vector.layout_hash(),
                },
            )
            return utt.utterance_id, None
        except Exception as exc:  # collected into the build report
            return utt.utterance_id, str(exc)

    with ThreadPoolExecutor(max_workers=max(workers, 1)) as pool:
        for uid, error in pool.map(build_one, jobs):
            if error is None:
                report.built.append(uid)
            else:
                logger.warning("audio features failed for %s: %s", uid, error)
                report.failed[uid] = error
    return report


def build_visual_features(
    manifest: CorpusManifest,
    media_root: str | Path,
    cache_dir: str | Path,
    params: VisualFeatureParams = VisualFeatureParams(),
    workers: int = 1,
) -> BuildReport:
    root = Path(media_root)
    report = BuildReport()
    by_video: dict[str, list[Utterance]] = {}
    for u in manifest.utterances:
        by_video.setdefault(u.video_id, []).append(u)

    def build_video(video_id: str) -> BuildReport:
        local = BuildReport()
        video = manifest.videos_by_id[video_id]
        path = root / video.video_path
        utts = sorted(by_video[video_id], key=lambda u: u.utterance_id)
        try:
            media_digest = cache.file_hash(path)
        except OSError as exc:
            for utt in utts:
                local.failed[utt.utterance_id] = f"{path}: {exc}"
            return local
        pending = []
        for utt in utts:
            content = cache.content_hash(
                media_digest, f"{utt.start}:{utt.end}", params.digest()
            )
            if cache.entry_is_current(cache_dir, "visual", utt.utterance_id,
                                      VISUAL_PIPELINE_VERSION, content):
                local.skipped.append(utt.utterance_id)
            else:
                pending.append((utt, content))
        if not pending:
            return local
        try:
            decoded = decode_video(path)  # decoder handles are per-worker
        except Exception as exc:
            for utt, _ in pending:
                local.failed[utt.utterance_id] = str(exc)
            return local
        name, version = decoder_identity(path)
        for utt, content in pending:
            try:
                tensor = sample_frames(
                    decoded, utt.start, utt.end,
                    t=params.frames, h=params.height, w=params.width,
                )
                cache.write_entry(
                    cache_dir, "visual", utt.utterance_id,
                    {"values": tensor.values},
                    VISUAL_PIPELINE_VERSION, content,
                    extra_metadata={"decoder": name, "decoder_version": version},
                )
                local.built.append(utt.utterance_id)
            except Exception as exc:
                logger.warning("visual features failed for %s: %s", utt.utterance_id, exc)
                local.failed[utt.utterance_id] = str(exc)
        return local

    with ThreadPoolExecutor(max_workers=max(workers, 1)) as pool:
        for local in pool.map(build_video, sorted(by_video)):
            report.merge(local)
    return report


@dataclass
class FeatureSet:
    """In-memory per-utterance features for protocol runs."""

    text: dict[str, object] = field(default_factory=dict)  # uid -> UtteranceTensorText
    audio: dict[str, np.ndarray] = field(default_factory=dict)  # raw functional vectors
    visual: dict[str, FrameTensor] = field(default_factory=dict)

    def require(self, modality: str, utterance_ids) -> None:
        store = getattr(self, modality)
        missing = [uid for uid in utterance_ids if uid not in store]
        if missing:
            raise MissingModality(
                f"no cached {modality} features for utterances {missing[:5]}"
                + ("..." if len(missing) > 5 else "")
            )


def load_feature_set(
    manifest: CorpusManifest,
    cache_dir: str | Path,
    modalities: tuple[str, ...],
    utterance_ids: Optional[list[str]] = None,
) -> FeatureSet:
    from polyfuse.text.embeddings import UtteranceTensorText

    uids = utterance_ids or [u.utterance_id for u in manifest.utterances]
    out = FeatureSet()
    for uid in sorted(uids):
        if "text" in modalities:
            arrays, _ = cache.read_entry(cache_dir, "text", uid)
            out.text[uid] = UtteranceTensorText(
                values=arrays["values"], mask=arrays["mask"]
            )
        if "audio" in modalities:
            arrays, _ = cache.read_entry(cache_dir, "audio", uid)
            out.audio[uid] = arrays["values"]
        if "visual" in modalities:
            arrays, _ = cache.read_entry(cache_dir, "visual", uid)
            out.visual[uid] = FrameTensor(values=arrays["values"])
    return out
