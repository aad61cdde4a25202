"""Shared fixtures: in-memory manifest builders, tone signals, and
session-scoped synthetic corpora with prebuilt feature caches."""

from __future__ import annotations

import numpy as np
import pytest

from polyfuse.corpus.types import (
    AnnotationRecord,
    CorpusManifest,
    Utterance,
    VideoRecord,
)


def build_manifest(
    n_videos: int = 2,
    utts_per_video: int = 3,
    annotators: tuple[str, ...] = ("a1", "a2", "a3"),
    polarity_for=lambda i: 1 if i % 2 == 0 else -1,
    subjectivity_for=lambda i: "subjective",
    transcript_for=lambda i: f"token{i} filler",
    speakers_per_video: int = 1,
) -> CorpusManifest:
    """Small fully-annotated manifest; media paths are not validated here."""
    videos, utterances, annotations = [], [], []
    utt_i = 0
    for v in range(n_videos):
        video_id = f"vid{v:02d}"
        videos.append(
            VideoRecord(
                video_id=video_id,
                speaker_id=f"spk{v // max(speakers_per_video, 1):02d}",
                audio_path=f"media/{video_id}.wav",
                video_path=f"media/{video_id}.mp4",
                duration=float(utts_per_video),
            )
        )
        for k in range(utts_per_video):
            uid = f"utt{utt_i:04d}"
            utterances.append(
                Utterance(
                    utterance_id=uid,
                    video_id=video_id,
                    start=float(k),
                    end=float(k + 1),
                    transcript=transcript_for(utt_i),
                )
            )
            for ann in annotators:
                annotations.append(
                    AnnotationRecord(
                        utterance_id=uid,
                        annotator_id=ann,
                        polarity=polarity_for(utt_i),
                        subjectivity=subjectivity_for(utt_i),
                    )
                )
            utt_i += 1
    return CorpusManifest(
        videos=tuple(videos),
        utterances=tuple(utterances),
        annotations=tuple(annotations),
    )


def tone(hz: float, duration: float = 1.0, sr: int = 16000, amplitude: float = 0.5):
    t = np.arange(int(duration * sr)) / sr
    return amplitude * np.sin(2 * np.pi * hz * t)


@pytest.fixture(scope="session")
def separable_corpus(tmp_path_factory):
    """200-utterance, 10-speaker separable corpus with feature caches built."""
    from polyfuse import cache as cache_mod
    from polyfuse.corpus import load_manifest, resolve_labels
    from polyfuse.features import (
        AudioFeatureParams,
        VisualFeatureParams,
        build_audio_features,
        build_text_features,
        build_visual_features,
    )
    from polyfuse.synth import SynthSpec, generate_corpus
    from polyfuse.text.embeddings import load_embeddings

    root = tmp_path_factory.mktemp("separable")
    result = generate_corpus(root, SynthSpec(scenario="separable", seed=7))
    manifest = resolve_labels(load_manifest(result.manifest_path, media_root=root))
    cache_dir = root / "cache"
    table = load_embeddings(result.embeddings_path)
    r1 = build_text_features(
        manifest, table, cache_mod.file_hash(result.embeddings_path), cache_dir
    )
    r2 = build_audio_features(manifest, root, cache_dir, AudioFeatureParams(), workers=2)
    r3 = build_visual_features(
        manifest, root, cache_dir, VisualFeatureParams(frames=16, height=32, width=32),
        workers=2,
    )
    assert not r1.failed and not r2.failed and not r3.failed
    return {"root": root, "manifest": manifest, "cache_dir": cache_dir, "synth": result}


@pytest.fixture(scope="session")
def xor_corpus(tmp_path_factory):
    """300-utterance XOR corpus (audio bit x text bit) with caches."""
    from polyfuse import cache as cache_mod
    from polyfuse.corpus import load_manifest, resolve_labels
    from polyfuse.features import (
        AudioFeatureParams,
        VisualFeatureParams,
        build_audio_features,
        build_text_features,
        build_visual_features,
    )
    from polyfuse.synth import SynthSpec, generate_corpus
    from polyfuse.text.embeddings import load_embeddings

    root = tmp_path_factory.mktemp("xor")
    result = generate_corpus(
        root,
        SynthSpec(
            scenario="xor_correlated", n_utterances=300, n_speakers=10, seed=11,
            frame_size=16, video_format="npz",
        ),
    )
    manifest = resolve_labels(load_manifest(result.manifest_path, media_root=root))
    cache_dir = root / "cache"
    table = load_embeddings(result.embeddings_path)
    build_text_features(
        manifest, table, cache_mod.file_hash(result.embeddings_path), cache_dir
    )
    build_audio_features(manifest, root, cache_dir, AudioFeatureParams(), workers=2)
    build_visual_features(
        manifest, root, cache_dir, VisualFeatureParams(frames=8, height=16, width=16),
        workers=2,
    )
    return {"root": root, "manifest": manifest, "cache_dir": cache_dir, "synth": result}
