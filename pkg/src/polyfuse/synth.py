"""Synthetic desk-scale corpora with class signal planted in each modality.

Three scenarios:

  separable       every modality carries the label: tone frequency (audio),
                  a polarity keyword (text), clip brightness (video). With
                  probability ``modality_noise`` one randomly chosen
                  modality's coding is inverted for an utterance, so any
                  single modality misleads on a fraction of utterances while
                  the cross-modal majority always recovers the label.
  xor_correlated  the label is the XOR of an audio bit (tone frequency) and
                  a text bit (keyword); video is uninformative. No single
                  modality predicts the label above chance by construction.
  ramp_temporal   video brightness ramps up (positive) or down (negative)
                  over the utterance using the same frame set in reversed
                  order, so only temporal modeling can separate the classes;
                  audio and text are uninformative.

Each speaker gets one video: a WAV tone track plus an mp4 or raw-npz clip,
with utterances as consecutive windows. Labels arrive as unanimous
annotations from three synthetic annotators, and an embedding file
covering the generated vocabulary is written next to the manifest.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from polyfuse.corpus.manifest import save_manifest
from polyfuse.corpus.types import (
    AnnotationRecord,
    CorpusManifest,
    Utterance,
    VideoRecord,
)
from polyfuse.text.embeddings import EMBEDDING_DIM
from polyfuse.visual.decode import write_mp4_video, write_npz_video

SCENARIOS = ("separable", "xor_correlated", "ramp_temporal")

NEGATIVE_TONE_HZ = 180.0
POSITIVE_TONE_HZ = 330.0
NEUTRAL_TONE_HZ = 260.0
DARK = 0.25
BRIGHT = 0.75

# Persian filler/keyword vocabulary so transcripts exercise the RTL path
FILLERS = ("فیلم", "خیلی", "این", "بود", "که", "من", "دیدم", "امروز")
POSITIVE_WORDS = ("عالی", "خوب")
NEGATIVE_WORDS = ("بد", "افتضاح")
BIT_WORDS = ("سیب", "انار")  # text bit 0 / bit 1 for the XOR scenario
ANNOTATORS = ("a1", "a2", "a3")


@dataclass(frozen=True)
class SynthSpec:
    scenario: str
    n_utterances: int = 200
    n_speakers: int = 10
    seed: int = 0
    modality_noise: float = 0.0
    utterance_len: float = 1.0
    sample_rate: int = 16000
    fps: float = 16.0
    frame_size: int = 64
    video_format: str = "mp4"  # or "npz"

    def __post_init__(self):
        if self.scenario not in SCENARIOS:
            raise ValueError(f"unknown scenario {self.scenario!r}")
        if self.n_speakers < 3:
            raise ValueError("need at least 3 speakers for speaker-exclusive splits")
        if self.video_format not in ("mp4", "npz"):
            raise ValueError(f"unknown video format {self.video_format!r}")


@dataclass(frozen=True)
class SynthResult:
    manifest_path: Path
    embeddings_path: Path
    manifest: CorpusManifest


def _token_vector(token: str) -> np.ndarray:
    digest = hashlib.sha256(token.encode()).digest()
    rng = np.random.default_rng(int.from_bytes(digest[:8], "little"))
    return rng.normal(0.0, 0.3, EMBEDDING_DIM).astype(np.float32)


def _write_embeddings(path: Path, vocabulary: set[str]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for token in sorted(vocabulary):
            vec = _token_vector(token)
            fh.write(token + " " + " ".join(f"{v:.6f}" for v in vec) + "\n")


def _tone(rng: np.random.Generator, hz: float, n: int, sr: int) -> np.ndarray:
    t = np.arange(n) / sr
    phase = rng.uniform(0, 2 * np.pi)
    return 0.35 * np.sin(2 * np.pi * hz * t + phase) + rng.normal(0, 0.01, n)


def _sentence(rng: np.random.Generator, keyword: str | None) -> str:
    words = list(rng.choice(FILLERS, size=int(rng.integers(3, 6))))
    if keyword is not None:
        words.insert(int(rng.integers(0, len(words) + 1)), keyword)
    return " ".join(words)


def _flat_frames(
    rng: np.random.Generator, count: int, size: int, level: float
) -> np.ndarray:
    base = np.full((count, size, size, 3), level * 255.0)
    noisy = base + rng.normal(0, 8.0, base.shape)
    return np.clip(noisy, 0, 255).astype(np.uint8)


def _ramp_frames(
    rng: np.random.Generator, count: int, size: int, ascending: bool
) -> np.ndarray:
    levels = np.linspace(0.2, 0.8, count)
    frames = np.stack(
        [_flat_frames(rng, 1, size, level)[0] for level in levels]
    )
    return frames if ascending else frames[::-1]


def generate_corpus(out_dir: str | Path, spec: SynthSpec) -> SynthResult:
    """Write media, manifest, and embeddings under ``out_dir``."""
    out = Path(out_dir)
    media = out / "media"
    media.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(spec.seed)

    sr = spec.sample_rate
    utt_samples = int(round(spec.utterance_len * sr))
    utt_frames = max(int(round(spec.utterance_len * spec.fps)), 2)

    per_speaker = [spec.n_utterances // spec.n_speakers] * spec.n_speakers
    for i in range(spec.n_utterances % spec.n_speakers):
        per_speaker[i] += 1

    videos: list[VideoRecord] = []
    utterances: list[Utterance] = []
    annotations: list[AnnotationRecord] = []
    vocabulary: set[str] = set(FILLERS) | set(POSITIVE_WORDS) | set(NEGATIVE_WORDS) | set(BIT_WORDS)

    utt_counter = 0
    for s in range(spec.n_speakers):
        speaker_id = f"spk{s:02d}"
        video_id = f"vid{s:02d}"
        n_utts = per_speaker[s]
        duration = n_utts * spec.utterance_len

        wav_chunks: list[np.ndarray] = []
        frame_chunks: list[np.ndarray] = []
        for k in range(n_utts):
            uid = f"utt{utt_counter:04d}"
            utt_counter += 1
            start, end = k * spec.utterance_len, (k + 1) * spec.utterance_len
            label = int(rng.integers(0, 2))  # 0 negative, 1 positive

            if spec.scenario == "separable":
                bits = {"audio": label, "text": label, "video": label}
                if spec.modality_noise > 0 and rng.random() < spec.modality_noise:
                    flipped = ("audio", "text", "video")[int(rng.integers(0, 3))]
                    bits[flipped] = 1 - label
                audio_bit, text_bit, video_bit = bits["audio"], bits["text"], bits["video"]
                tone_hz = POSITIVE_TONE_HZ if audio_bit else NEGATIVE_TONE_HZ
                keyword_pool = POSITIVE_WORDS if text_bit else NEGATIVE_WORDS
                keyword = keyword_pool[int(rng.integers(0, len(keyword_pool)))]
                frames = _flat_frames(
                    rng, utt_frames, spec.frame_size, BRIGHT if video_bit else DARK
                )
            elif spec.scenario == "xor_correlated":
                audio_bit = int(rng.integers(0, 2))
                text_bit = audio_bit ^ label
                tone_hz = POSITIVE_TONE_HZ if audio_bit else NEGATIVE_TONE_HZ
                keyword = BIT_WORDS[text_bit]
                frames = _flat_frames(rng, utt_frames, spec.frame_size, 0.5)
            else:  # ramp_temporal
                tone_hz = NEUTRAL_TONE_HZ
                keyword = None
                frames = _ramp_frames(
                    rng, utt_frames, spec.frame_size, ascending=bool(label)
                )

            transcript = _sentence(rng, keyword)
            vocabulary.update(transcript.split(" "))
            wav_chunks.append(_tone(rng, tone_hz, utt_samples, sr))
            frame_chunks.append(frames)

            utterances.append(
                Utterance(
                    utterance_id=uid, video_id=video_id,
                    start=start, end=end, transcript=transcript,
                )
            )
            polarity = 1 if label else -1
            gesture = frozenset({"smile"} if label else {"frown"})
            for annotator in ANNOTATORS:
                annotations.append(
                    AnnotationRecord(
                        utterance_id=uid,
                        annotator_id=annotator,
                        polarity=polarity,
                        subjectivity="subjective",
                        subjectivity_rule="explicit_criticism",
                        gestures=gesture,
                    )
                )

        audio_path = f"media/{video_id}.wav"
        video_path = f"media/{video_id}.{spec.video_format}"
        from polyfuse.audio.signal import AudioSignal, write_wav

        write_wav(media / f"{video_id}.wav",
                  AudioSignal(samples=np.concatenate(wav_chunks), sample_rate=sr))
        all_frames = np.concatenate(frame_chunks)
        if spec.video_format == "mp4":
            write_mp4_video(media / f"{video_id}.mp4", all_frames, spec.fps)
        else:
            write_npz_video(media / f"{video_id}.npz", all_frames, spec.fps)

        videos.append(
            VideoRecord(
                video_id=video_id, speaker_id=speaker_id,
                audio_path=audio_path, video_path=video_path,
                duration=duration,
                speaker_meta={"gender": "synthetic", "age_band": "n/a"},
            )
        )

    manifest = CorpusManifest(
        videos=tuple(videos),
        utterances=tuple(utterances),
        annotations=tuple(annotations),
    )
    manifest_path = out / "manifest.jsonl"
    save_manifest(manifest, manifest_path)
    embeddings_path = out / "embeddings.vec"
    _write_embeddings(embeddings_path, vocabulary)
    return SynthResult(
        manifest_path=manifest_path, embeddings_path=embeddings_path, manifest=manifest
    )
