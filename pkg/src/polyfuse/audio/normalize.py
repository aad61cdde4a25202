"""Per-speaker z-standardization of functional vectors.

Each speaker's vectors are centered and scaled by that speaker's own
per-dimension mean and standard deviation. Dimensions with zero variance
for a speaker map to 0 (a single-utterance speaker therefore maps to the
all-zero vector). Because splits are speaker-exclusive, fitting a
speaker's statistics never mixes data across splits.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping

import numpy as np

_STD_FLOOR = 1e-12


@dataclass(frozen=True)
class SpeakerStats:
    mean: dict[str, np.ndarray]
    std: dict[str, np.ndarray]

    @classmethod
    def fit(
        cls, vectors: Mapping[str, np.ndarray], speakers: Mapping[str, str]
    ) -> "SpeakerStats":
        grouped: dict[str, list[np.ndarray]] = {}
        for uid in sorted(vectors):
            grouped.setdefault(speakers[uid], []).append(np.asarray(vectors[uid], dtype=np.float64))
        mean, std = {}, {}
        for speaker, rows in grouped.items():
            stacked = np.vstack(rows)
            mean[speaker] = stacked.mean(axis=0)
            std[speaker] = stacked.std(axis=0)
        return cls(mean=mean, std=std)

    def apply(
        self, vectors: Mapping[str, np.ndarray], speakers: Mapping[str, str]
    ) -> dict[str, np.ndarray]:
        out: dict[str, np.ndarray] = {}
        for uid in sorted(vectors):
            speaker = speakers[uid]
            if speaker not in self.mean:
                raise ValueError(f"no statistics fitted for speaker {speaker!r}")
            mu, sigma = self.mean[speaker], self.std[speaker]
            centered = np.asarray(vectors[uid], dtype=np.float64) - mu
            out[uid] = np.where(sigma > _STD_FLOOR, centered / np.where(sigma > _STD_FLOOR, sigma, 1.0), 0.0)
        return out

    def save(self, path: str | Path) -> None:
        payload = {
            speaker: {"mean": self.mean[speaker].tolist(), "std": self.std[speaker].tolist()}
            for speaker in sorted(self.mean)
        }
        Path(path).write_text(json.dumps(payload, sort_keys=True, indent=2), encoding="utf-8")

    @classmethod
    def load(cls, path: str | Path) -> "SpeakerStats":
        payload = json.loads(Path(path).read_text(encoding="utf-8"))
        return cls(
            mean={s: np.asarray(v["mean"]) for s, v in payload.items()},
            std={s: np.asarray(v["std"]) for s, v in payload.items()},
        )


def speaker_zstandardize(
    vectors: Mapping[str, np.ndarray], speakers: Mapping[str, str]
) -> dict[str, np.ndarray]:
    """Fit per-speaker statistics on ``vectors`` and normalize in place of them."""
    return SpeakerStats.fit(vectors, speakers).apply(vectors, speakers)
