"""Acoustic sentiment classifier: a rectifier MLP over functional vectors.

Layer widths 1024 / 512 / 128 / 1. The single output unit is read as a
logit and passed through a sigmoid, giving p_positive; p_negative is its
exact complement, so the pair always sums to 1.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
import torch
from torch import nn

from polyfuse import errors
from polyfuse.artifacts import ModelArtifact
from polyfuse.audio.llds import AUDIO_PIPELINE_VERSION
from polyfuse.nn import (
    TrainConfig,
    fit,
    probability_pair_from_sigmoid,
    sigmoid_loss,
    sigmoid_predict,
    weights_hash,
)


@dataclass(frozen=True)
class AudioModelConfig:
    input_dim: int = 153
    hidden: tuple[int, ...] = (1024, 512, 128)
    train: TrainConfig = field(default_factory=TrainConfig)

    def as_dict(self) -> dict:
        return {
            "input_dim": self.input_dim,
            "hidden": list(self.hidden),
            "train": self.train.as_dict(),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "AudioModelConfig":
        return cls(
            input_dim=d["input_dim"],
            hidden=tuple(d["hidden"]),
            train=TrainConfig(**d["train"]),
        )


class AudioMLP(nn.Module):
    def __init__(self, config: AudioModelConfig):
        super().__init__()
        self.config = config
        widths = [config.input_dim, *config.hidden]
        self.layers = nn.ModuleList(
            nn.Linear(a, b) for a, b in zip(widths, widths[1:])
        )
        self.head = nn.Linear(widths[-1], 1)

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        for linear in self.layers:
            x = torch.relu(linear(x))
        return self.head(x)


def build_audio_mlp(config: AudioModelConfig) -> AudioMLP:
    return AudioMLP(config)


def train_audio_mlp(
    train_vectors: np.ndarray,
    train_labels: Sequence[int],
    val_vectors: np.ndarray,
    val_labels: Sequence[int],
    config: AudioModelConfig | None = None,
    seed: int = 0,
) -> ModelArtifact:
    """Labels are 0 (negative) / 1 (positive). Deterministic for a fixed seed."""
    config = config or AudioModelConfig(input_dim=int(np.asarray(train_vectors).shape[1]))
    torch.manual_seed(seed)
    model = build_audio_mlp(config)
    history = fit(
        model,
        (torch.as_tensor(np.asarray(train_vectors), dtype=torch.float32),),
        torch.as_tensor(list(train_labels), dtype=torch.long),
        (torch.as_tensor(np.asarray(val_vectors), dtype=torch.float32),),
        torch.as_tensor(list(val_labels), dtype=torch.long),
        config.train,
        sigmoid_loss,
        sigmoid_predict,
    )
    return ModelArtifact(
        kind="audio_mlp",
        config=config.as_dict(),
        seed=seed,
        model=model,
        history=history.as_dict(),
        weights_hash=weights_hash(model),
        pipeline_versions={"audio": AUDIO_PIPELINE_VERSION},
    )


@torch.no_grad()
def predict_audio(artifact: ModelArtifact, vector: np.ndarray) -> tuple[float, float]:
    """(p_negative, p_positive); the pair sums to 1.0 exactly."""
    return tuple(predict_audio_batch(artifact, np.asarray(vector)[None, :])[0])


@torch.no_grad()
def predict_audio_batch(artifact: ModelArtifact, vectors: np.ndarray) -> np.ndarray:
    model: AudioMLP = artifact.model
    vectors = np.asarray(vectors)
    if vectors.ndim != 2 or vectors.shape[1] != model.config.input_dim:
        raise errors.ShapeMismatch(
            f"expected (n, {model.config.input_dim}) vectors, got {vectors.shape}"
        )
    model.eval()
    logits = model(torch.as_tensor(vectors, dtype=torch.float32))
    return probability_pair_from_sigmoid(logits)
