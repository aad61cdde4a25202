"""Decision-level fusion: concatenated unimodal probability pairs fed to a
small meta-classifier.

The meta-classifier (a logistic head by default) is trained on held-out
validation-split predictions, never on training-split predictions, so it
cannot fit the unimodal models' in-sample overconfidence. A singleton set
supports an identity meta-classifier that passes the lone pair through.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np
import torch
from torch import nn

from polyfuse import errors
from polyfuse.artifacts import ModelArtifact
from polyfuse.fusion.sets import ModalitySet
from polyfuse.nn import (
    TrainConfig,
    fit,
    probability_pair_from_softmax,
    softmax_loss,
    softmax_predict,
    weights_hash,
)

META_KINDS = ("logistic", "identity")

# the meta-classifier is a handful of weights trained on a small held-out
# set; it needs many cheap epochs, not the deep models' schedule
META_TRAIN_DEFAULT = TrainConfig(
    epochs=300, batch_size=64, learning_rate=0.05, patience=100
)


@dataclass(frozen=True)
class DecisionVector:
    values: np.ndarray  # 2 entries per modality, canonical order
    modalities: tuple[str, ...]

    def __post_init__(self):
        if self.values.shape != (2 * len(self.modalities),):
            raise ValueError(
                f"decision vector shape {self.values.shape} for "
                f"{len(self.modalities)} modalities"
            )

    def pair(self, modality: str) -> tuple[float, float]:
        i = 2 * self.modalities.index(modality)
        return (float(self.values[i]), float(self.values[i + 1]))


def late_fuse(
    predictions: Mapping[str, tuple[float, float] | np.ndarray], mset: ModalitySet
) -> DecisionVector:
    """Concatenate per-modality (p_negative, p_positive) pairs in canonical
    order, checking each pair is a probability distribution."""
    blocks = []
    for modality in mset:
        if modality not in predictions:
            raise errors.MissingModality(
                f"no {modality} prediction supplied for set {mset.label}"
            )
        pair = np.asarray(predictions[modality], dtype=np.float64).ravel()
        if pair.shape != (2,):
            raise ValueError(f"{modality} prediction must be a pair, got {pair.shape}")
        if pair.min() < -1e-9 or abs(pair.sum() - 1.0) > 1e-6:
            raise ValueError(
                f"{modality} prediction {pair} is not a probability distribution"
            )
        blocks.append(pair)
    return DecisionVector(values=np.concatenate(blocks), modalities=tuple(mset))


@dataclass(frozen=True)
class MetaConfig:
    modalities: tuple[str, ...]
    kind: str = "logistic"
    classes: int = 2
    train: TrainConfig = field(default_factory=TrainConfig)

    def __post_init__(self):
        if self.kind not in META_KINDS:
            raise ValueError(f"unknown meta-classifier kind {self.kind!r}")
        if self.kind == "identity" and len(self.modalities) != 1:
            raise ValueError("identity meta-classifier requires a singleton set")

    def as_dict(self) -> dict:
        return {
            "modalities": list(self.modalities),
            "kind": self.kind,
            "classes": self.classes,
            "train": self.train.as_dict(),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "MetaConfig":
        return cls(
            modalities=tuple(d["modalities"]),
            kind=d["kind"],
            classes=d["classes"],
            train=TrainConfig(**d["train"]),
        )


class LogisticMeta(nn.Module):
    def __init__(self, config: MetaConfig):
        super().__init__()
        self.config = config
        self.linear = nn.Linear(2 * len(config.modalities), config.classes)

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        return self.linear(x)


class IdentityMeta(nn.Module):
    """Passes the single modality's probability pair straight through."""

    def __init__(self, config: MetaConfig):
        super().__init__()
        self.config = config

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        # logits whose softmax reproduces the input pair
        return torch.log(x.clamp(min=1e-12))


def build_meta_classifier(config: MetaConfig) -> nn.Module:
    if config.kind == "identity":
        return IdentityMeta(config)
    return LogisticMeta(config)


def _stack(
    per_utterance: Sequence[Mapping[str, tuple[float, float]]], mset: ModalitySet
) -> np.ndarray:
    return np.stack([late_fuse(preds, mset).values for preds in per_utterance])


def train_late(
    val_predictions: Sequence[Mapping[str, tuple[float, float]]],
    val_labels: Sequence[int],
    mset: ModalitySet,
    kind: str = "logistic",
    train_config: TrainConfig | None = None,
    seed: int = 0,
) -> ModelArtifact:
    """Fit the meta-classifier on validation-split unimodal predictions."""
    config = MetaConfig(
        modalities=tuple(mset), kind=kind, train=train_config or META_TRAIN_DEFAULT
    )
    torch.manual_seed(seed)
    model = build_meta_classifier(config)
    history = {}
    if kind == "logistic":
        x = torch.as_tensor(_stack(val_predictions, mset), dtype=torch.float32)
        y = torch.as_tensor(list(val_labels), dtype=torch.long)
        # the same held-out predictions drive both the updates and the
        # early-stopping accuracy; no training-split outputs are involved
        history = fit(
            model, (x,), y, (x,), y, config.train, softmax_loss, softmax_predict
        ).as_dict()
    return ModelArtifact(
        kind="fusion_late",
        config=config.as_dict(),
        seed=seed,
        model=model,
        history=history,
        weights_hash=weights_hash(model),
    )


@torch.no_grad()
def predict_late(
    artifact: ModelArtifact, predictions: Mapping[str, tuple[float, float]]
) -> tuple[float, float]:
    """(p_negative, p_positive) from the meta-classifier."""
    return tuple(predict_late_batch(artifact, [predictions])[0])


@torch.no_grad()
def predict_late_batch(
    artifact: ModelArtifact,
    per_utterance: Sequence[Mapping[str, tuple[float, float]]],
) -> np.ndarray:
    model = artifact.model
    mset = ModalitySet(modalities=tuple(model.config.modalities))
    x = torch.as_tensor(_stack(per_utterance, mset), dtype=torch.float32)
    model.eval()
    return probability_pair_from_softmax(model(x))
