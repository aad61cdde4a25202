"""Feature-level fusion: canonical-order concatenation of per-modality
vectors and the MLP head trained over them.

Inputs arrive as modality -> vector maps; concatenation order is always
the canonical modality order regardless of map order, and the resulting
block layout (modality, offset, length) is recorded with the artifact.
Blocks from different pipelines live on very different scales, so the head
standardizes each fused dimension with training-set statistics; the
statistics ship inside the artifact and are reapplied at prediction time.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Optional, Sequence

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

BlockLayout = tuple[tuple[str, int, int], ...]  # (modality, offset, length)


@dataclass(frozen=True)
class FusedFeatureVector:
    values: np.ndarray
    block_layout: BlockLayout

    def __post_init__(self):
        if self.values.shape != (sum(b[2] for b in self.block_layout),):
            raise ValueError(
                f"values shape {self.values.shape} does not match layout "
                f"{self.block_layout}"
            )

    def block(self, modality: str) -> np.ndarray:
        for name, offset, length in self.block_layout:
            if name == modality:
                return self.values[offset : offset + length]
        raise KeyError(modality)


def early_fuse(
    features: Mapping[str, np.ndarray],
    mset: ModalitySet,
    expected_dims: Optional[Mapping[str, int]] = None,
) -> FusedFeatureVector:
    """Concatenate one vector per modality of ``mset`` in canonical order.

    Raises MissingModality when a vector is absent and DimMismatch when a
    vector's length disagrees with ``expected_dims``.
    """
    blocks: list[np.ndarray] = []
    layout: list[tuple[str, int, int]] = []
    offset = 0
    for modality in mset:
        if modality not in features:
            raise errors.MissingModality(
                f"no {modality} vector supplied for set {mset.label}"
            )
        vec = np.asarray(features[modality], dtype=np.float64).ravel()
        if expected_dims is not None and modality in expected_dims:
            if vec.size != expected_dims[modality]:
                raise errors.DimMismatch(
                    f"{modality} vector has dim {vec.size}, pipeline registered "
                    f"{expected_dims[modality]}"
                )
        if not np.isfinite(vec).all():
            raise ValueError(f"{modality} vector contains non-finite entries")
        blocks.append(vec)
        layout.append((modality, offset, vec.size))
        offset += vec.size
    return FusedFeatureVector(values=np.concatenate(blocks), block_layout=tuple(layout))


@dataclass(frozen=True)
class EarlyHeadConfig:
    input_dim: int
    modalities: tuple[str, ...]
    hidden: tuple[int, ...] = (128, 32)
    dropout: float = 0.2
    classes: int = 2
    train: TrainConfig = field(default_factory=TrainConfig)

    def as_dict(self) -> dict:
        return {
            "input_dim": self.input_dim,
            "modalities": list(self.modalities),
            "hidden": list(self.hidden),
            "dropout": self.dropout,
            "classes": self.classes,
            "train": self.train.as_dict(),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "EarlyHeadConfig":
        return cls(
            input_dim=d["input_dim"],
            modalities=tuple(d["modalities"]),
            hidden=tuple(d["hidden"]),
            dropout=d["dropout"],
            classes=d["classes"],
            train=TrainConfig(**d["train"]),
        )


class EarlyFusionHead(nn.Module):
    def __init__(self, config: EarlyHeadConfig):
        super().__init__()
        self.config = config
        layers = []
        in_dim = config.input_dim
        for width in config.hidden:
            layers.extend([nn.Dropout(config.dropout), nn.Linear(in_dim, width), nn.ReLU()])
            in_dim = width
        self.hidden = nn.Sequential(*layers)
        self.head = nn.Linear(in_dim, config.classes)

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        return self.head(self.hidden(x))


def build_early_head(config: EarlyHeadConfig) -> EarlyFusionHead:
    return EarlyFusionHead(config)


def fuse_dataset(
    per_utterance: Sequence[Mapping[str, np.ndarray]],
    mset: ModalitySet,
    expected_dims: Optional[Mapping[str, int]] = None,
) -> tuple[np.ndarray, BlockLayout]:
    fused = [early_fuse(features, mset, expected_dims) for features in per_utterance]
    layouts = {f.block_layout for f in fused}
    if len(layouts) > 1:
        raise errors.DimMismatch(f"inconsistent block layouts across dataset: {layouts}")
    return np.stack([f.values for f in fused]), fused[0].block_layout


def train_early(
    train_features: Sequence[Mapping[str, np.ndarray]],
    train_labels: Sequence[int],
    val_features: Sequence[Mapping[str, np.ndarray]],
    val_labels: Sequence[int],
    mset: ModalitySet,
    hidden: tuple[int, ...] = (128, 32),
    dropout: float = 0.2,
    train_config: TrainConfig | None = None,
    seed: int = 0,
) -> ModelArtifact:
    """Labels are 0 (negative) / 1 (positive). Deterministic for a fixed seed."""
    x_train, layout = fuse_dataset(train_features, mset)
    expected = {name: length for name, _, length in layout}
    x_val, _ = fuse_dataset(val_features, mset, expected)

    mean = x_train.mean(axis=0)
    std = x_train.std(axis=0)
    std = np.where(std > 1e-8, std, 1.0)

    config = EarlyHeadConfig(
        input_dim=x_train.shape[1],
        modalities=tuple(mset),
        hidden=hidden,
        dropout=dropout,
        train=train_config or TrainConfig(),
    )
    torch.manual_seed(seed)
    model = build_early_head(config)
    history = fit(
        model,
        (torch.as_tensor((x_train - mean) / std, dtype=torch.float32),),
        torch.as_tensor(list(train_labels), dtype=torch.long),
        (torch.as_tensor((x_val - mean) / std, dtype=torch.float32),),
        torch.as_tensor(list(val_labels), dtype=torch.long),
        config.train,
        softmax_loss,
        softmax_predict,
    )
    return ModelArtifact(
        kind="fusion_early",
        config=config.as_dict(),
        seed=seed,
        model=model,
        history=history.as_dict(),
        weights_hash=weights_hash(model),
        meta={
            "block_layout": [list(b) for b in layout],
            "input_mean": mean.tolist(),
            "input_std": std.tolist(),
        },
    )


@torch.no_grad()
def predict_early(
    artifact: ModelArtifact, features: Mapping[str, np.ndarray]
) -> tuple[float, float]:
    """(p_negative, p_positive); input map order is irrelevant because
    fusion canonicalizes before the head sees anything."""
    return tuple(predict_early_batch(artifact, [features])[0])


@torch.no_grad()
def predict_early_batch(
    artifact: ModelArtifact, per_utterance: Sequence[Mapping[str, np.ndarray]]
) -> np.ndarray:
    model: EarlyFusionHead = artifact.model
    mset = ModalitySet(modalities=tuple(model.config.modalities))
    expected = {name: length for name, _, length in artifact.meta["block_layout"]}
    x, _ = fuse_dataset(per_utterance, mset, expected)
    if x.shape[1] != model.config.input_dim:
        raise errors.DimMismatch(
            f"fused dim {x.shape[1]} vs model input {model.config.input_dim}"
        )
    mean = np.asarray(artifact.meta["input_mean"])
    std = np.asarray(artifact.meta["input_std"])
    model.eval()
    return probability_pair_from_softmax(
        model(torch.as_tensor((x - mean) / std, dtype=torch.float32))
    )
