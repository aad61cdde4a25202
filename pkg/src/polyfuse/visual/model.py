"""3D convolutional sentiment classifier over utterance clips.

The convolution/pooling stack (all convolutions 2x2x2 valid, stride 1,
rectified; pools 1x2x2, 2x2x2, 1x2x2) feeds dense layers of 5000 and 500
rectifier units and a two-way softmax head. Kernels span the time axis,
so the network can discriminate temporal patterns that per-frame models
cannot.

``compute_stack_shapes`` is an independent analytic shape calculator; the
network is tested against it, and it raises ShapeUnderflow before any
tensor is allocated when an input is too small for the stack.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
import torch
from torch import nn

from polyfuse import errors
from polyfuse.artifacts import ModelArtifact
from polyfuse.nn import (
    TrainConfig,
    fit,
    probability_pair_from_softmax,
    softmax_loss,
    softmax_predict,
    weights_hash,
)
from polyfuse.visual.sampling import VISUAL_PIPELINE_VERSION, FrameTensor

# (kind, feature_maps, kernel) for convolutions; (kind, kernel) for pools
DEFAULT_CONV_STACK = (
    ("conv3d", 16, (2, 2, 2)),
    ("conv3d", 32, (2, 2, 2)),
    ("maxpool3d", (1, 2, 2)),
    ("conv3d", 64, (2, 2, 2)),
    ("maxpool3d", (2, 2, 2)),
    ("conv3d", 64, (2, 2, 2)),
    ("maxpool3d", (1, 2, 2)),
)


@dataclass(frozen=True)
class VisualModelConfig:
    conv_stack: tuple = DEFAULT_CONV_STACK
    dense_layers: tuple[int, ...] = (5000, 500)
    classes: int = 2
    input_shape: tuple[int, int, int] = (16, 64, 64)  # (T, H, W)
    channels: int = 3
    train: TrainConfig = field(default_factory=TrainConfig)

    def as_dict(self) -> dict:
        return {
            "conv_stack": [list(map(_jsonable, layer)) for layer in self.conv_stack],
            "dense_layers": list(self.dense_layers),
            "classes": self.classes,
            "input_shape": list(self.input_shape),
            "channels": self.channels,
            "train": self.train.as_dict(),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "VisualModelConfig":
        stack = tuple(
            tuple(tuple(x) if isinstance(x, list) else x for x in layer)
            for layer in d["conv_stack"]
        )
        return cls(
            conv_stack=stack,
            dense_layers=tuple(d["dense_layers"]),
            classes=d["classes"],
            input_shape=tuple(d["input_shape"]),
            channels=d["channels"],
            train=TrainConfig(**d["train"]),
        )


def _jsonable(x):
    return list(x) if isinstance(x, tuple) else x


def compute_stack_shapes(
    conv_stack: Sequence, input_shape: tuple[int, int, int], channels: int = 3
) -> list[tuple[int, int, int, int]]:
    """(C, T, H, W) after each stack layer, by shape arithmetic alone.

    Valid convolutions shrink each axis by (kernel - 1); pools divide by
    their kernel (floor). Raises ShapeUnderflow when any axis would drop
    below 1.
    """
    c, (t, h, w) = channels, input_shape
    shapes = [(c, t, h, w)]
    for layer in conv_stack:
        if layer[0] == "conv3d":
            _, maps, (kt, kh, kw) = layer
            c, t, h, w = maps, t - (kt - 1), h - (kh - 1), w - (kw - 1)
        elif layer[0] == "maxpool3d":
            _, (kt, kh, kw) = layer
            t, h, w = t // kt, h // kh, w // kw
        else:
            raise ValueError(f"unknown stack layer kind {layer[0]!r}")
        if min(t, h, w) < 1:
            raise errors.ShapeUnderflow(
                f"input {input_shape} collapses to (t={t}, h={h}, w={w}) "
                f"at layer {layer}"
            )
        shapes.append((c, t, h, w))
    return shapes


def flatten_dim(config: VisualModelConfig) -> int:
    c, t, h, w = compute_stack_shapes(
        config.conv_stack, config.input_shape, config.channels
    )[-1]
    return c * t * h * w


class Visual3DCNN(nn.Module):
    def __init__(self, config: VisualModelConfig):
        super().__init__()
        self.config = config
        compute_stack_shapes(config.conv_stack, config.input_shape, config.channels)

        features = []
        in_channels = config.channels
        for layer in config.conv_stack:
            if layer[0] == "conv3d":
                _, maps, kernel = layer
                features.append(nn.Conv3d(in_channels, maps, kernel_size=kernel))
                features.append(nn.ReLU())
                in_channels = maps
            else:
                features.append(nn.MaxPool3d(kernel_size=layer[1]))
        self.features = nn.Sequential(*features)

        dense = []
        in_dim = flatten_dim(config)
        for width in config.dense_layers:
            dense.append(nn.Linear(in_dim, width))
            in_dim = width
        self.dense = nn.ModuleList(dense)
        self.head = nn.Linear(in_dim, config.classes)

    def penultimate(self, x: torch.Tensor) -> torch.Tensor:
        # input arrives (N, T, H, W, C); convolutions want (N, C, T, H, W)
        x = x.permute(0, 4, 1, 2, 3)
        x = self.features(x)
        x = x.flatten(start_dim=1)
        for linear in self.dense:
            x = torch.relu(linear(x))
        return x

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        return self.head(self.penultimate(x))


def build_visual_network(config: VisualModelConfig) -> Visual3DCNN:
    return Visual3DCNN(config)


def build_visual_model(config: VisualModelConfig | None = None, seed: int = 0) -> ModelArtifact:
    """Untrained artifact with the configured topology."""
    config = config or VisualModelConfig()
    torch.manual_seed(seed)
    model = build_visual_network(config)
    return ModelArtifact(
        kind="visual_3dcnn",
        config=config.as_dict(),
        seed=seed,
        model=model,
        weights_hash=weights_hash(model),
        pipeline_versions={"visual": VISUAL_PIPELINE_VERSION},
    )


def _to_tensor(dataset: Sequence[FrameTensor]) -> torch.Tensor:
    return torch.from_numpy(np.stack([t.values for t in dataset])).float()


def train_visual_model(
    train_set: Sequence[FrameTensor],
    train_labels: Sequence[int],
    val_set: Sequence[FrameTensor],
    val_labels: Sequence[int],
    config: VisualModelConfig | None = None,
    seed: int = 0,
) -> ModelArtifact:
    """Labels are 0 (negative) / 1 (positive). Deterministic for a fixed seed."""
    config = config or VisualModelConfig()
    torch.manual_seed(seed)
    model = build_visual_network(config)
    history = fit(
        model,
        (_to_tensor(train_set),),
        torch.as_tensor(list(train_labels), dtype=torch.long),
        (_to_tensor(val_set),),
        torch.as_tensor(list(val_labels), dtype=torch.long),
        config.train,
        softmax_loss,
        softmax_predict,
    )
    return ModelArtifact(
        kind="visual_3dcnn",
        config=config.as_dict(),
        seed=seed,
        model=model,
        history=history.as_dict(),
        weights_hash=weights_hash(model),
        pipeline_versions={"visual": VISUAL_PIPELINE_VERSION},
    )


@torch.no_grad()
def predict_visual(artifact: ModelArtifact, tensor: FrameTensor) -> tuple[float, float]:
    """(p_negative, p_positive) for one clip tensor."""
    return tuple(predict_visual_batch(artifact, [tensor])[0])


@torch.no_grad()
def predict_visual_batch(
    artifact: ModelArtifact, dataset: Sequence[FrameTensor]
) -> np.ndarray:
    model: Visual3DCNN = artifact.model
    expected = tuple(model.config.input_shape)
    for t in dataset:
        if t.shape != expected:
            raise errors.ShapeMismatch(
                f"expected clip shape {expected}, got {t.shape}"
            )
    model.eval()
    return probability_pair_from_softmax(model(_to_tensor(dataset)))


@torch.no_grad()
def visual_penultimate_batch(
    artifact: ModelArtifact, dataset: Sequence[FrameTensor]
) -> np.ndarray:
    """Activations of the last dense layer, the visual block used by
    feature-level fusion."""
    model: Visual3DCNN = artifact.model
    model.eval()
    return model.penultimate(_to_tensor(dataset)).cpu().numpy().astype(np.float64)
