"""Stacked bidirectional LSTM sentiment classifier over embedded utterances.

Default topology: two stacked BiLSTM layers of 128 and 64 cells per
direction with dropout 0.2 between them, the final forward/backward hidden
states concatenated into a dense 128 rectifier layer, and a two-way
softmax head. The all-128 variant is one config field away. Padding rows
are excluded from the recurrence via packed sequences, so masked timesteps
cannot influence the prediction.
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
from polyfuse.text.embeddings import EMBEDDING_DIM, MAX_TOKENS, UtteranceTensorText

TEXT_PIPELINE_VERSION = "text-1"


@dataclass(frozen=True)
class TextModelConfig:
    recurrent_layers: tuple[int, ...] = (128, 64)  # cells per direction
    dense_layers: tuple[tuple[int, str], ...] = ((128, "relu"), (2, "softmax"))
    dropout: float = 0.2
    classes: int = 2
    input_dim: int = EMBEDDING_DIM
    max_tokens: int = MAX_TOKENS
    train: TrainConfig = field(default_factory=TrainConfig)

    def __post_init__(self):
        if self.classes != 2:
            raise ValueError("classifier is two-class")
        if not self.recurrent_layers:
            raise ValueError("need at least one recurrent layer")
        if self.dense_layers[-1] != (self.classes, "softmax"):
            raise ValueError("final dense layer must be (2, softmax)")

    def as_dict(self) -> dict:
        return {
            "recurrent_layers": list(self.recurrent_layers),
            "dense_layers": [list(layer) for layer in self.dense_layers],
            "dropout": self.dropout,
            "classes": self.classes,
            "input_dim": self.input_dim,
            "max_tokens": self.max_tokens,
            "train": self.train.as_dict(),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "TextModelConfig":
        return cls(
            recurrent_layers=tuple(d["recurrent_layers"]),
            dense_layers=tuple(tuple(layer) for layer in d["dense_layers"]),
            dropout=d["dropout"],
            classes=d["classes"],
            input_dim=d["input_dim"],
            max_tokens=d["max_tokens"],
            train=TrainConfig(**d["train"]),
        )


class StackedBiLSTM(nn.Module):
    def __init__(self, config: TextModelConfig):
        super().__init__()
        self.config = config
        layers = []
        in_dim = config.input_dim
        for cells in config.recurrent_layers:
            layers.append(
                nn.LSTM(in_dim, cells, batch_first=True, bidirectional=True)
            )
            in_dim = 2 * cells
        self.recurrent = nn.ModuleList(layers)
        self.dropout = nn.Dropout(config.dropout)

        dense = []
        for width, activation in config.dense_layers[:-1]:
            if activation != "relu":
                raise ValueError(f"unsupported hidden activation {activation!r}")
            dense.append(nn.Linear(in_dim, width))
            in_dim = width
        self.dense = nn.ModuleList(dense)
        self.head = nn.Linear(in_dim, config.classes)

    def _encode(self, values: torch.Tensor, lengths: torch.Tensor) -> torch.Tensor:
        # packing drops padded timesteps from the recurrence entirely
        safe_lengths = lengths.clamp(min=1).cpu()
        x = values
        h_last = None
        for i, lstm in enumerate(self.recurrent):
            if i > 0:
                x = self.dropout(x)
            packed = nn.utils.rnn.pack_padded_sequence(
                x, safe_lengths, batch_first=True, enforce_sorted=False
            )
            packed_out, (h_n, _) = lstm(packed)
            x, _ = nn.utils.rnn.pad_packed_sequence(
                packed_out, batch_first=True, total_length=values.shape[1]
            )
            h_last = torch.cat([h_n[-2], h_n[-1]], dim=1)
        return h_last

    def penultimate(self, values: torch.Tensor, lengths: torch.Tensor) -> torch.Tensor:
        h = self._encode(values, lengths)
        for linear in self.dense:
            h = torch.relu(linear(self.dropout(h)))
        return h

    def forward(self, values: torch.Tensor, lengths: torch.Tensor) -> torch.Tensor:
        return self.head(self.penultimate(values, lengths))


def build_text_model(config: TextModelConfig) -> StackedBiLSTM:
    return StackedBiLSTM(config)


def _to_tensors(
    dataset: Sequence[UtteranceTensorText],
) -> tuple[torch.Tensor, torch.Tensor]:
    values = torch.from_numpy(np.stack([t.values for t in dataset])).float()
    lengths = torch.as_tensor([t.length for t in dataset], dtype=torch.long)
    return values, lengths


def train_text_model(
    train_set: Sequence[UtteranceTensorText],
    train_labels: Sequence[int],
    val_set: Sequence[UtteranceTensorText],
    val_labels: Sequence[int],
    config: TextModelConfig | None = None,
    seed: int = 0,
) -> ModelArtifact:
    """Labels are 0 (negative) / 1 (positive). Deterministic for a fixed seed."""
    config = config or TextModelConfig()
    torch.manual_seed(seed)
    model = build_text_model(config)
    history = fit(
        model,
        _to_tensors(train_set),
        torch.as_tensor(list(train_labels), dtype=torch.long),
        _to_tensors(val_set),
        torch.as_tensor(list(val_labels), dtype=torch.long),
        config.train,
        softmax_loss,
        softmax_predict,
    )
    return ModelArtifact(
        kind="text_bilstm",
        config=config.as_dict(),
        seed=seed,
        model=model,
        history=history.as_dict(),
        weights_hash=weights_hash(model),
        pipeline_versions={"text": TEXT_PIPELINE_VERSION},
    )


def _check_tensor(tensor: UtteranceTensorText, config: TextModelConfig) -> None:
    expected = (config.max_tokens, config.input_dim)
    if tuple(tensor.values.shape) != expected:
        raise errors.ShapeMismatch(
            f"expected input shape {expected}, got {tuple(tensor.values.shape)}"
        )


@torch.no_grad()
def predict_text(
    artifact: ModelArtifact, tensor: UtteranceTensorText
) -> tuple[float, float]:
    """(p_negative, p_positive) for one utterance tensor."""
    return tuple(predict_text_batch(artifact, [tensor])[0])


@torch.no_grad()
def predict_text_batch(
    artifact: ModelArtifact, dataset: Sequence[UtteranceTensorText]
) -> np.ndarray:
    model: StackedBiLSTM = artifact.model
    for t in dataset:
        _check_tensor(t, model.config)
    model.eval()
    values, lengths = _to_tensors(dataset)
    return probability_pair_from_softmax(model(values, lengths))


@torch.no_grad()
def text_penultimate_batch(
    artifact: ModelArtifact, dataset: Sequence[UtteranceTensorText]
) -> np.ndarray:
    """Activations of the last hidden dense layer, the text block used by
    feature-level fusion."""
    model: StackedBiLSTM = artifact.model
    model.eval()
    values, lengths = _to_tensors(dataset)
    return model.penultimate(values, lengths).cpu().numpy().astype(np.float64)
