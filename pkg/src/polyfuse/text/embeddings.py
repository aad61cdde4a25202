"""Word-embedding table and fixed-shape utterance tensors.

Embedding files are UTF-8 text, one ``token v1 ... v300`` line per word
(a leading ``count dim`` header line is tolerated and skipped). Tokens
absent from the table map to the zero vector. Each utterance becomes a
fixed 60 x 300 matrix: the first min(n_tokens, 60) rows are lookups in
token order, the rest are zero, and a boolean mask marks the real rows.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

EMBEDDING_DIM = 300
MAX_TOKENS = 60


@dataclass(frozen=True)
class EmbeddingTable:
    vocabulary: dict[str, int]
    matrix: np.ndarray  # (|V|, 300) float32
    dim: int = EMBEDDING_DIM

    def __post_init__(self):
        if self.dim != EMBEDDING_DIM:
            raise ValueError(f"embedding dim must be {EMBEDDING_DIM}, got {self.dim}")
        if self.matrix.shape != (len(self.vocabulary), self.dim):
            raise ValueError(
                f"matrix shape {self.matrix.shape} does not match "
                f"|V|={len(self.vocabulary)}, dim={self.dim}"
            )
        if not np.isfinite(self.matrix).all():
            raise ValueError("embedding matrix contains non-finite entries")

    def lookup(self, token: str) -> np.ndarray | None:
        idx = self.vocabulary.get(token)
        return None if idx is None else self.matrix[idx]


@dataclass(frozen=True)
class UtteranceTensorText:
    values: np.ndarray  # (60, 300) float32, rows beyond the mask exactly zero
    mask: np.ndarray  # (60,) bool

    @property
    def length(self) -> int:
        return int(self.mask.sum())


def load_embeddings(path: str | Path) -> EmbeddingTable:
    vocab: dict[str, int] = {}
    rows: list[np.ndarray] = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            parts = line.rstrip("\n").split(" ")
            if lineno == 1 and len(parts) == 2:
                continue  # fastText-style count/dim header
            if len(parts) < 2 or not parts[0]:
                continue
            token, values = parts[0], parts[1:]
            if len(values) != EMBEDDING_DIM:
                raise ValueError(
                    f"{path}:{lineno}: expected {EMBEDDING_DIM} values for "
                    f"{token!r}, got {len(values)}"
                )
            if token in vocab:
                continue  # first occurrence wins
            vocab[token] = len(rows)
            rows.append(np.asarray([float(v) for v in values], dtype=np.float32))
    matrix = np.vstack(rows) if rows else np.zeros((0, EMBEDDING_DIM), dtype=np.float32)
    return EmbeddingTable(vocabulary=vocab, matrix=matrix)


def save_embeddings(table: EmbeddingTable, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for token in sorted(table.vocabulary):
            vec = table.matrix[table.vocabulary[token]]
            fh.write(token + " " + " ".join(repr(float(v)) for v in vec) + "\n")


def embed_sequence(
    tokens: list[str] | tuple[str, ...],
    table: EmbeddingTable,
    max_tokens: int = MAX_TOKENS,
) -> UtteranceTensorText:
    """Trim to the first ``max_tokens`` tokens or zero-pad at the end."""
    values = np.zeros((max_tokens, EMBEDDING_DIM), dtype=np.float32)
    mask = np.zeros(max_tokens, dtype=bool)
    for i, token in enumerate(tokens[:max_tokens]):
        vec = table.lookup(token)
        if vec is not None:
            values[i] = vec
        mask[i] = True
    return UtteranceTensorText(values=values, mask=mask)
