"""Bag-of-words baselines: logistic regression and a linear max-margin
classifier over token-count vectors built from the training vocabulary."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
from sklearn.linear_model import LogisticRegression
from sklearn.svm import LinearSVC

from polyfuse.artifacts import ModelArtifact
from polyfuse.text.model import TEXT_PIPELINE_VERSION
from polyfuse.text.tokenize import tokenize

BASELINE_KINDS = ("linear_margin", "logistic")


@dataclass(frozen=True)
class BowModel:
    vocabulary: dict[str, int]
    estimator: object
    kind: str

    def vectorize(self, transcripts: Sequence[str]) -> np.ndarray:
        x = np.zeros((len(transcripts), max(len(self.vocabulary), 1)))
        for i, text in enumerate(transcripts):
            for token in tokenize(text):
                j = self.vocabulary.get(token)
                if j is not None:
                    x[i, j] += 1.0
        return x


def train_bow_baseline(
    transcripts: Sequence[str],
    labels: Sequence[int],
    kind: str = "logistic",
    seed: int = 0,
) -> ModelArtifact:
    """Labels are 0 (negative) / 1 (positive).

    Empty transcripts vectorize to zero counts and are classified by the
    intercept alone.
    """
    if kind not in BASELINE_KINDS:
        raise ValueError(f"unknown baseline kind {kind!r}")
    from polyfuse import errors

    if len(set(labels)) < 2:
        raise errors.DegenerateLabels("training labels contain a single class")

    vocab_tokens = sorted({t for text in transcripts for t in tokenize(text)})
    vocabulary = {tok: i for i, tok in enumerate(vocab_tokens)}

    if kind == "logistic":
        estimator = LogisticRegression(max_iter=1000, random_state=seed)
    else:
        estimator = LinearSVC(random_state=seed)
    model = BowModel(vocabulary=vocabulary, estimator=estimator, kind=kind)
    estimator.fit(model.vectorize(transcripts), np.asarray(labels))

    return ModelArtifact(
        kind="bow_baseline",
        config={"kind": kind, "vocabulary_size": len(vocabulary)},
        seed=seed,
        model=model,
        pipeline_versions={"text": TEXT_PIPELINE_VERSION},
    )


def predict_bow(artifact: ModelArtifact, transcripts: Sequence[str]) -> np.ndarray:
    """Hard 0/1 labels for a batch of transcripts."""
    model: BowModel = artifact.model
    return np.asarray(model.estimator.predict(model.vectorize(transcripts)))
