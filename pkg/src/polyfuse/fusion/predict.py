"""Strategy-agnostic prediction over fused artifacts."""

from __future__ import annotations

from typing import Mapping

import numpy as np

from polyfuse import errors
from polyfuse.artifacts import ModelArtifact
from polyfuse.fusion.early import predict_early
from polyfuse.fusion.late import predict_late
from polyfuse.fusion.sets import ModalitySet


def predict_fused(
    artifact: ModelArtifact,
    inputs: Mapping[str, np.ndarray] | Mapping[str, tuple[float, float]],
    mset: ModalitySet,
) -> tuple[float, float]:
    """(p_negative, p_positive) from an early or late fusion artifact.

    ``inputs`` maps modality to feature vector (early) or probability pair
    (late). Raises SetMismatch when ``mset`` differs from the set the
    artifact was trained for.
    """
    trained = tuple(artifact.config.get("modalities", ()))
    if tuple(mset) != trained:
        raise errors.SetMismatch(
            f"artifact trained for {'+'.join(trained)}, queried with {mset.label}"
        )
    if artifact.kind == "fusion_early":
        return predict_early(artifact, inputs)
    if artifact.kind == "fusion_late":
        return predict_late(artifact, inputs)
    raise ValueError(f"not a fusion artifact: kind {artifact.kind!r}")
