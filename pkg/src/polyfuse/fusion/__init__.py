"""Early (feature-level) and late (decision-level) fusion over modality subsets."""

from polyfuse.fusion.early import (
    EarlyHeadConfig,
    FusedFeatureVector,
    early_fuse,
    predict_early,
    predict_early_batch,
    train_early,
)
from polyfuse.fusion.late import (
    DecisionVector,
    MetaConfig,
    late_fuse,
    predict_late,
    predict_late_batch,
    train_late,
)
from polyfuse.fusion.predict import predict_fused
from polyfuse.fusion.sets import MODALITIES, ModalitySet

__all__ = [
    "DecisionVector",
    "EarlyHeadConfig",
    "FusedFeatureVector",
    "MODALITIES",
    "MetaConfig",
    "ModalitySet",
    "early_fuse",
    "late_fuse",
    "predict_early",
    "predict_early_batch",
    "predict_fused",
    "predict_late",
    "predict_late_batch",
    "train_early",
    "train_late",
]
