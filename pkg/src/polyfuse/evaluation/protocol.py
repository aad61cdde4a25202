"""Speaker-independent train/tune/test protocol over modality subsets.

Every configuration trains on the train split, selects weights on the
validation split, and is scored once on the test split. Speaker
exclusivity is asserted before any training starts. Only utterances with
a binary resolved polarity participate; neutral and unresolved utterances
never reach the classifiers.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from polyfuse import errors
from polyfuse.artifacts import ModelArtifact
from polyfuse.audio.model import AudioModelConfig, predict_audio_batch, train_audio_mlp
from polyfuse.audio.normalize import SpeakerStats
from polyfuse.corpus.labels import trainable_labels
from polyfuse.corpus.splits import check_speaker_exclusive
from polyfuse.corpus.types import CorpusManifest, SplitAssignment
from polyfuse.evaluation.metrics import compute_metrics
from polyfuse.evaluation.report import EvaluationReport
from polyfuse.features import FeatureSet
from polyfuse.fusion.early import train_early, predict_early_batch
from polyfuse.fusion.late import train_late, predict_late_batch
from polyfuse.fusion.sets import ModalitySet
from polyfuse.nn import TrainConfig
from polyfuse.text.model import (
    TextModelConfig,
    predict_text_batch,
    text_penultimate_batch,
    train_text_model,
)
from polyfuse.visual.model import (
    VisualModelConfig,
    predict_visual_batch,
    train_visual_model,
    visual_penultimate_batch,
)

logger = logging.getLogger(__name__)

_LABEL_NAMES = {0: "negative", 1: "positive"}


@dataclass(frozen=True)
class FusionJob:
    strategy: str  # unimodal | early | late
    mset: ModalitySet

    def __post_init__(self):
        if self.strategy not in ("unimodal", "early", "late"):
            raise ValueError(f"unknown strategy {self.strategy!r}")
        if self.strategy == "unimodal" and len(self.mset) != 1:
            raise ValueError("unimodal jobs take a single modality")

    @classmethod
    def parse(cls, text: str) -> "FusionJob":
        strategy, _, set_text = text.partition(":")
        return cls(strategy=strategy.strip(), mset=ModalitySet.parse(set_text))

    @property
    def key(self) -> tuple[str, str]:
        return (self.strategy, self.mset.label)


DEFAULT_JOBS = tuple(
    [FusionJob.parse(f"unimodal:{m}") for m in ("T", "A", "V")]
    + [
        FusionJob.parse(f"{strategy}:{s}")
        for strategy in ("early", "late")
        for s in ("A+V", "V+T", "A+T", "A+V+T")
    ]
)


@dataclass
class ProtocolConfig:
    text: TextModelConfig = field(default_factory=TextModelConfig)
    audio: Optional[AudioModelConfig] = None  # input_dim resolved from data
    visual: VisualModelConfig = field(default_factory=VisualModelConfig)
    early_hidden: tuple[int, ...] = (128, 32)
    early_dropout: float = 0.2
    fusion_train: TrainConfig = field(default_factory=TrainConfig)
    late_train: Optional[TrainConfig] = None  # None -> meta-classifier default
    late_kind: str = "logistic"
    seed: int = 0


@dataclass
class ProtocolResult:
    report: EvaluationReport
    models: dict[str, ModelArtifact]
    speaker_stats: Optional[SpeakerStats]


def run_protocol(
    manifest: CorpusManifest,
    split: SplitAssignment,
    jobs: Sequence[FusionJob] = DEFAULT_JOBS,
    features: FeatureSet | None = None,
    config: ProtocolConfig | None = None,
) -> ProtocolResult:
    """Train, tune, and evaluate every configuration; deterministic for a
    fixed (manifest, split, config) triple.

    Raises SpeakerLeakage before doing any work if the split violates
    speaker exclusivity, and MissingModality when the feature set lacks a
    required utterance.
    """
    config = config or ProtocolConfig()
    if features is None:
        raise ValueError("a FeatureSet is required")
    check_speaker_exclusive(manifest, split)

    labels = trainable_labels(manifest)
    part: dict[str, list[str]] = {"train": [], "validation": [], "test": []}
    for uid in sorted(labels):
        name = split.split.get(uid)
        if name is not None:
            part[name].append(uid)
    for name, uids in part.items():
        if not uids:
            raise errors.EmptyInput(f"{name} split has no binary-labeled utterances")
    y = {uid: (labels[uid] + 1) // 2 for uid in labels}  # -1/<+1> -> 0/1

    needed = sorted({m for job in jobs for m in job.mset})
    all_uids = part["train"] + part["validation"] + part["test"]
    for modality in needed:
        features.require(modality, all_uids)

    speakers = {uid: manifest.speaker_of(uid) for uid in all_uids}
    models: dict[str, ModelArtifact] = {}
    unimodal_preds: dict[str, dict[str, np.ndarray]] = {}
    fusion_blocks: dict[str, dict[str, np.ndarray]] = {}
    speaker_stats: Optional[SpeakerStats] = None

    def labels_of(uids: list[str]) -> list[int]:
        return [y[uid] for uid in uids]

    if "audio" in needed:
        raw = {uid: features.audio[uid] for uid in all_uids}
        speaker_stats = SpeakerStats.fit(raw, speakers)
        zscored = speaker_stats.apply(raw, speakers)
        dim = next(iter(zscored.values())).shape[0]
        audio_config = config.audio or AudioModelConfig(input_dim=dim)
        logger.info("training audio classifier (%d dims)", dim)
        models["audio"] = train_audio_mlp(
            np.stack([zscored[u] for u in part["train"]]),
            labels_of(part["train"]),
            np.stack([zscored[u] for u in part["validation"]]),
            labels_of(part["validation"]),
            config=audio_config,
            seed=config.seed,
        )
        unimodal_preds["audio"] = {
            name: predict_audio_batch(
                models["audio"], np.stack([zscored[u] for u in part[name]])
            )
            for name in part
        }
        fusion_blocks["audio"] = zscored

    if "text" in needed:
        logger.info("training text classifier")
        models["text"] = train_text_model(
            [features.text[u] for u in part["train"]],
            labels_of(part["train"]),
            [features.text[u] for u in part["validation"]],
            labels_of(part["validation"]),
            config=config.text,
            seed=config.seed,
        )
        unimodal_preds["text"] = {
            name: predict_text_batch(
                models["text"], [features.text[u] for u in part[name]]
            )
            for name in part
        }
        penult = text_penultimate_batch(models["text"], [features.text[u] for u in all_uids])
        fusion_blocks["text"] = dict(zip(all_uids, penult))

    if "visual" in needed:
        logger.info("training visual classifier")
        models["visual"] = train_visual_model(
            [features.visual[u] for u in part["train"]],
            labels_of(part["train"]),
            [features.visual[u] for u in part["validation"]],
            labels_of(part["validation"]),
            config=config.visual,
            seed=config.seed,
        )
        unimodal_preds["visual"] = {
            name: predict_visual_batch(
                models["visual"], [features.visual[u] for u in part[name]]
            )
            for name in part
        }
        penult = visual_penultimate_batch(
            models["visual"], [features.visual[u] for u in all_uids]
        )
        fusion_blocks["visual"] = dict(zip(all_uids, penult))

    report = EvaluationReport(
        metadata={
            "split_fingerprint": split.fingerprint(),
            "ratios": list(split.ratios),
            "split_seed": split.seed,
            "seed": config.seed,
            "model_hashes": {},
            "pipeline_versions": {},
        }
    )

    def truth(uids: list[str]) -> list[str]:
        return [_LABEL_NAMES[y[uid]] for uid in uids]

    def hard_labels(pairs: np.ndarray) -> list[str]:
        return [_LABEL_NAMES[int(np.argmax(pair))] for pair in pairs]

    test_uids = part["test"]
    for job in jobs:
        logger.info("evaluating %s:%s", job.strategy, job.mset.label)
        if job.strategy == "unimodal":
            modality = job.mset.modalities[0]
            if modality not in models:
                raise errors.UntrainedUnimodal(f"no trained {modality} model")
            pairs = unimodal_preds[modality]["test"]
            artifact_name = modality
        elif job.strategy == "early":
            maps = {
                name: [
                    {m: fusion_blocks[m][uid] for m in job.mset} for uid in part[name]
                ]
                for name in part
            }
            artifact = train_early(
                maps["train"],
                labels_of(part["train"]),
                maps["validation"],
                labels_of(part["validation"]),
                job.mset,
                hidden=config.early_hidden,
                dropout=config.early_dropout,
                train_config=config.fusion_train,
                seed=config.seed,
            )
            artifact_name = f"early_{job.mset.label}"
            models[artifact_name] = artifact
            pairs = predict_early_batch(artifact, maps["test"])
        else:  # late
            for modality in job.mset:
                if modality not in models:
                    raise errors.UntrainedUnimodal(f"no trained {modality} model")
            prediction_maps = {
                name: [
                    {m: unimodal_preds[m][name][i] for m in job.mset}
                    for i in range(len(part[name]))
                ]
                for name in part
            }
            artifact = train_late(
                prediction_maps["validation"],
                labels_of(part["validation"]),
                job.mset,
                kind=config.late_kind,
                train_config=config.late_train,
                seed=config.seed,
            )
            artifact_name = f"late_{job.mset.label}"
            models[artifact_name] = artifact
            pairs = predict_late_batch(artifact, prediction_maps["test"])

        metrics = compute_metrics(hard_labels(pairs), truth(test_uids))
        report.add(job.strategy, job.mset.label, metrics)

    for name, artifact in models.items():
        artifact.split_fingerprint = split.fingerprint()
        report.metadata["model_hashes"][name] = artifact.weights_hash
        report.metadata["pipeline_versions"].update(artifact.pipeline_versions)

    return ProtocolResult(report=report, models=models, speaker_stats=speaker_stats)
