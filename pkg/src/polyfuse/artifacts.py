"""Trained-model artifact container.

An artifact is a directory holding a JSON manifest (kind, config, seed,
split fingerprint, pipeline versions, training history, weights hash) next
to the weights themselves. Torch-backed kinds rebuild their architecture
from the config and load the state dict; the bag-of-words baselines store
their sklearn estimator with joblib.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import joblib
import torch

ARTIFACT_MANIFEST = "manifest.json"
TORCH_WEIGHTS = "weights.pt"
SKLEARN_WEIGHTS = "model.joblib"


@dataclass
class ModelArtifact:
    kind: str
    config: dict
    seed: int
    model: object
    history: dict = field(default_factory=dict)
    weights_hash: str = ""
    split_fingerprint: Optional[str] = None
    pipeline_versions: dict = field(default_factory=dict)
    meta: dict = field(default_factory=dict)

    def manifest_dict(self) -> dict:
        return {
            "kind": self.kind,
            "config": self.config,
            "seed": self.seed,
            "history": self.history,
            "weights_hash": self.weights_hash,
            "split_fingerprint": self.split_fingerprint,
            "pipeline_versions": self.pipeline_versions,
            "meta": self.meta,
        }


def save_artifact(artifact: ModelArtifact, path: str | Path) -> Path:
    path = Path(path)
    path.mkdir(parents=True, exist_ok=True)
    (path / ARTIFACT_MANIFEST).write_text(
        json.dumps(artifact.manifest_dict(), sort_keys=True, indent=2) + "\n",
        encoding="utf-8",
    )
    if isinstance(artifact.model, torch.nn.Module):
        torch.save(artifact.model.state_dict(), path / TORCH_WEIGHTS)
    else:
        joblib.dump(artifact.model, path / SKLEARN_WEIGHTS)
    return path


def load_artifact(path: str | Path) -> ModelArtifact:
    path = Path(path)
    manifest = json.loads((path / ARTIFACT_MANIFEST).read_text(encoding="utf-8"))
    kind = manifest["kind"]
    builder = _BUILDERS.get(kind)
    if builder is None:
        raise ValueError(f"unknown artifact kind {kind!r}")
    model = builder(manifest["config"], path)
    return ModelArtifact(
        kind=kind,
        config=manifest["config"],
        seed=manifest["seed"],
        model=model,
        history=manifest["history"],
        weights_hash=manifest["weights_hash"],
        split_fingerprint=manifest["split_fingerprint"],
        pipeline_versions=manifest["pipeline_versions"],
        meta=manifest["meta"],
    )


def _load_torch(module: torch.nn.Module, path: Path) -> torch.nn.Module:
    state = torch.load(path / TORCH_WEIGHTS, weights_only=True)
    module.load_state_dict(state)
    module.eval()
    return module


def _build_text(config: dict, path: Path) -> torch.nn.Module:
    from polyfuse.text.model import TextModelConfig, build_text_model

    return _load_torch(build_text_model(TextModelConfig.from_dict(config)), path)


def _build_audio(config: dict, path: Path) -> torch.nn.Module:
    from polyfuse.audio.model import AudioModelConfig, build_audio_mlp

    return _load_torch(build_audio_mlp(AudioModelConfig.from_dict(config)), path)


def _build_visual(config: dict, path: Path) -> torch.nn.Module:
    from polyfuse.visual.model import VisualModelConfig, build_visual_network

    return _load_torch(build_visual_network(VisualModelConfig.from_dict(config)), path)


def _build_early(config: dict, path: Path) -> torch.nn.Module:
    from polyfuse.fusion.early import EarlyHeadConfig, build_early_head

    return _load_torch(build_early_head(EarlyHeadConfig.from_dict(config)), path)


def _build_late(config: dict, path: Path) -> torch.nn.Module:
    from polyfuse.fusion.late import MetaConfig, build_meta_classifier

    return _load_torch(build_meta_classifier(MetaConfig.from_dict(config)), path)


def _build_sklearn(config: dict, path: Path) -> object:
    return joblib.load(path / SKLEARN_WEIGHTS)


_BUILDERS = {
    "text_bilstm": _build_text,
    "audio_mlp": _build_audio,
    "visual_3dcnn": _build_visual,
    "fusion_early": _build_early,
    "fusion_late": _build_late,
    "bow_baseline": _build_sklearn,
}
