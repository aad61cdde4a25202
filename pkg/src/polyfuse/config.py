"""Declarative run configuration.

One TOML document drives every command. Precedence: built-in defaults
< config file < POLYFUSE_* environment variables < command-line flags.
Paths are resolved against --root (default: the config file's directory).
The fully-resolved configuration is persisted next to every artifact.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Optional

try:
    import tomllib  # Python >= 3.11
except ModuleNotFoundError:
    import tomli as tomllib

from polyfuse.audio.model import AudioModelConfig
from polyfuse.evaluation.protocol import FusionJob, ProtocolConfig
from polyfuse.features import AudioFeatureParams, VisualFeatureParams
from polyfuse.nn import TrainConfig
from polyfuse.text.model import TextModelConfig
from polyfuse.visual.model import VisualModelConfig

ENV_PREFIX = "POLYFUSE_"

DEFAULT_JOBS = [
    "unimodal:T",
    "unimodal:A",
    "unimodal:V",
    "early:A+V",
    "early:V+T",
    "early:A+T",
    "early:A+V+T",
    "late:A+V",
    "late:V+T",
    "late:A+T",
    "late:A+V+T",
]

DEFAULTS: dict[str, dict[str, Any]] = {
    "paths": {
        "manifest": "manifest.jsonl",
        "media_root": ".",
        "cache_dir": "cache",
        "output_dir": "output",
        "embeddings": "embeddings.vec",
    },
    "split": {"ratios": [0.6, 0.1, 0.3], "seed": 13},
    "train": {
        "epochs": 30,
        "batch_size": 32,
        "learning_rate": 1e-3,
        "patience": 5,
        "seed": 0,
    },
    "text": {"max_tokens": 60, "recurrent_layers": [128, 64], "dropout": 0.2},
    "audio": {
        "frame_len": 0.050,
        "hop": 0.025,
        "voiced_gate": False,
        "voicing_threshold": 0.45,
        "mean_only": False,
        "hidden": [1024, 512, 128],
    },
    "visual": {"frames": 16, "height": 64, "width": 64, "dense_layers": [5000, 500]},
    "fusion": {
        "jobs": DEFAULT_JOBS,
        "early_hidden": [128, 32],
        "early_dropout": 0.2,
        "late_kind": "logistic",
    },
    "run": {"workers": 2},
}


def _deep_merge(base: dict, update: dict) -> dict:
    out = {k: dict(v) if isinstance(v, dict) else v for k, v in base.items()}
    for key, value in update.items():
        if isinstance(value, dict) and isinstance(out.get(key), dict):
            out[key] = _deep_merge(out[key], value)
        else:
            out[key] = value
    return out


def _env_overrides(environ: Optional[dict] = None) -> dict:
    environ = environ if environ is not None else dict(os.environ)
    out: dict[str, dict[str, Any]] = {}
    for name, raw in environ.items():
        if not name.startswith(ENV_PREFIX):
            continue
        section, _, key = name[len(ENV_PREFIX):].lower().partition("_")
        if not key or section not in DEFAULTS:
            continue
        try:
            value = json.loads(raw)
        except json.JSONDecodeError:
            value = raw
        out.setdefault(section, {})[key] = value
    return out


@dataclass
class RunConfig:
    root: Path
    data: dict = field(default_factory=dict)

    def section(self, name: str) -> dict:
        return self.data[name]

    def path(self, key: str) -> Path:
        value = self.data["paths"][key]
        p = Path(value)
        return p if p.is_absolute() else self.root / p

    def train_config(self) -> TrainConfig:
        t = self.data["train"]
        return TrainConfig(
            epochs=t["epochs"],
            batch_size=t["batch_size"],
            learning_rate=t["learning_rate"],
            patience=t["patience"],
        )

    def text_model_config(self) -> TextModelConfig:
        t = self.data["text"]
        return TextModelConfig(
            recurrent_layers=tuple(t["recurrent_layers"]),
            dropout=t["dropout"],
            max_tokens=t["max_tokens"],
            train=self.train_config(),
        )

    def audio_feature_params(self) -> AudioFeatureParams:
        a = self.data["audio"]
        from polyfuse.audio.functionals import FUNCTIONAL_NAMES

        functionals = ("mean",) if a["mean_only"] else FUNCTIONAL_NAMES
        return AudioFeatureParams(
            frame_len=a["frame_len"],
            hop=a["hop"],
            voiced_gate=a["voiced_gate"],
            voicing_threshold=a["voicing_threshold"],
            functionals=functionals,
        )

    def audio_model_config(self, input_dim: int) -> AudioModelConfig:
        return AudioModelConfig(
            input_dim=input_dim,
            hidden=tuple(self.data["audio"]["hidden"]),
            train=self.train_config(),
        )

    def visual_feature_params(self) -> VisualFeatureParams:
        v = self.data["visual"]
        return VisualFeatureParams(frames=v["frames"], height=v["height"], width=v["width"])

    def visual_model_config(self) -> VisualModelConfig:
        v = self.data["visual"]
        return VisualModelConfig(
            dense_layers=tuple(v["dense_layers"]),
            input_shape=(v["frames"], v["height"], v["width"]),
            train=self.train_config(),
        )

    def protocol_config(self) -> ProtocolConfig:
        f = self.data["fusion"]
        return ProtocolConfig(
            text=self.text_model_config(),
            audio=None,
            visual=self.visual_model_config(),
            early_hidden=tuple(f["early_hidden"]),
            early_dropout=f["early_dropout"],
            fusion_train=self.train_config(),
            late_kind=f["late_kind"],
            seed=self.data["train"]["seed"],
        )

    def jobs(self) -> list[FusionJob]:
        return [FusionJob.parse(j) for j in self.data["fusion"]["jobs"]]

    def modalities_in_jobs(self) -> tuple[str, ...]:
        needed = {m for job in self.jobs() for m in job.mset}
        from polyfuse.fusion.sets import canonical_order

        return canonical_order(needed)

    def effective_json(self) -> str:
        payload = {"root": str(self.root), **self.data}
        return json.dumps(payload, sort_keys=True, indent=2) + "\n"


def load_config(
    config_path: Optional[str | Path] = None,
    root: Optional[str | Path] = None,
    cli_overrides: Optional[dict] = None,
    environ: Optional[dict] = None,
) -> RunConfig:
    data = {k: dict(v) for k, v in DEFAULTS.items()}
    if config_path is not None:
        with open(config_path, "rb") as fh:
            file_data = tomllib.load(fh)
        unknown = set(file_data) - set(DEFAULTS)
        if unknown:
            raise ValueError(f"unknown config sections {sorted(unknown)}")
        data = _deep_merge(data, file_data)
    data = _deep_merge(data, _env_overrides(environ))
    if cli_overrides:
        data = _deep_merge(data, cli_overrides)

    if root is not None:
        base = Path(root)
    elif config_path is not None:
        base = Path(config_path).resolve().parent
    else:
        base = Path.cwd()
    return RunConfig(root=base, data=data)
