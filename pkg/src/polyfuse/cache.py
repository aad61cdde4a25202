"""Per-utterance feature cache: one NPZ tensor container plus a JSON
metadata sidecar per (modality, utterance).

The sidecar records utterance_id, modality, shape, dtype, pipeline_version
and a content hash of the inputs; a rebuild is skipped when both the
pipeline version and the content hash still match.
"""

from __future__ import annotations

import hashlib
import json
from pathlib import Path
from typing import Optional

import numpy as np


def entry_paths(cache_dir: str | Path, modality: str, utterance_id: str) -> tuple[Path, Path]:
    base = Path(cache_dir) / modality
    return base / f"{utterance_id}.npz", base / f"{utterance_id}.json"


def content_hash(*parts: bytes | str) -> str:
    h = hashlib.sha256()
    for part in parts:
        h.update(part.encode() if isinstance(part, str) else part)
        h.update(b"\x00")
    return h.hexdigest()[:32]


def file_hash(path: str | Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()[:32]


def write_entry(
    cache_dir: str | Path,
    modality: str,
    utterance_id: str,
    arrays: dict[str, np.ndarray],
    pipeline_version: str,
    content: str,
    extra_metadata: Optional[dict] = None,
) -> None:
    npz_path, json_path = entry_paths(cache_dir, modality, utterance_id)
    npz_path.parent.mkdir(parents=True, exist_ok=True)
    np.savez(npz_path, **arrays)
    primary = next(iter(arrays.values()))
    metadata = {
        "utterance_id": utterance_id,
        "modality": modality,
        "shape": list(primary.shape),
        "dtype": str(primary.dtype),
        "pipeline_version": pipeline_version,
        "content_hash": content,
    }
    if extra_metadata:
        metadata.update(extra_metadata)
    json_path.write_text(json.dumps(metadata, sort_keys=True, indent=2) + "\n", encoding="utf-8")


def read_entry(
    cache_dir: str | Path, modality: str, utterance_id: str
) -> tuple[dict[str, np.ndarray], dict]:
    npz_path, json_path = entry_paths(cache_dir, modality, utterance_id)
    metadata = json.loads(json_path.read_text(encoding="utf-8"))
    with np.load(npz_path) as data:
        arrays = {k: data[k] for k in data.files}
    return arrays, metadata


def entry_is_current(
    cache_dir: str | Path,
    modality: str,
    utterance_id: str,
    pipeline_version: str,
    content: str,
) -> bool:
    npz_path, json_path = entry_paths(cache_dir, modality, utterance_id)
    if not (npz_path.exists() and json_path.exists()):
        return False
    try:
        metadata = json.loads(json_path.read_text(encoding="utf-8"))
    except json.JSONDecodeError:
        return False
    return (
        metadata.get("pipeline_version") == pipeline_version
        and metadata.get("content_hash") == content
    )
