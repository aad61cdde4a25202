"""Statistical functionals collapsing descriptor tracks to one vector.

Nine functionals per descriptor: arithmetic mean, quadratic mean,
standard deviation, flatness, skewness, kurtosis, and quartiles Q1/Q2/Q3.
Zero-variance convention: skewness and kurtosis of a constant track are 0.
Kurtosis is excess (normal data -> 0). With the voiced gate enabled, only
frames whose voicing exceeds the threshold enter the statistics.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from polyfuse import errors
from polyfuse.audio.llds import DEFAULT_FUNCTIONAL_DESCRIPTORS, LLDMatrix, flatness_ratio

FUNCTIONAL_NAMES = (
    "mean",
    "quadratic_mean",
    "std",
    "flatness",
    "skewness",
    "kurtosis",
    "q1",
    "q2",
    "q3",
)

DEFAULT_VOICING_THRESHOLD = 0.45
_VARIANCE_FLOOR = 1e-24


@dataclass(frozen=True)
class FunctionalVector:
    values: np.ndarray  # (total_dim,) float64
    layout: tuple[tuple[str, str], ...]  # (descriptor, functional) per entry

    def __post_init__(self):
        if self.values.shape != (len(self.layout),):
            raise ValueError(
                f"values shape {self.values.shape} vs layout length {len(self.layout)}"
            )
        if not np.isfinite(self.values).all():
            raise ValueError("functional vector contains non-finite entries")

    @property
    def total_dim(self) -> int:
        return len(self.layout)

    def layout_hash(self) -> str:
        h = hashlib.sha256()
        for descriptor, functional in self.layout:
            h.update(f"{descriptor}:{functional};".encode())
        return h.hexdigest()[:16]

    def value(self, descriptor: str, functional: str) -> float:
        return float(self.values[self.layout.index((descriptor, functional))])


def column_functionals(x: np.ndarray) -> np.ndarray:
    """The nine functionals of one descriptor track."""
    mean = float(np.mean(x))
    quadratic = float(np.sqrt(np.mean(x**2)))
    var = float(np.mean((x - mean) ** 2))
    std = float(np.sqrt(var))
    flat = flatness_ratio(x)
    if var < _VARIANCE_FLOOR:
        skew = kurt = 0.0
    else:
        centered = x - mean
        skew = float(np.mean(centered**3) / var**1.5)
        kurt = float(np.mean(centered**4) / var**2 - 3.0)
    q1, q2, q3 = (float(v) for v in np.percentile(x, [25, 50, 75]))
    return np.asarray([mean, quadratic, std, flat, skew, kurt, q1, q2, q3])


def apply_functionals(
    llds: LLDMatrix,
    voiced_gate: bool = False,
    voicing_threshold: float = DEFAULT_VOICING_THRESHOLD,
    descriptors: Optional[Sequence[str]] = None,
    functionals: Sequence[str] = FUNCTIONAL_NAMES,
) -> FunctionalVector:
    """Collapse an LLD matrix to a (|descriptors| * |functionals|) vector.

    Raises EmptyAfterGating when the voiced gate removes every frame.
    """
    if descriptors is None:
        descriptors = DEFAULT_FUNCTIONAL_DESCRIPTORS
    unknown = [d for d in descriptors if d not in llds.descriptor_names]
    if unknown:
        raise ValueError(f"unknown descriptors {unknown}")
    unknown_f = [f for f in functionals if f not in FUNCTIONAL_NAMES]
    if unknown_f:
        raise ValueError(f"unknown functionals {unknown_f}")

    if voiced_gate:
        keep = llds.column("voicing") > voicing_threshold
        if not keep.any():
            raise errors.EmptyAfterGating(
                f"no frame exceeds voicing threshold {voicing_threshold}"
            )
    else:
        keep = np.ones(llds.n_frames, dtype=bool)

    func_idx = [FUNCTIONAL_NAMES.index(f) for f in functionals]
    blocks: list[np.ndarray] = []
    layout: list[tuple[str, str]] = []
    for name in descriptors:
        stats = column_functionals(llds.column(name)[keep])
        blocks.append(stats[func_idx])
        layout.extend((name, f) for f in functionals)
    return FunctionalVector(values=np.concatenate(blocks), layout=tuple(layout))
