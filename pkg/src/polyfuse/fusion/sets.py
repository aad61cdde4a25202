"""Modality subsets with a fixed canonical order: audio < visual < text."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

MODALITIES = ("audio", "visual", "text")
_LETTERS = {"audio": "A", "visual": "V", "text": "T"}
_FROM_LETTER = {v: k for k, v in _LETTERS.items()}


@dataclass(frozen=True)
class ModalitySet:
    modalities: tuple[str, ...]

    def __post_init__(self):
        if not self.modalities:
            raise ValueError("modality set must be non-empty")
        unknown = [m for m in self.modalities if m not in MODALITIES]
        if unknown:
            raise ValueError(f"unknown modalities {unknown}")
        canonical = tuple(m for m in MODALITIES if m in self.modalities)
        if canonical != self.modalities:
            raise ValueError(
                f"modalities must be unique and in canonical order {MODALITIES}, "
                f"got {self.modalities}"
            )

    @classmethod
    def of(cls, *modalities: str) -> "ModalitySet":
        return cls.parse("+".join(modalities))

    @classmethod
    def parse(cls, text: str) -> "ModalitySet":
        """Accepts 'A+V+T' letter form or 'audio+visual+text' names."""
        parts = [p.strip() for p in text.split("+") if p.strip()]
        names = {_FROM_LETTER.get(p.upper(), p.lower()) for p in parts}
        return cls(modalities=tuple(m for m in MODALITIES if m in names))

    @property
    def label(self) -> str:
        return "+".join(_LETTERS[m] for m in self.modalities)

    def __len__(self) -> int:
        return len(self.modalities)

    def __iter__(self):
        return iter(self.modalities)

    def __contains__(self, modality: str) -> bool:
        return modality in self.modalities


def canonical_order(modalities: Iterable[str]) -> tuple[str, ...]:
    wanted = set(modalities)
    return tuple(m for m in MODALITIES if m in wanted)
