"""Fixed-shape frame tensors from utterance windows.

T timestamps are uniformly spaced inside [start, end); each takes the
nearest decoded frame, center-cropped to a square and resized to H x W,
with channels normalized to [0, 1]. The speaker faces the camera by
collection guideline, so the center crop is the default localization; a
face detector can be plugged in via ``locate``.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Optional

import cv2
import numpy as np

from polyfuse import errors
from polyfuse.visual.decode import DecodedVideo, decode_video

VISUAL_PIPELINE_VERSION = "visual-1"

DEFAULT_T = 16
DEFAULT_H = 64
DEFAULT_W = 64

# maps a full frame to the region of interest; default center square
Locator = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class FrameTensor:
    values: np.ndarray  # (T, H, W, 3) float32 in [0, 1]

    def __post_init__(self):
        if self.values.ndim != 4 or self.values.shape[-1] != 3:
            raise ValueError(f"expected (T, H, W, 3), got {self.values.shape}")
        if self.values.min() < 0.0 or self.values.max() > 1.0:
            raise ValueError("frame tensor values must lie in [0, 1]")

    @property
    def shape(self) -> tuple[int, int, int]:
        t, h, w, _ = self.values.shape
        return (t, h, w)


def center_square(frame: np.ndarray) -> np.ndarray:
    h, w = frame.shape[:2]
    side = min(h, w)
    top = (h - side) // 2
    left = (w - side) // 2
    return frame[top : top + side, left : left + side]


def uniform_timestamps(start: float, end: float, count: int) -> np.ndarray:
    return start + (end - start) * (np.arange(count) + 0.5) / count


def sample_frames(
    video: str | Path | DecodedVideo,
    start: float,
    end: float,
    t: int = DEFAULT_T,
    h: int = DEFAULT_H,
    w: int = DEFAULT_W,
    locate: Optional[Locator] = None,
) -> FrameTensor:
    """Raises WindowOutOfRange when [start, end) leaves the stream and
    DecodeFailure when the stream cannot be decoded."""
    decoded = video if isinstance(video, DecodedVideo) else decode_video(video)
    if start < 0 or end <= start or end > decoded.duration + 0.05:
        raise errors.WindowOutOfRange(
            f"window [{start}, {end}) outside stream of {decoded.duration:.3f} s"
        )
    locate = locate or center_square
    rows = []
    for ts in uniform_timestamps(start, end, t):
        frame = locate(decoded.frame_at(ts))
        resized = cv2.resize(frame, (w, h), interpolation=cv2.INTER_AREA)
        rows.append(resized.astype(np.float32) / 255.0)
    return FrameTensor(values=np.stack(rows))
