"""Video decoding behind a minimal host-decoder interface.

Two backends: OpenCV for real containers (mp4/avi/...) and a raw NPZ
tensor format (arrays ``frames`` (T, H, W, 3) uint8 and scalar ``fps``)
that needs no codecs, used by the synthetic corpus generators. The
decoder identity and version are recorded in feature-cache metadata.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import cv2
import numpy as np

from polyfuse import errors


@dataclass(frozen=True)
class DecodedVideo:
    frames: np.ndarray  # (T, H, W, 3) uint8, RGB
    fps: float

    @property
    def duration(self) -> float:
        return self.frames.shape[0] / self.fps

    def frame_at(self, t: float) -> np.ndarray:
        """Nearest decoded frame to timestamp ``t`` (seconds)."""
        idx = int(round(t * self.fps - 0.5))
        idx = min(max(idx, 0), self.frames.shape[0] - 1)
        return self.frames[idx]


def decoder_identity(path: str | Path) -> tuple[str, str]:
    if str(path).endswith(".npz"):
        return ("npz", "1")
    return ("opencv", cv2.__version__)


def decode_video(path: str | Path) -> DecodedVideo:
    path = Path(path)
    if not path.exists():
        raise errors.DecodeFailure(f"{path}: no such file")
    if path.suffix == ".npz":
        return _decode_npz(path)
    return _decode_opencv(path)


def _decode_npz(path: Path) -> DecodedVideo:
    try:
        with np.load(path) as data:
            frames = np.asarray(data["frames"])
            fps = float(data["fps"])
    except Exception as exc:
        raise errors.DecodeFailure(f"{path}: bad raw-tensor video: {exc}") from exc
    if frames.ndim != 4 or frames.shape[-1] != 3 or frames.dtype != np.uint8:
        raise errors.DecodeFailure(
            f"{path}: raw-tensor video must be (T, H, W, 3) uint8, "
            f"got {frames.shape} {frames.dtype}"
        )
    if fps <= 0 or frames.shape[0] == 0:
        raise errors.DecodeFailure(f"{path}: empty stream or non-positive fps")
    return DecodedVideo(frames=frames, fps=fps)


def _decode_opencv(path: Path) -> DecodedVideo:
    capture = cv2.VideoCapture(str(path))
    if not capture.isOpened():
        raise errors.DecodeFailure(f"{path}: decoder cannot open stream")
    fps = capture.get(cv2.CAP_PROP_FPS)
    frames = []
    while True:
        ok, frame = capture.read()
        if not ok:
            break
        frames.append(cv2.cvtColor(frame, cv2.COLOR_BGR2RGB))
    capture.release()
    if not frames:
        raise errors.DecodeFailure(f"{path}: no decodable frames")
    if fps <= 0:
        fps = 25.0  # container did not report a rate
    return DecodedVideo(frames=np.stack(frames), fps=float(fps))


def write_npz_video(path: str | Path, frames: np.ndarray, fps: float) -> None:
    np.savez_compressed(str(path), frames=frames.astype(np.uint8), fps=np.float64(fps))


def write_mp4_video(path: str | Path, frames: np.ndarray, fps: float) -> None:
    h, w = frames.shape[1:3]
    writer = cv2.VideoWriter(
        str(path), cv2.VideoWriter_fourcc(*"mp4v"), fps, (w, h)
    )
    if not writer.isOpened():
        raise errors.DecodeFailure(f"{path}: encoder unavailable for mp4")
    for frame in frames:
        writer.write(cv2.cvtColor(frame.astype(np.uint8), cv2.COLOR_RGB2BGR))
    writer.release()
