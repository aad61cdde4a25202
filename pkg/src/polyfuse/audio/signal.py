"""Audio input and framing.

Signals are mono float64 in [-1, 1]. Framing slices the signal into
overlapping windows and applies a Hann taper; the window is kept alongside
the frames so energy statistics can be window-power normalized (a constant
signal of amplitude a has RMS exactly a).

The default 25 ms hop fixes the descriptor rate at 40 per second.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np
import scipy.io.wavfile

from polyfuse import errors

SUPPORTED_RATES = (8000, 16000, 44100, 48000)
DEFAULT_FRAME_LEN = 0.050
DEFAULT_HOP = 0.025


@dataclass(frozen=True)
class AudioSignal:
    samples: np.ndarray  # (n,) float64 in [-1, 1]
    sample_rate: int

    def __post_init__(self):
        if self.sample_rate not in SUPPORTED_RATES:
            raise ValueError(
                f"sample rate {self.sample_rate} not in {SUPPORTED_RATES}"
            )
        if self.samples.ndim != 1:
            raise ValueError(f"expected mono signal, got shape {self.samples.shape}")
        if not np.isfinite(self.samples).all():
            raise ValueError("signal contains non-finite samples")
        peak = float(np.abs(self.samples).max()) if self.samples.size else 0.0
        if peak > 1.0 + 1e-6:
            raise ValueError(f"samples exceed [-1, 1] (peak {peak:.4g})")

    @property
    def duration(self) -> float:
        return self.samples.size / self.sample_rate

    def slice(self, start: float, end: float) -> "AudioSignal":
        i = max(0, int(round(start * self.sample_rate)))
        j = min(self.samples.size, int(round(end * self.sample_rate)))
        return AudioSignal(samples=self.samples[i:j], sample_rate=self.sample_rate)


@dataclass(frozen=True)
class FrameMatrix:
    """Hann-windowed overlapping frames of one signal."""

    frames: np.ndarray  # (n_frames, frame_samples) float64, window applied
    window: np.ndarray  # (frame_samples,) float64
    sample_rate: int
    frame_len: float
    hop: float

    @property
    def n_frames(self) -> int:
        return self.frames.shape[0]

    @property
    def rate(self) -> float:
        """Descriptor frames per second."""
        return 1.0 / self.hop


def read_wav(path: str | Path) -> AudioSignal:
    """Read PCM or float WAV; multi-channel input is averaged to mono."""
    try:
        rate, data = scipy.io.wavfile.read(str(path))
    except Exception as exc:
        raise errors.DecodeFailure(f"{path}: cannot read WAV: {exc}") from exc
    data = np.asarray(data)
    if data.ndim == 2:
        data = data.mean(axis=1)
    if data.dtype == np.int16:
        samples = data.astype(np.float64) / 32768.0
    elif data.dtype == np.int32:
        samples = data.astype(np.float64) / 2147483648.0
    elif data.dtype == np.uint8:
        samples = (data.astype(np.float64) - 128.0) / 128.0
    else:
        samples = data.astype(np.float64)
    return AudioSignal(samples=samples, sample_rate=int(rate))


def write_wav(path: str | Path, signal: AudioSignal) -> None:
    pcm = np.clip(signal.samples, -1.0, 1.0)
    scipy.io.wavfile.write(str(path), signal.sample_rate, (pcm * 32767).astype(np.int16))


def frame_signal(
    signal: AudioSignal,
    frame_len: float = DEFAULT_FRAME_LEN,
    hop: float = DEFAULT_HOP,
) -> FrameMatrix:
    """Slice into Hann-windowed frames.

    Frame count is floor((n_samples - frame_samples) / hop_samples) + 1.
    Raises TooShort when the signal does not fill one frame.
    """
    frame_samples = int(round(frame_len * signal.sample_rate))
    hop_samples = int(round(hop * signal.sample_rate))
    if frame_samples < 2 or hop_samples < 1:
        raise ValueError(f"degenerate framing: frame_len={frame_len}, hop={hop}")
    n = signal.samples.size
    if n < frame_samples:
        raise errors.TooShort(
            f"signal of {n} samples shorter than one {frame_samples}-sample frame"
        )
    n_frames = (n - frame_samples) // hop_samples + 1
    window = np.hanning(frame_samples)
    strided = np.lib.stride_tricks.sliding_window_view(signal.samples, frame_samples)
    frames = strided[::hop_samples][:n_frames] * window
    return FrameMatrix(
        frames=np.ascontiguousarray(frames),
        window=window,
        sample_rate=signal.sample_rate,
        frame_len=frame_len,
        hop=hop,
    )
