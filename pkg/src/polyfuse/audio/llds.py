"""Per-frame low-level descriptor extraction.

Each frame yields twenty descriptor values:

  rms_energy        window-power-normalized RMS (constant a -> exactly a)
  log_energy        natural log of mean power, floored
  loudness          perceptual approximation rms**0.3
  pitch             autocorrelation peak in [50, 500] Hz, Hz (0 = silent)
  voicing           normalized autocorrelation peak height in [0, 1]
  spectral_centroid magnitude-weighted mean frequency, Hz
  spectral_flux     L2 distance between consecutive magnitude spectra
  spectral_flatness geometric/arithmetic mean ratio of nonzero magnitudes
  mfcc_01..mfcc_12  26-band mel filterbank, log, cosine transform

Silent frames take pitch 0, voicing 0, centroid 0, flatness 0 by
convention. The default functional layout covers 17 of the 20 tracks:
log_energy and loudness are monotone transforms of rms_energy and voicing
is the gating track, so they are excluded from the statistics layout.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from polyfuse.audio import backend
from polyfuse.audio.signal import FrameMatrix

PITCH_MIN_HZ = 50.0
PITCH_MAX_HZ = 500.0
N_MELS = 26
N_MFCC = 12
LOG_FLOOR = 1e-10
ENERGY_FLOOR = 1e-12

MFCC_NAMES = tuple(f"mfcc_{i:02d}" for i in range(1, N_MFCC + 1))
DESCRIPTOR_NAMES = (
    "rms_energy",
    "log_energy",
    "loudness",
    "pitch",
    "voicing",
    "spectral_centroid",
    "spectral_flux",
    "spectral_flatness",
) + MFCC_NAMES

DEFAULT_FUNCTIONAL_DESCRIPTORS = (
    "rms_energy",
    "pitch",
    "spectral_centroid",
    "spectral_flux",
    "spectral_flatness",
) + MFCC_NAMES

AUDIO_PIPELINE_VERSION = "audio-1"


@dataclass(frozen=True)
class LLDMatrix:
    values: np.ndarray  # (n_frames, n_descriptors) float64
    descriptor_names: tuple[str, ...]
    frame_hop: float
    sample_rate: int

    def __post_init__(self):
        if self.values.shape[1] != len(self.descriptor_names):
            raise ValueError(
                f"{self.values.shape[1]} columns vs "
                f"{len(self.descriptor_names)} descriptor names"
            )

    @property
    def n_frames(self) -> int:
        return self.values.shape[0]

    @property
    def rate(self) -> float:
        return 1.0 / self.frame_hop

    def column(self, name: str) -> np.ndarray:
        return self.values[:, self.descriptor_names.index(name)]


def flatness_ratio(values: np.ndarray) -> float:
    """Geometric over arithmetic mean of |values|, over nonzero entries.

    Restricting to nonzero entries keeps the ratio exactly invariant under
    positive scaling; all-zero input returns 0 by convention.
    """
    mags = np.abs(values)
    nonzero = mags[mags > 0]
    if nonzero.size == 0:
        return 0.0
    return float(np.exp(np.mean(np.log(nonzero))) / np.mean(nonzero))


@lru_cache(maxsize=8)
def mel_filterbank(sample_rate: int, n_fft_bins: int, n_mels: int = N_MELS) -> np.ndarray:
    """Triangular filters on a 2595*log10(1 + f/700) mel grid, 0..Nyquist."""
    n = 2 * (n_fft_bins - 1)
    freqs = np.arange(n_fft_bins) * sample_rate / n

    def to_mel(f):
        return 2595.0 * np.log10(1.0 + f / 700.0)

    def from_mel(m):
        return 700.0 * (10.0 ** (m / 2595.0) - 1.0)

    points = from_mel(np.linspace(to_mel(0.0), to_mel(sample_rate / 2.0), n_mels + 2))
    fb = np.zeros((n_mels, n_fft_bins))
    for j in range(n_mels):
        lo, center, hi = points[j], points[j + 1], points[j + 2]
        rising = (freqs - lo) / (center - lo)
        falling = (hi - freqs) / (hi - center)
        fb[j] = np.clip(np.minimum(rising, falling), 0.0, None)
    return fb


@lru_cache(maxsize=8)
def dct_matrix(n_coef: int = N_MFCC, n_mels: int = N_MELS) -> np.ndarray:
    """Orthonormal DCT-II rows for coefficients 1..n_coef (c0 skipped)."""
    j = np.arange(n_mels)
    rows = [
        np.sqrt(2.0 / n_mels) * np.cos(np.pi * k * (2 * j + 1) / (2.0 * n_mels))
        for k in range(1, n_coef + 1)
    ]
    return np.asarray(rows)


def extract_llds(frames: FrameMatrix) -> LLDMatrix:
    if frames.n_frames == 0:
        raise ValueError("no frames to extract descriptors from")
    x = frames.frames
    n, m = x.shape
    sr = frames.sample_rate
    window_power = float(np.sum(frames.window**2))

    power_mean = (x**2).sum(axis=1) / window_power
    rms = np.sqrt(power_mean)
    log_energy = np.log(power_mean + ENERGY_FLOOR)
    loudness = rms**0.3

    min_lag = int(np.floor(sr / PITCH_MAX_HZ))
    max_lag = int(np.ceil(sr / PITCH_MIN_HZ))
    lags, voicing = backend.pitch_and_voicing(x, min_lag, max_lag)
    with np.errstate(divide="ignore"):
        pitch = np.where(lags > 0, sr / np.where(lags > 0, lags, 1.0), 0.0)

    spectrum = np.fft.rfft(x, axis=1)
    mag = np.abs(spectrum)
    freqs = np.fft.rfftfreq(m, d=1.0 / sr)

    mag_sum = mag.sum(axis=1)
    with np.errstate(invalid="ignore"):
        centroid = np.where(mag_sum > 0, (mag * freqs).sum(axis=1) / np.where(mag_sum > 0, mag_sum, 1.0), 0.0)

    flux = np.zeros(n)
    if n > 1:
        flux[1:] = np.linalg.norm(np.diff(mag, axis=0), axis=1)

    flatness = np.asarray([flatness_ratio(row) for row in mag])

    fb = mel_filterbank(sr, mag.shape[1])
    dct = dct_matrix()
    mfcc = backend.mfcc_from_power(
        np.ascontiguousarray(mag**2),
        np.ascontiguousarray(fb),
        np.ascontiguousarray(dct),
        LOG_FLOOR,
    )

    values = np.column_stack(
        [rms, log_energy, loudness, pitch, voicing, centroid, flux, flatness, mfcc]
    )
    return LLDMatrix(
        values=values,
        descriptor_names=DESCRIPTOR_NAMES,
        frame_hop=frames.hop,
        sample_rate=sr,
    )
