"""Pure-NumPy implementations of the per-frame acoustic kernels.

This is the fallback backend used when the compiled extension is not
built. Autocorrelation goes through the frequency domain (Wiener-
Khinchin) instead of the compiled backend's direct lag loops; both routes
compute the same quantities to floating-point accuracy, which the backend
parity tests pin down.
"""

from __future__ import annotations

import numpy as np

SILENCE_ENERGY = 1e-12


def pitch_and_voicing(
    frames: np.ndarray, min_lag: int, max_lag: int
) -> tuple[np.ndarray, np.ndarray]:
    """Normalized-autocorrelation pitch lag and voicing per frame.

    Returns (lags, voicing): ``lags`` is the parabolic-refined peak lag in
    samples (0 for silent frames), ``voicing`` the normalized peak height
    clipped to [0, 1]. The peak is searched over [min_lag, max_lag].
    """
    n, m = frames.shape
    min_lag = max(min_lag, 2)
    max_lag = min(max_lag, m - 2)
    if max_lag < min_lag:
        raise ValueError(f"empty lag range [{min_lag}, {max_lag}] for frame size {m}")

    nfft = 1 << int(np.ceil(np.log2(2 * m)))
    spec = np.fft.rfft(frames, n=nfft, axis=1)
    acorr = np.fft.irfft(spec * np.conj(spec), n=nfft, axis=1)[:, : max_lag + 2]

    r0 = acorr[:, 0]
    silent = r0 < SILENCE_ENERGY

    search = acorr[:, min_lag : max_lag + 1]
    peak_idx = np.argmax(search, axis=1) + min_lag

    rows = np.arange(n)
    r_peak = acorr[rows, peak_idx]
    r_prev = acorr[rows, peak_idx - 1]
    r_next = acorr[rows, peak_idx + 1]

    denom = r_prev - 2.0 * r_peak + r_next
    with np.errstate(divide="ignore", invalid="ignore"):
        delta = np.where(denom != 0.0, 0.5 * (r_prev - r_next) / denom, 0.0)
    delta = np.clip(delta, -0.5, 0.5)
    # refinement needs both neighbors inside the searched range
    interior = (peak_idx > min_lag) & (peak_idx < max_lag)
    lags = peak_idx + np.where(interior, delta, 0.0)

    with np.errstate(divide="ignore", invalid="ignore"):
        voicing = np.where(silent, 0.0, r_peak / np.where(silent, 1.0, r0))
    voicing = np.clip(voicing, 0.0, 1.0)
    lags = np.where(silent, 0.0, lags)
    return lags.astype(np.float64), voicing.astype(np.float64)


def mfcc_from_power(
    power: np.ndarray, filterbank: np.ndarray, dct: np.ndarray, log_floor: float
) -> np.ndarray:
    """Mel filterbank energies -> log -> cosine transform, batched."""
    energies = power @ filterbank.T
    return np.log(energies + log_floor) @ dct.T


BACKEND_NAME = "numpy"
