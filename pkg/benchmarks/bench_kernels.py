#!/usr/bin/env python3
"""Benchmark the compiled acoustic kernels against the NumPy fallback.

Times the two hot per-frame kernels (autocorrelation pitch search and the
mel/log/DCT pass) on a synthetic batch and reports speedups plus the
numeric agreement between backends.

    python benchmarks/bench_kernels.py [--frames 4000] [--repeats 5]
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from polyfuse.audio.backend import available_backends
from polyfuse.audio.llds import LOG_FLOOR, dct_matrix, mel_filterbank

SR = 16000
FRAME = 800  # 50 ms at 16 kHz
MIN_LAG, MAX_LAG = 32, 320  # 500 Hz .. 50 Hz


def make_frames(count: int, seed: int = 0) -> np.ndarray:
    rng = np.random.default_rng(seed)
    window = np.hanning(FRAME)
    t = np.arange(FRAME) / SR
    frames = np.empty((count, FRAME))
    for i in range(count):
        hz = rng.uniform(80, 400)
        x = rng.uniform(0.1, 0.5) * np.sin(2 * np.pi * hz * t + rng.uniform(0, 6.28))
        frames[i] = window * (x + rng.normal(0, 0.02, FRAME))
    return np.ascontiguousarray(frames)


def timed(fn, repeats: int) -> float:
    best = float("inf")
    for _ in range(repeats):
        start = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - start)
    return best


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--frames", type=int, default=4000)
    parser.add_argument("--repeats", type=int, default=5)
    args = parser.parse_args()

    backends = available_backends()
    print(f"backends available: {', '.join(backends)}")
    frames = make_frames(args.frames)
    mag = np.abs(np.fft.rfft(frames, axis=1))
    power = np.ascontiguousarray(mag**2)
    fb = np.ascontiguousarray(mel_filterbank(SR, mag.shape[1]))
    dct = np.ascontiguousarray(dct_matrix())

    results: dict[str, dict[str, float]] = {}
    outputs: dict[str, tuple] = {}
    for name, impl in backends.items():
        pitch_s = timed(lambda: impl.pitch_and_voicing(frames, MIN_LAG, MAX_LAG), args.repeats)
        mfcc_s = timed(lambda: impl.mfcc_from_power(power, fb, dct, LOG_FLOOR), args.repeats)
        results[name] = {"pitch": pitch_s, "mfcc": mfcc_s}
        outputs[name] = (
            impl.pitch_and_voicing(frames, MIN_LAG, MAX_LAG),
            impl.mfcc_from_power(power, fb, dct, LOG_FLOOR),
        )

    print(f"\n{args.frames} frames of {FRAME} samples (={args.frames / 40:.0f} s of audio at 40 fps)")
    print(f"{'kernel':<8} " + " ".join(f"{name:>12}" for name in results)
          + ("   speedup" if len(results) == 2 else ""))
    for kernel in ("pitch", "mfcc"):
        row = f"{kernel:<8} "
        times = [results[name][kernel] for name in results]
        row += " ".join(f"{t * 1e3:>10.1f}ms" for t in times)
        if len(times) == 2:
            row += f"   {times[0] / times[1]:>6.2f}x" if times[1] < times[0] else f"   {times[1] / times[0]:>6.2f}x (numpy faster)"
        print(row)

    if len(outputs) == 2:
        (l1, v1), m1 = outputs["numpy"]
        (l2, v2), m2 = outputs["compiled"]
        print("\nbackend agreement:")
        print(f"  pitch lag max |diff| = {np.abs(l1 - l2).max():.3e}")
        print(f"  voicing   max |diff| = {np.abs(v1 - v2).max():.3e}")
        print(f"  mfcc      max |diff| = {np.abs(m1 - m2).max():.3e}")


if __name__ == "__main__":
    main()
