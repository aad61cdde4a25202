"""Kernel backend selection.

The compiled extension is preferred when importable; the NumPy fallback is
always available. Set POLYFUSE_FORCE_NUMPY_KERNELS=1 to force the
fallback (used by the parity tests and the benchmark).
"""

from __future__ import annotations

import os

from polyfuse.audio import kernels_numpy

if os.environ.get("POLYFUSE_FORCE_NUMPY_KERNELS") == "1":
    _impl = kernels_numpy
else:
    try:
        from polyfuse.audio import _kernels as _impl  # type: ignore[no-redef]
    except ImportError:
        _impl = kernels_numpy

pitch_and_voicing = _impl.pitch_and_voicing
mfcc_from_power = _impl.mfcc_from_power
BACKEND_NAME: str = _impl.BACKEND_NAME


def available_backends() -> dict[str, object]:
    """Importable backends by name (for benchmarks and tests)."""
    backends: dict[str, object] = {"numpy": kernels_numpy}
    try:
        from polyfuse.audio import _kernels

        backends["compiled"] = _kernels
    except ImportError:
        pass
    return backends
