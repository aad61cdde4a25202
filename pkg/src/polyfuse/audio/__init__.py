"""Acoustic pipeline: framing, low-level descriptors, functionals,
speaker normalization, and the acoustic classifier."""

from polyfuse.audio.backend import BACKEND_NAME, available_backends
from polyfuse.audio.functionals import (
    FUNCTIONAL_NAMES,
    FunctionalVector,
    apply_functionals,
)
from polyfuse.audio.llds import (
    AUDIO_PIPELINE_VERSION,
    DEFAULT_FUNCTIONAL_DESCRIPTORS,
    DESCRIPTOR_NAMES,
    LLDMatrix,
    extract_llds,
)
from polyfuse.audio.model import (
    AudioModelConfig,
    predict_audio,
    predict_audio_batch,
    train_audio_mlp,
)
from polyfuse.audio.normalize import SpeakerStats, speaker_zstandardize
from polyfuse.audio.signal import (
    AudioSignal,
    FrameMatrix,
    frame_signal,
    read_wav,
    write_wav,
)

__all__ = [
    "AUDIO_PIPELINE_VERSION",
    "AudioModelConfig",
    "AudioSignal",
    "BACKEND_NAME",
    "DEFAULT_FUNCTIONAL_DESCRIPTORS",
    "DESCRIPTOR_NAMES",
    "FUNCTIONAL_NAMES",
    "FrameMatrix",
    "FunctionalVector",
    "LLDMatrix",
    "SpeakerStats",
    "apply_functionals",
    "available_backends",
    "extract_llds",
    "frame_signal",
    "predict_audio",
    "predict_audio_batch",
    "read_wav",
    "speaker_zstandardize",
    "train_audio_mlp",
    "write_wav",
]
