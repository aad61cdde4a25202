"""Exception taxonomy shared across the toolkit.

Every error raised on a bad record carries enough context (record id,
file, dimension, ...) in its message to locate the offender.
"""

from __future__ import annotations


class PolyfuseError(Exception):
    """Base class for all toolkit errors."""


# ---------------------------------------------------------------- corpus

class ManifestError(PolyfuseError):
    """A corpus manifest failed validation."""


class SchemaVersionMismatch(ManifestError):
    pass


class MissingMedia(ManifestError):
    pass


class OverlappingUtterances(ManifestError):
    pass


class DanglingReference(ManifestError):
    pass


class DuplicateRecord(ManifestError):
    pass


class InvalidRecord(ManifestError):
    pass


class EmptyTranscript(ManifestError):
    pass


class NoAnnotations(PolyfuseError):
    pass


class InsufficientOverlap(PolyfuseError):
    pass


class TooFewSpeakers(PolyfuseError):
    pass


# ------------------------------------------------------------- pipelines

class TooShort(PolyfuseError):
    """Signal shorter than one analysis frame."""


class EmptyAfterGating(PolyfuseError):
    """Voiced gating removed every frame."""


class DecodeFailure(PolyfuseError):
    pass


class WindowOutOfRange(PolyfuseError):
    pass


class ShapeUnderflow(PolyfuseError):
    """Input too small for the convolution/pooling stack."""


class ShapeMismatch(PolyfuseError):
    pass


# -------------------------------------------------------------- training

class DegenerateLabels(PolyfuseError):
    """Training set contains a single class."""


class NonFiniteLoss(PolyfuseError):
    pass


# ---------------------------------------------------------------- fusion

class MissingModality(PolyfuseError):
    pass


class DimMismatch(PolyfuseError):
    pass


class UntrainedUnimodal(PolyfuseError):
    pass


class SetMismatch(PolyfuseError):
    pass


# ------------------------------------------------------------ evaluation

class LengthMismatch(PolyfuseError):
    pass


class EmptyInput(PolyfuseError):
    pass


class IncompleteReport(PolyfuseError):
    pass


class SpeakerLeakage(PolyfuseError):
    """A speaker contributes utterances to more than one split."""


# --------------------------------------------------------------- service

class ValidationError(PolyfuseError):
    """An annotation payload contains an out-of-enum value."""


class UnknownUtterance(PolyfuseError):
    pass


class UnknownAnnotator(PolyfuseError):
    pass
