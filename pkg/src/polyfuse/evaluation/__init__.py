"""Metrics, report rendering, and the speaker-independent protocol."""

from polyfuse.evaluation.metrics import (
    CLASSES,
    ClassMetrics,
    ConfusionMatrix,
    MetricsEntry,
    compute_metrics,
    f_measure,
    round_half_up,
)
from polyfuse.evaluation.protocol import (
    DEFAULT_JOBS,
    FusionJob,
    ProtocolConfig,
    ProtocolResult,
    run_protocol,
)
from polyfuse.evaluation.report import (
    EvaluationReport,
    ReportEntry,
    render_report,
    row_label,
)

__all__ = [
    "CLASSES",
    "ClassMetrics",
    "ConfusionMatrix",
    "DEFAULT_JOBS",
    "EvaluationReport",
    "FusionJob",
    "MetricsEntry",
    "ProtocolConfig",
    "ProtocolResult",
    "ReportEntry",
    "compute_metrics",
    "f_measure",
    "render_report",
    "round_half_up",
    "row_label",
    "run_protocol",
]
