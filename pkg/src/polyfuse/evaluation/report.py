"""Evaluation reports keyed by (fusion strategy, modality set).

JSON renders round-trip losslessly; text tables mirror the published
layout (per-configuration Positive/Negative/Average rows, accuracy on the
Average row) with every number rounded half-up to two decimals. Macro and
micro averages are both stored; the text table shows the macro row.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from polyfuse import errors
from polyfuse.evaluation.metrics import (
    CLASSES,
    ClassMetrics,
    ConfusionMatrix,
    MetricsEntry,
    round_half_up,
)

REPORT_SCHEMA_VERSION = 1

STRATEGY_TITLES = {
    "unimodal": "Unimodal",
    "early": "Early (feature-level) fusion",
    "late": "Late (decision-level) fusion",
}
# published row order: pairwise sets, the full set, then unimodal baselines
ROW_ORDER = ("A+V", "V+T", "A+T", "A+V+T", "T-Only", "A-Only", "V-Only")


def row_label(set_label: str) -> str:
    return f"{set_label}-Only" if "+" not in set_label else set_label


@dataclass(frozen=True)
class ReportEntry:
    strategy: str  # unimodal | early | late
    set_label: str  # e.g. "A+V+T" or "T"
    metrics: MetricsEntry

    @property
    def key(self) -> tuple[str, str]:
        return (self.strategy, self.set_label)


@dataclass
class EvaluationReport:
    entries: list[ReportEntry] = field(default_factory=list)
    metadata: dict = field(default_factory=dict)

    def entry(self, strategy: str, set_label: str) -> ReportEntry:
        for e in self.entries:
            if e.key == (strategy, set_label):
                return e
        raise KeyError((strategy, set_label))

    def add(self, strategy: str, set_label: str, metrics: MetricsEntry) -> None:
        self.entries.append(
            ReportEntry(strategy=strategy, set_label=set_label, metrics=metrics)
        )

    def to_dict(self) -> dict:
        return {
            "schema_version": REPORT_SCHEMA_VERSION,
            "metadata": self.metadata,
            "entries": [
                {
                    "strategy": e.strategy,
                    "set": e.set_label,
                    "metrics": e.metrics.as_dict(),
                }
                for e in sorted(self.entries, key=lambda e: e.key)
            ],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "EvaluationReport":
        payload = json.loads(text)
        report = cls(metadata=payload["metadata"])
        for item in payload["entries"]:
            report.add(item["strategy"], item["set"], _metrics_from_dict(item["metrics"]))
        return report


def _metrics_from_dict(d: dict) -> MetricsEntry:
    return MetricsEntry(
        per_class={c: ClassMetrics(**m) for c, m in d["per_class"].items()},
        macro=ClassMetrics(**d["macro"]),
        micro=ClassMetrics(**d["micro"]),
        accuracy=d["accuracy"],
        confusion=ConfusionMatrix(
            counts=tuple(tuple(row) for row in d["confusion"])
        ),
    )


def render_report(
    report: EvaluationReport,
    fmt: str = "text_table",
    require: list[tuple[str, str]] | None = None,
) -> str:
    """Render to 'text_table' or 'json'.

    ``require`` lists (strategy, set_label) pairs that must be present;
    a missing pair raises IncompleteReport.
    """
    if require:
        have = {e.key for e in report.entries}
        missing = [k for k in require if k not in have]
        if missing:
            raise errors.IncompleteReport(f"report is missing configurations {missing}")
    if fmt == "json":
        return report.to_json()
    if fmt == "text_table":
        return _render_text(report)
    raise ValueError(f"unknown report format {fmt!r}")


def _fmt(x: float) -> str:
    return f"{round_half_up(x, 2):.2f}"


def _render_text(report: EvaluationReport) -> str:
    lines: list[str] = []
    strategies = sorted({e.strategy for e in report.entries},
                        key=lambda s: list(STRATEGY_TITLES).index(s))
    unimodal_rows = {
        row_label(e.set_label): e for e in report.entries if e.strategy == "unimodal"
    }
    for strategy in strategies:
        entries = {row_label(e.set_label): e for e in report.entries if e.strategy == strategy}
        if strategy != "unimodal":
            # unimodal results accompany every fusion table as X-Only baselines
            entries.update(unimodal_rows)
        ordered = [label for label in ROW_ORDER if label in entries]
        ordered += sorted(set(entries) - set(ordered))
        lines.append(f"== {STRATEGY_TITLES[strategy]} ==")
        lines.append(
            f"{'Modality':<10}| {'Class':<9}| {'Precision':<10}| {'Recall':<7}| "
            f"{'F-measure':<10}| {'Accuracy':<8}"
        )
        for label in ordered:
            m = entries[label].metrics
            for cls in CLASSES:
                cm = m.per_class[cls]
                lines.append(
                    f"{label:<10}| {cls.capitalize():<9}| {_fmt(cm.precision):<10}| "
                    f"{_fmt(cm.recall):<7}| {_fmt(cm.f_measure):<10}| {'':<8}"
                )
            lines.append(
                f"{label:<10}| {'Average':<9}| {_fmt(m.macro.precision):<10}| "
                f"{_fmt(m.macro.recall):<7}| {_fmt(m.macro.f_measure):<10}| "
                f"{_fmt(m.accuracy):<8}"
            )
        lines.append("")
    return "\n".join(lines)
