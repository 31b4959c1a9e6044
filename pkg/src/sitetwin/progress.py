"""Quantity reconciliation, percent-complete fusion, and quality metrics.

All computations here are pure functions over ingested evidence: measured
quantities, scan/vision status signals, confusion matrices, and reviewed
cost-mapping records. Rounding happens only at report boundaries (half-up at
the printed precision); full precision is kept internally.
"""

from __future__ import annotations

from dataclasses import dataclass
from decimal import ROUND_HALF_UP, Decimal
from typing import Mapping, Sequence

import numpy as np

from .divisions import is_known_division
from .errors import EmptyMatrix, NoEvidence, NoGoldLabels, UnitMismatch, ZeroPlanned


def round_half_up(value: float, places: int = 2) -> float:
    q = Decimal(1).scaleb(-places)
    out = float(Decimal(repr(float(value))).quantize(q, rounding=ROUND_HALF_UP))
    return out + 0.0  # squash negative zero


@dataclass(frozen=True)
class WbsQuantity:
    wbs_id: str
    element_class: str
    planned_qty: float
    measured_qty: float
    unit: str
    evidence_link: str = ""
    measured_unit: str | None = None

    def __post_init__(self):
        if self.planned_qty <= 0:
            raise ZeroPlanned(f"{self.wbs_id}: planned quantity must be > 0")
        if self.measured_unit is not None and self.measured_unit != self.unit:
            raise UnitMismatch(f"{self.wbs_id}: {self.unit} vs {self.measured_unit}")


def reconcile(q: WbsQuantity) -> tuple[float, float]:
    """Measured-minus-planned delta, absolute and as percent (2 decimals)."""
    delta = q.measured_qty - q.planned_qty
    pct = round_half_up(100.0 * delta / q.planned_qty, 2)
    return delta, pct


def percent_complete_from_quantity(q: WbsQuantity) -> float:
    """Quantity-based completion, capped at 1 so overshoot never earns > BAC."""
    return min(1.0, q.measured_qty / q.planned_qty)


@dataclass(frozen=True)
class ProgressObservation:
    activity_id: str
    period: int
    scan_pc: float | None = None
    cv_pc: float | None = None
    source_weights: tuple[float, float] = (2.0, 1.0)

    def __post_init__(self):
        if self.scan_pc is None and self.cv_pc is None:
            raise NoEvidence(f"{self.activity_id} period {self.period}: no sources")
        for v in (self.scan_pc, self.cv_pc):
            if v is not None and not (0.0 <= v <= 1.0):
                raise ValueError("percent complete must be in [0, 1]")
        if min(self.source_weights) < 0:
            raise ValueError("source weights must be >= 0")


def fuse_percent_complete(
    obs: ProgressObservation, previous: float | None = None
) -> tuple[float, list[str]]:
    """Weighted mean of present sources, clamped non-decreasing vs previous."""
    num = 0.0
    den = 0.0
    if obs.scan_pc is not None:
        num += obs.source_weights[0] * obs.scan_pc
        den += obs.source_weights[0]
    if obs.cv_pc is not None:
        num += obs.source_weights[1] * obs.cv_pc
        den += obs.source_weights[1]
    if den == 0:
        raise NoEvidence(f"{obs.activity_id}: all source weights zero")
    fused = num / den
    warnings = []
    if previous is not None and fused < previous:
        warnings.append(
            f"{obs.activity_id} period {obs.period}: fused {fused:.4f} below prior "
            f"{previous:.4f}; clamped (cumulative progress cannot regress)"
        )
        fused = previous
    return fused, warnings


class ProgressFuser:
    """Stateful wrapper applying the monotone clamp per activity over periods."""

    def __init__(self):
        self._last: dict[str, float] = {}
        self.warnings: list[str] = []

    def ingest(self, obs: ProgressObservation) -> float:
        fused, warns = fuse_percent_complete(obs, self._last.get(obs.activity_id))
        self.warnings.extend(warns)
        self._last[obs.activity_id] = fused
        return fused


@dataclass(frozen=True)
class ConfusionMatrix:
    """Square count grid, rows = predicted, columns = actual."""

    class_names: tuple[str, ...]
    counts: np.ndarray

    def __post_init__(self):
        counts = np.asarray(self.counts, dtype=np.int64)
        if counts.ndim != 2 or counts.shape[0] != counts.shape[1]:
            raise ValueError("confusion matrix must be square")
        if counts.shape[0] != len(self.class_names):
            raise ValueError("class names must match matrix size")
        if (counts < 0).any():
            raise ValueError("counts must be >= 0")
        object.__setattr__(self, "class_names", tuple(self.class_names))
        object.__setattr__(self, "counts", counts)

    @property
    def support(self) -> np.ndarray:
        return self.counts.sum(axis=0)


def classification_metrics(matrix: ConfusionMatrix) -> dict:
    """Per-class precision/recall/F1 plus macro averages and micro accuracy.

    Zero-denominator cells contribute 0 and flag the class instead of raising
    so partial matrices stay reportable.
    """
    counts = matrix.counts
    total = int(counts.sum())
    if total == 0:
        raise EmptyMatrix("confusion matrix has no observations")
    diag = np.diag(counts).astype(float)
    row_totals = counts.sum(axis=1).astype(float)
    col_totals = counts.sum(axis=0).astype(float)
    per_class = {}
    zero_support = []
    for i, name in enumerate(matrix.class_names):
        precision = diag[i] / row_totals[i] if row_totals[i] > 0 else 0.0
        recall = diag[i] / col_totals[i] if col_totals[i] > 0 else 0.0
        f1 = 2 * precision * recall / (precision + recall) if precision + recall > 0 else 0.0
        if row_totals[i] == 0 or col_totals[i] == 0:
            zero_support.append(name)
        per_class[name] = {"precision": precision, "recall": recall, "f1": f1}
    accuracy = float(diag.sum()) / total
    k = len(matrix.class_names)
    return {
        "per_class": per_class,
        "macro": {
            "precision": sum(m["precision"] for m in per_class.values()) / k,
            "recall": sum(m["recall"] for m in per_class.values()) / k,
            "f1": sum(m["f1"] for m in per_class.values()) / k,
        },
        "micro": {"precision": accuracy, "recall": accuracy, "f1": accuracy},
        "accuracy": accuracy,
        "zero_support": zero_support,
    }


def iou_aggregate(per_class: Sequence[Mapping]) -> dict:
    """Macro (unweighted) and micro (pixel-weighted) IoU aggregates."""
    ious = np.array([row["iou"] for row in per_class], dtype=float)
    supports = np.array([row["support_px"] for row in per_class], dtype=float)
    return {
        "macro": float(ious.mean()),
        "micro": float((ious * supports).sum() / supports.sum()),
    }


@dataclass(frozen=True)
class MappingRecord:
    item_id: str
    csi_division: str
    predicted_division: str
    gold_division: str | None
    confidence: float
    review_minutes: float = 0.0

    def __post_init__(self):
        for div in (self.predicted_division, self.gold_division):
            if div is not None and not is_known_division(div):
                raise ValueError(f"{self.item_id}: unknown division {div!r}")
        if not (0.0 <= self.confidence <= 1.0):
            raise ValueError(f"{self.item_id}: confidence must be in [0, 1]")


def mapping_evaluation(records: Sequence[MappingRecord]) -> dict:
    """One-vs-rest division metrics with support-weighted averages."""
    gold = [r for r in records if r.gold_division is not None]
    if not gold:
        raise NoGoldLabels("no records carry gold labels")
    divisions = sorted({r.gold_division for r in gold} | {r.predicted_division for r in gold})
    per_division = {}
    for div in divisions:
        tp = sum(1 for r in gold if r.predicted_division == div and r.gold_division == div)
        fp = sum(1 for r in gold if r.predicted_division == div and r.gold_division != div)
        fn = sum(1 for r in gold if r.gold_division == div and r.predicted_division != div)
        support = tp + fn
        precision = tp / (tp + fp) if tp + fp else 0.0
        recall = tp / support if support else 0.0
        f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
        minutes = [r.review_minutes for r in gold if r.gold_division == div]
        per_division[div] = {
            "support": support,
            "precision": precision,
            "recall": recall,
            "f1": f1,
            "mean_review_minutes": sum(minutes) / len(minutes) if minutes else 0.0,
        }
    rows = [m for m in per_division.values() if m["support"] > 0]
    weighted = support_weighted_average(rows)
    return {"per_division": per_division, "weighted": weighted}


def support_weighted_average(rows: Sequence[Mapping]) -> dict:
    """Support-weighted precision/recall/F1 over per-division metric rows."""
    total = sum(r["support"] for r in rows)
    if total == 0:
        raise NoGoldLabels("zero total support")
    out = {}
    for key in ("precision", "recall", "f1"):
        out[key] = sum(r[key] * r["support"] for r in rows) / total
    out["support"] = total
    return out
