"""Complete project snapshot: the single state object everything reads.

Posteriors are derived data: they are recomputed from (priors, evidence,
seed) plus any scenario-applied shifts, never stored, which keeps snapshots
cheap to clone and guarantees save/load round-trips reproduce them exactly.
"""

from __future__ import annotations

import datetime as dt
import hashlib
import json
from dataclasses import dataclass, field, replace
from typing import Mapping

from .costs import CostLedger, LocalizationFactors
from .earned_value import BudgetItem
from .graph import KnowledgeGraph
from .leveling import DecisionLog, LevelingInstance, ResourcePool
from .progress import ConfusionMatrix, MappingRecord, WbsQuantity
from .project_model import ActivityNetwork, Calendar
from .stochastic import (
    BufferLedger,
    DurationPosterior,
    DurationPrior,
    Evidence,
    ForecastEntry,
    bayesian_update,
    posterior_from_prior,
)


@dataclass(frozen=True)
class ProjectMeta:
    name: str
    region: str = ""
    seed: int = 0
    start_date: dt.date = dt.date(2025, 1, 6)
    current_week: int = 0
    feeding_buffer_days: float = 15.0
    project_buffer_days: float = 20.0


@dataclass
class TwinState:
    meta: ProjectMeta
    network: ActivityNetwork
    calendar: Calendar
    pools: tuple[ResourcePool, ...] = ()
    priors: dict[str, DurationPrior] = field(default_factory=dict)
    evidence: tuple[Evidence, ...] = ()
    duration_shifts: dict[str, float] = field(default_factory=dict)
    duration_factors: dict[str, float] = field(default_factory=dict)
    budget_items: tuple[BudgetItem, ...] = ()
    measured_pc: dict[tuple[str, int], float] = field(default_factory=dict)
    quantities: tuple[WbsQuantity, ...] = ()
    ledger: CostLedger = field(default_factory=CostLedger)
    localization: LocalizationFactors = field(default_factory=LocalizationFactors)
    buffer_ledger: BufferLedger | None = None
    forecast_history: tuple[ForecastEntry, ...] = ()
    scenarios: dict[str, object] = field(default_factory=dict)
    graph: KnowledgeGraph = field(default_factory=KnowledgeGraph)
    decisions: DecisionLog = field(default_factory=DecisionLog)
    confusion_matrices: dict[str, ConfusionMatrix] = field(default_factory=dict)
    iou_rows: tuple[dict, ...] = ()
    mapping_records: tuple[MappingRecord, ...] = ()
    leveling: LevelingInstance | None = None

    def clone(self) -> "TwinState":
        return TwinState(
            meta=self.meta,
            network=self.network,  # immutable after build
            calendar=self.calendar,
            pools=self.pools,
            priors=dict(self.priors),
            evidence=self.evidence,
            duration_shifts=dict(self.duration_shifts),
            duration_factors=dict(self.duration_factors),
            budget_items=self.budget_items,
            measured_pc=dict(self.measured_pc),
            quantities=self.quantities,
            ledger=self.ledger.clone(),
            localization=self.localization,
            buffer_ledger=self.buffer_ledger,
            forecast_history=self.forecast_history,
            scenarios=dict(self.scenarios),
            graph=self.graph.clone(),
            decisions=DecisionLog(dict(self.decisions.entries)),
            confusion_matrices=dict(self.confusion_matrices),
            iou_rows=self.iou_rows,
            mapping_records=self.mapping_records,
            leveling=self.leveling,
        )

    def posteriors(self, week: int | None = None) -> dict[str, DurationPosterior]:
        """Duration posteriors as of a week (default: the current week).

        Each activity starts from its prior (a fixed point mass at the
        baseline duration when no prior is declared), absorbs evidence up to
        the week in week order, then applies any scenario shift/scale.
        """
        week = self.meta.current_week if week is None else week
        out: dict[str, DurationPosterior] = {}
        by_activity: dict[str, list[Evidence]] = {}
        for ev in self.evidence:
            if ev.week <= week:
                by_activity.setdefault(ev.activity_id, []).append(ev)
        for act in self.network.activities:
            prior = self.priors.get(act.id)
            if prior is None:
                prior = DurationPrior.triangular(
                    act.baseline_duration, act.baseline_duration, act.baseline_duration
                )
            post = posterior_from_prior(prior, act.id, self.meta.seed)
            for ev in sorted(by_activity.get(act.id, []), key=lambda e: e.week):
                post = bayesian_update(post, ev)
            factor = self.duration_factors.get(act.id)
            if factor is not None:
                post = post.scaled(factor)
            shift = self.duration_shifts.get(act.id)
            if shift is not None:
                post = post.shifted(shift)
            out[act.id] = post
        return out

    def baseline_durations(self) -> dict[str, float]:
        return {a.id: a.baseline_duration for a in self.network.activities}

    def input_hash(self) -> str:
        """Content hash of the snapshot, echoed into every report."""
        from .projectfile import state_to_dict

        payload = json.dumps(state_to_dict(self), sort_keys=True)
        return hashlib.sha256(payload.encode()).hexdigest()[:16]

    def semantically_equal(self, other: "TwinState") -> bool:
        from .projectfile import state_to_dict

        return state_to_dict(self) == state_to_dict(other)

    def with_week(self, week: int) -> "TwinState":
        out = self.clone()
        out.meta = replace(self.meta, current_week=week)
        return out
