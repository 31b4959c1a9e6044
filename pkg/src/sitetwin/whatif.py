"""Scenario operators over a project snapshot and coupled-seed evaluation.

A scenario is an ordered list of operators applied to a clone of the base
state. Evaluation runs the Monte-Carlo schedule on base and modified states
with the SAME seed; per-trial substreams and per-activity draw positions are
identical, so an empty scenario yields exactly zero deltas and pure-delay
operators move the finish monotonically.

Finish deltas are reported in calendar days at the project start-date
boundary (workday quantiles are mapped through each state's calendar), which
is how added weather exceptions show up as finish slip.
"""

from __future__ import annotations

import datetime as dt
from dataclasses import dataclass, replace
from typing import Sequence

from .errors import AcyclicityViolation, UnknownTarget
from .project_model import PrecedenceRelation, build_network, calendar_offset
from .state import TwinState
from .costs import ledger_delta
from .stochastic import criticality_index, quantile, run_mcs
from .errors import CycleError

ASSUMED_COST_SPREAD = 1.3


@dataclass(frozen=True)
class PriceMultiplier:
    factor: float
    divisions: tuple[str, ...] = ()
    item_ids: tuple[str, ...] = ()

    def __post_init__(self):
        if self.factor <= 0:
            raise ValueError("price factor must be > 0")


@dataclass(frozen=True)
class DeliveryShift:
    activity_ids: tuple[str, ...]
    days: float


@dataclass(frozen=True)
class WeatherDays:
    dates: tuple[dt.date, ...]


@dataclass(frozen=True)
class CapacityChange:
    resource_id: str
    delta_units: float
    week_range: tuple[int, int] = (0, 0)


@dataclass(frozen=True)
class ScopeChange:
    item_ids: tuple[str, ...]
    factor: float

    def __post_init__(self):
        if self.factor <= 0:
            raise ValueError("scope factor must be > 0")


@dataclass(frozen=True)
class Resequence:
    add: tuple[PrecedenceRelation, ...] = ()
    remove: tuple[tuple[str, str], ...] = ()  # (predecessor, successor)


Operator = PriceMultiplier | DeliveryShift | WeatherDays | CapacityChange | ScopeChange | Resequence


@dataclass(frozen=True)
class Scenario:
    name: str
    operators: tuple[Operator, ...] = ()
    coupled_seed: bool = True
    notes: str = ""


@dataclass(frozen=True)
class ScenarioResult:
    name: str
    dfinish_p50: float
    dfinish_p80: float
    dcost_p50: int  # cents
    dcost_p80: int
    affected_divisions: tuple[str, ...]
    notes: str = ""
    seed: int = 0
    n_trials: int = 0
    assumed_cost_spread: bool = False


def apply_scenario(base: TwinState, scenario: Scenario) -> TwinState:
    """Pure transformation: returns a modified clone, base untouched."""
    state = base.clone()
    for op in scenario.operators:
        _apply_operator(state, op)
    return state


def _apply_operator(state: TwinState, op) -> None:
    if isinstance(op, PriceMultiplier):
        ids = list(op.item_ids)
        for division in op.divisions:
            ids.extend(state.ledger.items_in_division(division))
        unknown = [i for i in ids if i not in state.ledger.items]
        if unknown:
            raise UnknownTarget(f"cost items {unknown}")
        if not ids:
            raise UnknownTarget("price multiplier matched no items")
        state.ledger.scale_items(sorted(set(ids)), op.factor)
    elif isinstance(op, DeliveryShift):
        for act_id in op.activity_ids:
            if act_id not in state.network.index:
                raise UnknownTarget(f"activity {act_id!r}")
            state.duration_shifts[act_id] = state.duration_shifts.get(act_id, 0.0) + op.days
    elif isinstance(op, WeatherDays):
        state.calendar = state.calendar.with_exceptions(op.dates)
    elif isinstance(op, CapacityChange):
        pools = []
        found = False
        for pool in state.pools:
            if pool.resource_id == op.resource_id:
                found = True
                new_cap = pool.regular_capacity + op.delta_units
                if new_cap < 0:
                    raise ValueError("capacity cannot go negative")
                pools.append(replace(pool, regular_capacity=new_cap))
                if op.delta_units < 0 and new_cap > 0:
                    # fewer crews: demanding activities slow proportionally
                    factor = pool.regular_capacity / new_cap
                    for act in state.network.activities:
                        if op.resource_id in act.resource_demands:
                            prev = state.duration_factors.get(act.id, 1.0)
                            state.duration_factors[act.id] = prev * factor
            else:
                pools.append(pool)
        if not found:
            raise UnknownTarget(f"resource {op.resource_id!r}")
        state.pools = tuple(pools)
    elif isinstance(op, ScopeChange):
        unknown = [i for i in op.item_ids if i not in state.ledger.items]
        if unknown:
            raise UnknownTarget(f"cost items {unknown}")
        state.ledger.scale_items(op.item_ids, op.factor)
        wbs_ids = {state.ledger.items[i].wbs_id for i in op.item_ids}
        for act in state.network.activities:
            if act.wbs_code in wbs_ids:
                prev = state.duration_factors.get(act.id, 1.0)
                state.duration_factors[act.id] = prev * op.factor
    elif isinstance(op, Resequence):
        keep = [
            r
            for r in state.network.relations
            if (r.predecessor, r.successor) not in set(op.remove)
        ]
        for pred, succ in op.remove:
            if not any(
                r.predecessor == pred and r.successor == succ for r in state.network.relations
            ):
                raise UnknownTarget(f"relation {pred}->{succ}")
        try:
            state.network = build_network(state.network.activities, keep + list(op.add))
        except CycleError as exc:
            raise AcyclicityViolation(str(exc)) from exc
    else:
        raise UnknownTarget(f"unsupported operator {type(op).__name__}")


def touched_targets(state: TwinState, scenario: Scenario) -> dict:
    """Item ids and activity ids a scenario touches, plus their divisions."""
    items: set[str] = set()
    activities: set[str] = set()
    for op in scenario.operators:
        if isinstance(op, PriceMultiplier):
            items.update(op.item_ids)
            for division in op.divisions:
                items.update(state.ledger.items_in_division(division))
        elif isinstance(op, ScopeChange):
            items.update(op.item_ids)
        elif isinstance(op, DeliveryShift):
            activities.update(op.activity_ids)
        elif isinstance(op, CapacityChange):
            activities.update(
                a.id for a in state.network.activities if op.resource_id in a.resource_demands
            )
        elif isinstance(op, Resequence):
            for rel in op.add:
                activities.update((rel.predecessor, rel.successor))
            for pred, succ in op.remove:
                activities.update((pred, succ))
    divisions = {state.ledger.items[i].csi_division for i in items if i in state.ledger.items}
    for act_id in activities:
        if act_id in state.network.index:
            division = state.network.activity(act_id).csi_division
            if division:
                divisions.add(division)
    return {"items": sorted(items), "activities": sorted(activities), "divisions": sorted(divisions)}


def evaluate(
    base: TwinState,
    scenario: Scenario,
    n_trials: int = 20_000,
    seed: int | None = None,
    p80_cost_factor: float = ASSUMED_COST_SPREAD,
    delta_mode: str = "quantile_difference",
) -> ScenarioResult:
    """Coupled-seed delta evaluation against the base snapshot.

    delta_mode selects the finish-delta estimator: "quantile_difference"
    (default) reports modified-minus-base quantiles in calendar days;
    "difference_quantile" reports quantiles of the per-trial paired
    differences, in workdays (an experimental alternative; the pairing is
    exact because both runs share trial substreams).
    """
    seed = base.meta.seed if seed is None else seed
    week = base.meta.current_week
    modified = apply_scenario(base, scenario)

    base_dist = run_mcs(
        base.network, base.posteriors(week), base.calendar, n_trials=n_trials, seed=seed
    )
    mod_dist = run_mcs(
        modified.network, modified.posteriors(week), modified.calendar, n_trials=n_trials, seed=seed
    )
    start = base.meta.start_date
    deltas = {}
    if delta_mode == "difference_quantile":
        paired = mod_dist.trial_finishes - base_dist.trial_finishes
        import numpy as np

        for label, p in (("p50", 0.5), ("p80", 0.8)):
            deltas[label] = float(np.quantile(paired, p))
    elif delta_mode == "quantile_difference":
        for label, p in (("p50", 0.5), ("p80", 0.8)):
            base_days = calendar_offset(start, quantile(base_dist, p), base.calendar)
            mod_days = calendar_offset(start, quantile(mod_dist, p), modified.calendar)
            deltas[label] = mod_days - base_days
    else:
        raise ValueError(f"unknown delta_mode {delta_mode!r}")

    cost = ledger_delta(base.ledger, modified.ledger)
    dcost_p50 = cost["total"]
    dcost_p80 = int(round(dcost_p50 * p80_cost_factor))
    return ScenarioResult(
        name=scenario.name,
        dfinish_p50=deltas["p50"],
        dfinish_p80=deltas["p80"],
        dcost_p50=dcost_p50,
        dcost_p80=dcost_p80,
        affected_divisions=tuple(touched_targets(base, scenario)["divisions"]),
        notes=scenario.notes,
        seed=seed,
        n_trials=n_trials,
        assumed_cost_spread=dcost_p50 != 0,
    )


def sensitivity_rank(results: Sequence[ScenarioResult]) -> list[ScenarioResult]:
    """Descending schedule impact; ties broken by cost impact (higher first)."""
    if not results:
        raise ValueError("need at least one scenario result")
    return sorted(results, key=lambda r: (-r.dfinish_p50, -r.dcost_p50, r.name))


def tornado_rows(results: Sequence[ScenarioResult]) -> list[tuple[str, float]]:
    return [(r.name, r.dfinish_p50) for r in sensitivity_rank(results)]


def criticality_join(
    state: TwinState, n_trials: int = 5_000, seed: int | None = None
) -> dict[str, float]:
    """Live criticality index map for graph queries."""
    seed = state.meta.seed if seed is None else seed
    dist = run_mcs(
        state.network,
        state.posteriors(),
        state.calendar,
        n_trials=n_trials,
        seed=seed,
    )
    return criticality_index(dist)
