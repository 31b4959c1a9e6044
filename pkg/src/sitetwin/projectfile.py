"""Project file schema: one self-contained JSON document per project.

Conventions: ISO-8601 dates, decimal workdays at 3 dp, money as integer
cents serialized as decimal strings. ``save_project`` then ``load_project``
reproduces the snapshot exactly (posteriors are derived from priors,
evidence, and the seed, so they never need to be stored).
"""

from __future__ import annotations

import datetime as dt
import json
from pathlib import Path

import numpy as np

from .costs import CostItem, CostLedger, LocalizationFactors
from .earned_value import BudgetItem, cents
from .errors import DanglingReference, SchemaError
from .graph import KnowledgeGraph
from .leveling import (
    DecisionLog,
    LevelTask,
    LevelingInstance,
    Objective,
    Recommendation,
    ResourcePool,
)
from .progress import ConfusionMatrix, MappingRecord, WbsQuantity
from .project_model import Activity, Calendar, PrecedenceRelation, build_network
from .state import ProjectMeta, TwinState
from .stochastic import BufferLedger, DurationPrior, Evidence, ForecastEntry
from . import whatif

SCHEMA_VERSION = 1


def money_str(value: int) -> str:
    sign = "-" if value < 0 else ""
    value = abs(value)
    return f"{sign}{value // 100}.{value % 100:02d}"


def _date(value: str, field: str) -> dt.date:
    try:
        return dt.date.fromisoformat(value)
    except (TypeError, ValueError):
        raise SchemaError(field, f"not an ISO date: {value!r}")


def _require(mapping, key, field):
    if key not in mapping:
        raise SchemaError(f"{field}.{key}", "missing required field")
    return mapping[key]


# serialization ---------------------------------------------------------------


def state_to_dict(state: TwinState) -> dict:
    meta = state.meta
    doc = {
        "schema_version": SCHEMA_VERSION,
        "metadata": {
            "name": meta.name,
            "region": meta.region,
            "seed": meta.seed,
            "start_date": meta.start_date.isoformat(),
            "current_week": meta.current_week,
            "feeding_buffer_days": meta.feeding_buffer_days,
            "project_buffer_days": meta.project_buffer_days,
        },
        "calendar": {
            "name": state.calendar.name,
            "workweek": Calendar.weekday_names(state.calendar.workweek),
            "exceptions": sorted(d.isoformat() for d in state.calendar.exceptions),
        },
        "activities": [
            {
                "id": a.id,
                "description": a.description,
                "wbs_code": a.wbs_code,
                "csi_division": a.csi_division,
                "baseline_duration": round(a.baseline_duration, 3),
                "resource_demands": {k: float(a.resource_demands[k]) for k in sorted(a.resource_demands)},
                "vendor_ids": list(a.vendor_ids),
                "crew_ids": list(a.crew_ids),
            }
            for a in state.network.activities
        ],
        "relations": [
            {
                "predecessor": r.predecessor,
                "successor": r.successor,
                "kind": r.kind,
                "lag": round(r.lag, 3),
            }
            for r in state.network.relations
        ],
        "resource_pools": [
            {
                "resource_id": p.resource_id,
                "regular_capacity": p.regular_capacity,
                "overtime_cap": p.overtime_cap,
                "overtime_rate_weight": p.overtime_rate_weight,
            }
            for p in state.pools
        ],
        "priors": {
            act_id: _prior_to_dict(prior) for act_id, prior in sorted(state.priors.items())
        },
        "evidence": [
            {
                "activity_id": e.activity_id,
                "week": e.week,
                "percent_complete": float(e.percent_complete),
                "elapsed": round(e.elapsed, 3),
                "likelihood_sd": e.likelihood_sd,
            }
            for e in state.evidence
        ],
        "duration_shifts": {k: round(v, 3) for k, v in sorted(state.duration_shifts.items())},
        "duration_factors": {k: v for k, v in sorted(state.duration_factors.items())},
        "budget_items": [
            {
                "item_id": b.item_id,
                "bac": money_str(b.bac),
                "planned_curve": {str(t): float(b.planned_curve[t]) for t in sorted(b.planned_curve)},
                "actuals": {str(t): money_str(b.actuals[t]) for t in sorted(b.actuals)},
            }
            for b in state.budget_items
        ],
        "measured_pc": [
            {"item_id": item, "period": period, "value": float(value)}
            for (item, period), value in sorted(state.measured_pc.items())
        ],
        "quantities": [
            {
                "wbs_id": q.wbs_id,
                "element_class": q.element_class,
                "planned_qty": float(q.planned_qty),
                "measured_qty": float(q.measured_qty),
                "unit": q.unit,
                "evidence_link": q.evidence_link,
            }
            for q in state.quantities
        ],
        "cost_items": [
            {
                "item_id": c.item_id,
                "csi_division": c.csi_division,
                "wbs_id": c.wbs_id,
                "material": money_str(c.material),
                "labor": money_str(c.labor),
                "equipment": money_str(c.equipment),
                "crew_hours": c.crew_hours,
                "mapping_confidence": c.mapping_confidence,
                "trade": c.trade,
            }
            for _, c in sorted(state.ledger.items.items())
        ],
        "localization": {
            "cci_factor": state.localization.cci_factor,
            "local_wage": _wage_to_dict(state.localization.local_wage),
            "national_wage": _wage_to_dict(state.localization.national_wage),
            "division_factors": None
            if state.localization.division_factors is None
            else {k: float(v) for k, v in sorted(state.localization.division_factors.items())},
        },
        "buffer_ledger": None
        if state.buffer_ledger is None
        else {
            "feeding_size": state.buffer_ledger.feeding_size,
            "project_size": state.buffer_ledger.project_size,
            "weeks": state.buffer_ledger.weeks,
            "feeding_deltas": state.buffer_ledger.feeding_deltas,
            "project_deltas": state.buffer_ledger.project_deltas,
        },
        "forecast_history": [
            {"week": f.week, "p50": float(f.p50), "p80": float(f.p80),
             "actual": None if f.actual is None else float(f.actual), "note": f.note}
            for f in state.forecast_history
        ],
        "scenarios": [_scenario_to_dict(s) for _, s in sorted(state.scenarios.items())],
        "knowledge_graph": {
            "nodes": [
                {"type": n.type, "id": n.id, "attrs": n.attrs}
                for n in sorted(state.graph.nodes.values(), key=lambda n: n.key)
            ],
            "edges": [
                {
                    "src_type": e.src[0],
                    "src": e.src[1],
                    "label": e.label,
                    "dst_type": e.dst[0],
                    "dst": e.dst[1],
                }
                for e in state.graph.edges
            ],
        },
        "decisions": [
            _recommendation_to_dict(r)
            for _, r in sorted(state.decisions.entries.items())
        ],
        "confusion_matrices": {
            name: {"classes": list(m.class_names), "counts": m.counts.tolist()}
            for name, m in sorted(state.confusion_matrices.items())
        },
        "iou": list(state.iou_rows),
        "mapping_records": [
            {
                "item_id": r.item_id,
                "csi_division": r.csi_division,
                "predicted_division": r.predicted_division,
                "gold_division": r.gold_division,
                "confidence": r.confidence,
                "review_minutes": r.review_minutes,
            }
            for r in state.mapping_records
        ],
        "leveling": None if state.leveling is None else _leveling_to_dict(state.leveling),
    }
    return doc


def _prior_to_dict(prior: DurationPrior) -> dict:
    if prior.kind == "triangular":
        return {"kind": "triangular", "a": float(prior.a), "m": float(prior.m), "b": float(prior.b)}
    return {"kind": "lognormal", "mean": float(prior.mean), "sd": float(prior.sd)}


def _wage_to_dict(wages):
    if wages is None:
        return None
    return {trade: money_str(rate) for trade, rate in sorted(wages.items())}


def _scenario_to_dict(s: whatif.Scenario) -> dict:
    return {
        "name": s.name,
        "notes": s.notes,
        "coupled_seed": s.coupled_seed,
        "operators": [operator_to_dict(op) for op in s.operators],
    }


def operator_to_dict(op) -> dict:
    if isinstance(op, whatif.PriceMultiplier):
        return {
            "op": "price_multiplier",
            "factor": op.factor,
            "divisions": list(op.divisions),
            "item_ids": list(op.item_ids),
        }
    if isinstance(op, whatif.DeliveryShift):
        return {"op": "delivery_shift", "activity_ids": list(op.activity_ids), "days": op.days}
    if isinstance(op, whatif.WeatherDays):
        return {"op": "weather_days", "dates": sorted(d.isoformat() for d in op.dates)}
    if isinstance(op, whatif.CapacityChange):
        return {
            "op": "capacity_change",
            "resource_id": op.resource_id,
            "delta_units": op.delta_units,
            "week_range": list(op.week_range),
        }
    if isinstance(op, whatif.ScopeChange):
        return {"op": "scope_change", "item_ids": list(op.item_ids), "factor": op.factor}
    if isinstance(op, whatif.Resequence):
        return {
            "op": "resequence",
            "add": [
                {"predecessor": r.predecessor, "successor": r.successor, "kind": r.kind, "lag": r.lag}
                for r in op.add
            ],
            "remove": [list(pair) for pair in op.remove],
        }
    raise SchemaError("scenario.operators", f"unsupported operator {type(op).__name__}")


def _recommendation_to_dict(r: Recommendation) -> dict:
    return {
        "action_id": r.action_id,
        "week": r.week,
        "summary": r.summary,
        "action": list(r.action),
        "predicted_delta_objective": r.predicted_delta_objective,
        "predicted_delta_overtime_hours": r.predicted_delta_overtime_hours,
        "adopted": r.adopted,
        "rejection_reason": r.rejection_reason,
    }


def _leveling_to_dict(inst: LevelingInstance) -> dict:
    return {
        "weeks": inst.weeks,
        "objective": {
            "w_span": inst.objective.w_span,
            "w_overtime": inst.objective.w_overtime,
            "w_idle": inst.objective.w_idle,
        },
        "tasks": [
            {
                "id": t.id,
                "duration": float(t.duration),
                "demands": {k: float(t.demands[k]) for k in sorted(t.demands)},
                "preds": list(t.preds),
            }
            for t in inst.tasks
        ],
    }


# deserialization -------------------------------------------------------------


def state_from_dict(doc: dict) -> TwinState:
    version = doc.get("schema_version")
    if version != SCHEMA_VERSION:
        raise SchemaError("schema_version", f"unsupported version {version!r}")
    raw_meta = _require(doc, "metadata", "$")
    meta = ProjectMeta(
        name=_require(raw_meta, "name", "metadata"),
        region=raw_meta.get("region", ""),
        seed=int(raw_meta.get("seed", 0)),
        start_date=_date(raw_meta.get("start_date", "2025-01-06"), "metadata.start_date"),
        current_week=int(raw_meta.get("current_week", 0)),
        feeding_buffer_days=float(raw_meta.get("feeding_buffer_days", 15.0)),
        project_buffer_days=float(raw_meta.get("project_buffer_days", 20.0)),
    )

    raw_cal = doc.get("calendar", {})
    try:
        workweek = frozenset(
            Calendar.weekday_index(n) for n in raw_cal.get("workweek", ["Mon", "Tue", "Wed", "Thu", "Fri"])
        )
    except ValueError as exc:
        raise SchemaError("calendar.workweek", str(exc))
    calendar = Calendar(
        name=raw_cal.get("name", "standard"),
        workweek=workweek,
        exceptions=frozenset(
            _date(d, "calendar.exceptions") for d in raw_cal.get("exceptions", [])
        ),
    )

    activities = []
    for i, raw in enumerate(doc.get("activities", [])):
        try:
            activities.append(
                Activity(
                    id=_require(raw, "id", f"activities[{i}]"),
                    description=raw.get("description", ""),
                    wbs_code=raw.get("wbs_code", ""),
                    csi_division=raw.get("csi_division", ""),
                    baseline_duration=float(raw.get("baseline_duration", 0.0)),
                    resource_demands=raw.get("resource_demands", {}),
                    vendor_ids=tuple(raw.get("vendor_ids", [])),
                    crew_ids=tuple(raw.get("crew_ids", [])),
                )
            )
        except ValueError as exc:
            raise SchemaError(f"activities[{i}]", str(exc))
    relations = []
    for i, raw in enumerate(doc.get("relations", [])):
        try:
            relations.append(
                PrecedenceRelation(
                    predecessor=_require(raw, "predecessor", f"relations[{i}]"),
                    successor=_require(raw, "successor", f"relations[{i}]"),
                    kind=raw.get("kind", "FS"),
                    lag=float(raw.get("lag", 0.0)),
                )
            )
        except ValueError as exc:
            raise SchemaError(f"relations[{i}]", str(exc))
    network = build_network(activities, relations)

    pools = tuple(
        ResourcePool(
            resource_id=_require(raw, "resource_id", f"resource_pools[{i}]"),
            regular_capacity=float(raw.get("regular_capacity", 0.0)),
            overtime_cap=float(raw.get("overtime_cap", 0.0)),
            overtime_rate_weight=float(raw.get("overtime_rate_weight", 1.0)),
        )
        for i, raw in enumerate(doc.get("resource_pools", []))
    )

    priors = {}
    for act_id, raw in doc.get("priors", {}).items():
        if act_id not in network.index:
            raise DanglingReference(act_id, "priors")
        priors[act_id] = _prior_from_dict(raw, f"priors.{act_id}")

    evidence = []
    for i, raw in enumerate(doc.get("evidence", [])):
        act_id = _require(raw, "activity_id", f"evidence[{i}]")
        if act_id not in network.index:
            raise DanglingReference(act_id, "evidence")
        evidence.append(
            Evidence(
                activity_id=act_id,
                week=int(_require(raw, "week", f"evidence[{i}]")),
                percent_complete=float(_require(raw, "percent_complete", f"evidence[{i}]")),
                elapsed=float(_require(raw, "elapsed", f"evidence[{i}]")),
                likelihood_sd=raw.get("likelihood_sd"),
            )
        )

    budget_items = []
    for i, raw in enumerate(doc.get("budget_items", [])):
        budget_items.append(
            BudgetItem(
                item_id=_require(raw, "item_id", f"budget_items[{i}]"),
                bac=cents(_require(raw, "bac", f"budget_items[{i}]")),
                planned_curve={int(t): float(v) for t, v in raw.get("planned_curve", {}).items()},
                actuals={int(t): cents(v) for t, v in raw.get("actuals", {}).items()},
            )
        )
    budget_ids = {b.item_id for b in budget_items}
    measured_pc = {}
    for i, raw in enumerate(doc.get("measured_pc", [])):
        item = _require(raw, "item_id", f"measured_pc[{i}]")
        if item not in budget_ids:
            raise DanglingReference(item, "measured_pc")
        measured_pc[(item, int(raw["period"]))] = float(raw["value"])

    quantities = tuple(
        WbsQuantity(
            wbs_id=_require(raw, "wbs_id", f"quantities[{i}]"),
            element_class=raw.get("element_class", ""),
            planned_qty=float(_require(raw, "planned_qty", f"quantities[{i}]")),
            measured_qty=float(_require(raw, "measured_qty", f"quantities[{i}]")),
            unit=raw.get("unit", ""),
            evidence_link=raw.get("evidence_link", ""),
        )
        for i, raw in enumerate(doc.get("quantities", []))
    )

    items = []
    for i, raw in enumerate(doc.get("cost_items", [])):
        try:
            items.append(
                CostItem(
                    item_id=_require(raw, "item_id", f"cost_items[{i}]"),
                    csi_division=_require(raw, "csi_division", f"cost_items[{i}]"),
                    wbs_id=raw.get("wbs_id", ""),
                    material=cents(raw.get("material", "0")),
                    labor=cents(raw.get("labor", "0")),
                    equipment=cents(raw.get("equipment", "0")),
                    crew_hours=raw.get("crew_hours"),
                    mapping_confidence=float(raw.get("mapping_confidence", 1.0)),
                    trade=raw.get("trade", "general"),
                )
            )
        except ValueError as exc:
            raise SchemaError(f"cost_items[{i}]", str(exc))
    ledger = CostLedger.from_items(items)

    raw_loc = doc.get("localization", {})
    localization = LocalizationFactors(
        cci_factor=float(raw_loc.get("cci_factor", 1.0)),
        local_wage=_wage_from_dict(raw_loc.get("local_wage")),
        national_wage=_wage_from_dict(raw_loc.get("national_wage")),
        division_factors=raw_loc.get("division_factors"),
    )

    raw_buf = doc.get("buffer_ledger")
    buffer_ledger = None
    if raw_buf is not None:
        buffer_ledger = BufferLedger(
            feeding_size=float(raw_buf.get("feeding_size", meta.feeding_buffer_days)),
            project_size=float(raw_buf.get("project_size", meta.project_buffer_days)),
            weeks=[int(w) for w in raw_buf.get("weeks", [])],
            feeding_deltas=[float(v) for v in raw_buf.get("feeding_deltas", [])],
            project_deltas=[float(v) for v in raw_buf.get("project_deltas", [])],
        )

    forecast_history = tuple(
        ForecastEntry(
            week=int(raw["week"]),
            p50=float(raw["p50"]),
            p80=float(raw["p80"]),
            actual=None if raw.get("actual") is None else float(raw["actual"]),
            note=raw.get("note", ""),
        )
        for raw in doc.get("forecast_history", [])
    )

    scenarios = {}
    for i, raw in enumerate(doc.get("scenarios", [])):
        scenario = scenario_from_dict(raw, field=f"scenarios[{i}]")
        scenarios[scenario.name] = scenario

    graph = KnowledgeGraph()
    raw_graph = doc.get("knowledge_graph", {"nodes": [], "edges": []})
    for raw in raw_graph.get("nodes", []):
        graph.add_node(raw["type"], raw["id"], raw.get("attrs", {}))
    for raw in raw_graph.get("edges", []):
        graph.add_edge(raw["src_type"], raw["src"], raw["label"], raw["dst_type"], raw["dst"])
    # reloaded graphs start with a clean audit trail
    graph.audit.clear()

    decisions = DecisionLog()
    for raw in doc.get("decisions", []):
        rec = Recommendation(
            action_id=raw["action_id"],
            week=int(raw["week"]),
            summary=raw.get("summary", ""),
            action=tuple(raw.get("action", ("noop",))),
            predicted_delta_objective=float(raw.get("predicted_delta_objective", 0.0)),
            predicted_delta_overtime_hours=float(raw.get("predicted_delta_overtime_hours", 0.0)),
            adopted=raw.get("adopted", "pending"),
            rejection_reason=raw.get("rejection_reason", ""),
        )
        decisions.entries[rec.week] = rec

    confusion = {}
    for name, raw in doc.get("confusion_matrices", {}).items():
        confusion[name] = ConfusionMatrix(
            class_names=tuple(raw["classes"]), counts=np.array(raw["counts"])
        )

    mapping_records = tuple(
        MappingRecord(
            item_id=raw["item_id"],
            csi_division=raw["csi_division"],
            predicted_division=raw["predicted_division"],
            gold_division=raw.get("gold_division"),
            confidence=float(raw.get("confidence", 1.0)),
            review_minutes=float(raw.get("review_minutes", 0.0)),
        )
        for raw in doc.get("mapping_records", [])
    )

    leveling = None
    raw_level = doc.get("leveling")
    if raw_level is not None:
        raw_obj = raw_level.get("objective", {})
        leveling = LevelingInstance(
            tasks=tuple(
                LevelTask(
                    id=t["id"],
                    duration=float(t["duration"]),
                    demands=t.get("demands", {}),
                    preds=tuple(t.get("preds", [])),
                )
                for t in raw_level.get("tasks", [])
            ),
            pools=pools,
            weeks=int(raw_level.get("weeks", 16)),
            objective=Objective(
                w_span=float(raw_obj.get("w_span", 0.0)),
                w_overtime=float(raw_obj.get("w_overtime", 1.0)),
                w_idle=float(raw_obj.get("w_idle", 0.0)),
            ),
        )

    return TwinState(
        meta=meta,
        network=network,
        calendar=calendar,
        pools=pools,
        priors=priors,
        evidence=tuple(evidence),
        duration_shifts={k: float(v) for k, v in doc.get("duration_shifts", {}).items()},
        duration_factors={k: float(v) for k, v in doc.get("duration_factors", {}).items()},
        budget_items=tuple(budget_items),
        measured_pc=measured_pc,
        quantities=quantities,
        ledger=ledger,
        localization=localization,
        buffer_ledger=buffer_ledger,
        forecast_history=forecast_history,
        scenarios=scenarios,
        graph=graph,
        decisions=decisions,
        confusion_matrices=confusion,
        iou_rows=tuple(doc.get("iou", [])),
        mapping_records=mapping_records,
        leveling=leveling,
    )


def _prior_from_dict(raw: dict, field: str) -> DurationPrior:
    kind = raw.get("kind")
    try:
        if kind == "triangular":
            return DurationPrior.triangular(float(raw["a"]), float(raw["m"]), float(raw["b"]))
        if kind == "lognormal":
            return DurationPrior.lognormal(float(raw["mean"]), float(raw["sd"]))
    except (KeyError, ValueError) as exc:
        raise SchemaError(field, str(exc))
    raise SchemaError(field, f"unknown prior kind {kind!r}")


def _wage_from_dict(raw):
    if raw is None:
        return None
    return {trade: cents(rate) for trade, rate in raw.items()}


def scenario_from_dict(raw: dict, field: str = "scenario") -> whatif.Scenario:
    operators = []
    for i, op in enumerate(raw.get("operators", [])):
        operators.append(operator_from_dict(op, f"{field}.operators[{i}]"))
    name = raw.get("name")
    if not name:
        raise SchemaError(f"{field}.name", "scenario name required")
    return whatif.Scenario(
        name=name,
        operators=tuple(operators),
        coupled_seed=bool(raw.get("coupled_seed", True)),
        notes=raw.get("notes", ""),
    )


def operator_from_dict(raw: dict, field: str):
    kind = raw.get("op")
    try:
        if kind == "price_multiplier":
            return whatif.PriceMultiplier(
                factor=float(raw["factor"]),
                divisions=tuple(raw.get("divisions", [])),
                item_ids=tuple(raw.get("item_ids", [])),
            )
        if kind == "delivery_shift":
            return whatif.DeliveryShift(
                activity_ids=tuple(raw["activity_ids"]), days=float(raw["days"])
            )
        if kind == "weather_days":
            return whatif.WeatherDays(
                dates=tuple(_date(d, field) for d in raw.get("dates", []))
            )
        if kind == "capacity_change":
            return whatif.CapacityChange(
                resource_id=raw["resource_id"],
                delta_units=float(raw["delta_units"]),
                week_range=tuple(raw.get("week_range", (0, 0))),
            )
        if kind == "scope_change":
            return whatif.ScopeChange(
                item_ids=tuple(raw["item_ids"]), factor=float(raw["factor"])
            )
        if kind == "resequence":
            return whatif.Resequence(
                add=tuple(
                    PrecedenceRelation(
                        predecessor=r["predecessor"],
                        successor=r["successor"],
                        kind=r.get("kind", "FS"),
                        lag=float(r.get("lag", 0.0)),
                    )
                    for r in raw.get("add", [])
                ),
                remove=tuple((p[0], p[1]) for p in raw.get("remove", [])),
            )
    except (KeyError, ValueError, TypeError) as exc:
        raise SchemaError(field, str(exc))
    raise SchemaError(field, f"unknown operator {kind!r}")


def save_project(state: TwinState, path: str | Path) -> None:
    doc = state_to_dict(state)
    Path(path).write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")


def load_project(path: str | Path) -> TwinState:
    try:
        doc = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise SchemaError("$", f"invalid JSON: {exc}")
    return state_from_dict(doc)
