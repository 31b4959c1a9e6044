"""HTTP service consumed by the sandbox UI.

Read endpoints are pure views over the loaded snapshot; the only mutable
surfaces are the leveling decision log and the scenario cache, both of which
persist to the project file on save. Every response echoes the seed and the
input hash of the snapshot it was computed from.
"""

from __future__ import annotations

from fastapi import FastAPI, HTTPException, Query
from pydantic import BaseModel, Field

from . import reports
from .errors import DuplicateDecision, SiteTwinError, SchemaError
from .leveling import rollout, train_policy
from .progress import round_half_up
from .projectfile import save_project, scenario_from_dict
from .state import TwinState
from .stochastic import quantile, run_mcs, weekly_forecast_log
from .whatif import evaluate, sensitivity_rank, tornado_rows
from .graph import kg_query
from .errors import MalformedPattern

INTERACTIVE_TRIAL_CAP = 20_000


class ScenarioDoc(BaseModel):
    name: str
    operators: list[dict] = Field(default_factory=list)
    notes: str = ""
    trials: int | None = None
    seed: int | None = None


class DecisionDoc(BaseModel):
    adopt: bool
    reason: str = ""


class EvaluateResponse(BaseModel):
    name: str
    dfinish_p50: float
    dfinish_p80: float
    dcost_p50_kusd: float
    dcost_p80_kusd: float
    affected_divisions: list[str]
    assumed_cost_spread: bool
    seed: int
    n_trials: int
    input_hash: str


def create_app(state: TwinState, project_path: str | None = None) -> FastAPI:
    app = FastAPI(title="sitetwin service", version="0.1.0")
    input_hash = state.input_hash()
    scenario_cache: dict[str, EvaluateResponse] = {}
    policy_cache: dict[str, object] = {}

    def seeded(payload: dict) -> dict:
        payload["seed"] = state.meta.seed
        payload["input_hash"] = input_hash
        return payload

    @app.get("/state/summary")
    def state_summary():
        return seeded(
            {
                "name": state.meta.name,
                "region": state.meta.region,
                "current_week": state.meta.current_week,
                "activities": len(state.network),
                "relations": len(state.network.relations),
                "cost_items": len(state.ledger.items),
                "scenarios": sorted(state.scenarios),
                "review_queue": state.ledger.review_queue(),
            }
        )

    @app.get("/forecast")
    def forecast():
        log = weekly_forecast_log(list(state.forecast_history))
        return seeded(
            {
                "rows": log["rows"],
                "convergence_week": log["convergence_week"],
                "band_nonincreasing": log["band_nonincreasing"],
            }
        )

    @app.get("/ev")
    def ev():
        report = reports.ev_report(state)
        return seeded(
            {
                "columns": report.columns,
                "rows": report.rows,
                "annotations": list(report.annotations),
            }
        )

    @app.get("/buffers")
    def buffers():
        ledger = state.buffer_ledger
        if ledger is None:
            return seeded({"rows": [], "project_used_pct": 0.0, "feeding_used_pct": 0.0})
        report = reports.buffer_report(state)
        return seeded(
            {
                "columns": report.columns,
                "rows": report.rows,
                "project_used_pct": round_half_up(ledger.percent_used("project"), 1),
                "feeding_used_pct": round_half_up(ledger.percent_used("feeding"), 1),
            }
        )

    @app.get("/criticality")
    def criticality(trials: int = Query(default=5_000, le=INTERACTIVE_TRIAL_CAP)):
        dist = run_mcs(
            state.network,
            state.posteriors(),
            state.calendar,
            n_trials=trials,
            seed=state.meta.seed,
        )
        report = reports.criticality_report(state, dist)
        return seeded(
            {
                "columns": report.columns,
                "rows": report.rows,
                "p50": quantile(dist, 0.5),
                "p80": quantile(dist, 0.8),
                "n_trials": trials,
            }
        )

    @app.post("/scenario/evaluate")
    def scenario_evaluate(doc: ScenarioDoc):
        try:
            scenario = scenario_from_dict(doc.model_dump(exclude={"trials", "seed"}))
        except SchemaError as exc:
            raise HTTPException(status_code=400, detail=str(exc))
        trials = min(doc.trials or INTERACTIVE_TRIAL_CAP, INTERACTIVE_TRIAL_CAP)
        try:
            result = evaluate(state, scenario, n_trials=trials, seed=doc.seed)
        except SiteTwinError as exc:
            raise HTTPException(status_code=400, detail=str(exc))
        response = EvaluateResponse(
            name=result.name,
            dfinish_p50=round(result.dfinish_p50, 3),
            dfinish_p80=round(result.dfinish_p80, 3),
            dcost_p50_kusd=reports.kusd(result.dcost_p50),
            dcost_p80_kusd=reports.kusd(result.dcost_p80),
            affected_divisions=list(result.affected_divisions),
            assumed_cost_spread=result.assumed_cost_spread,
            seed=result.seed,
            n_trials=result.n_trials,
            input_hash=input_hash,
        )
        scenario_cache[result.name] = response
        return response

    @app.get("/scenarios/rank")
    def scenarios_rank(trials: int = Query(default=5_000, le=INTERACTIVE_TRIAL_CAP)):
        if not state.scenarios:
            return seeded({"rows": []})
        results = [
            evaluate(state, s, n_trials=trials, seed=state.meta.seed)
            for s in state.scenarios.values()
        ]
        ranked = sensitivity_rank(results)
        return seeded(
            {
                "rows": [
                    {
                        "scenario": r.name,
                        "dfinish_p50": round(r.dfinish_p50, 3),
                        "dfinish_p80": round(r.dfinish_p80, 3),
                        "dcost_p50_kusd": reports.kusd(r.dcost_p50),
                        "dcost_p80_kusd": reports.kusd(r.dcost_p80),
                    }
                    for r in ranked
                ],
                "tornado": [[name, delta] for name, delta in tornado_rows(results)],
                "n_trials": trials,
            }
        )

    def _policy():
        if "policy" not in policy_cache:
            if state.leveling is None:
                raise HTTPException(status_code=400, detail="project has no leveling instance")
            policy = train_policy(state.leveling, episodes=30, seed=state.meta.seed)
            _sched, acc, recs = rollout(state.leveling, policy)
            policy_cache["policy"] = policy
            policy_cache["recommendations"] = {r.week: r for r in recs}
            policy_cache["accounting"] = acc
        return policy_cache

    @app.get("/leveler/log")
    def leveler_log():
        cache = _policy()
        rows = []
        for week in sorted(cache["recommendations"]):
            rec = state.decisions.entries.get(week, cache["recommendations"][week])
            rows.append(
                {
                    "week": rec.week,
                    "action_id": rec.action_id,
                    "summary": rec.summary,
                    "predicted_delta_objective": rec.predicted_delta_objective,
                    "predicted_delta_overtime_hours": rec.predicted_delta_overtime_hours,
                    "adopted": rec.adopted,
                    "rejection_reason": rec.rejection_reason,
                }
            )
        return seeded({"rows": rows, "adoption_rate": state.decisions.adoption_rate})

    @app.post("/leveler/recommendation/{week}/decision")
    def leveler_decision(week: int, doc: DecisionDoc):
        cache = _policy()
        if week not in cache["recommendations"]:
            raise HTTPException(status_code=404, detail=f"no recommendation for week {week}")
        if not doc.adopt and not doc.reason.strip():
            raise HTTPException(status_code=400, detail="rejection requires a reason")
        rec = state.decisions.entries.get(week, cache["recommendations"][week])
        try:
            decided = state.decisions.record_decision(rec, doc.adopt, doc.reason)
        except DuplicateDecision as exc:
            raise HTTPException(status_code=409, detail=str(exc))
        except ValueError as exc:
            raise HTTPException(status_code=400, detail=str(exc))
        if project_path:
            save_project(state, project_path)
        return seeded(
            {
                "week": decided.week,
                "action_id": decided.action_id,
                "adopted": decided.adopted,
                "rejection_reason": decided.rejection_reason,
                "adoption_rate": state.decisions.adoption_rate,
            }
        )

    @app.get("/kg/query")
    def kg(pattern: str, trials: int = 2_000):
        criticality = None
        if "criticality" in pattern:
            from .whatif import criticality_join

            criticality = criticality_join(state, n_trials=min(trials, INTERACTIVE_TRIAL_CAP))
        try:
            result = kg_query(state.graph, pattern, criticality=criticality)
        except MalformedPattern as exc:
            raise HTTPException(status_code=400, detail=str(exc))
        return seeded(
            {
                "nodes": [list(n) for n in result["nodes"]],
                "edges": [
                    {"src": list(e.src), "label": e.label, "dst": list(e.dst)}
                    for e in result["edges"]
                ],
                "paths": [[list(k) for k in nodes] for nodes, _ in result["paths"]],
            }
        )

    return app
