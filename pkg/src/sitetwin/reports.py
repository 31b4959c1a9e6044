"""Report rendering: fixed column orders, seed and input-hash headers.

Every report is a pure function of (state, seed), so re-rendering produces
identical bytes. Money prints as thousands USD at one decimal; ratios at two
decimals; undefined ratios as "-".
"""

from __future__ import annotations

import io
from dataclasses import dataclass

from .earned_value import EvSeries, forecast, format_ratio, rollup
from .progress import (
    classification_metrics,
    iou_aggregate,
    mapping_evaluation,
    reconcile,
    round_half_up,
)
from .state import TwinState
from .stochastic import criticality_index, weekly_forecast_log

EV_COLUMNS = ["period", "BCWS", "BCWP", "ACWP", "SV", "CV", "SPI", "CPI"]
FORECAST_COLUMNS = ["week", "P50_days", "P80_days", "actual_days", "note"]
CRITICALITY_COLUMNS = ["activity_id", "description", "criticality_pct", "mean_d", "sd_d"]
BUFFER_COLUMNS = [
    "week",
    "feeding_delta_d",
    "project_delta_d",
    "cum_feeding_d",
    "cum_project_d",
    "project_buffer_used_pct",
]
LEVELING_COLUMNS = ["week", "action_id", "summary", "adopted", "reason", "notes"]
SCENARIO_COLUMNS = [
    "scenario",
    "key_inputs",
    "affected_divisions",
    "dfinish_p50_d",
    "dfinish_p80_d",
    "dcost_p50_kusd",
    "dcost_p80_kusd",
    "notes",
]
TORNADO_COLUMNS = ["scenario", "dfinish_p50_d"]


@dataclass(frozen=True)
class Report:
    title: str
    columns: list[str]
    rows: list[list]
    seed: int
    input_hash: str
    annotations: tuple[str, ...] = ()

    def to_table(self) -> str:
        out = io.StringIO()
        out.write(f"# {self.title}\n")
        out.write(f"# seed={self.seed} input_hash={self.input_hash}\n")
        for note in self.annotations:
            out.write(f"# {note}\n")
        widths = [
            max(len(str(c)), *(len(_cell(r[i])) for r in self.rows)) if self.rows else len(str(c))
            for i, c in enumerate(self.columns)
        ]
        out.write("  ".join(str(c).ljust(w) for c, w in zip(self.columns, widths)).rstrip() + "\n")
        for row in self.rows:
            out.write(
                "  ".join(_cell(v).ljust(w) for v, w in zip(row, widths)).rstrip() + "\n"
            )
        return out.getvalue()

    def to_csv(self) -> str:
        lines = [",".join(self.columns)]
        for row in self.rows:
            lines.append(",".join(_csv_cell(v) for v in row))
        return "\n".join(lines) + "\n"

    def render(self, fmt: str = "table") -> str:
        if fmt == "csv":
            return self.to_csv()
        return self.to_table()


def _cell(v) -> str:
    if v is None:
        return "-"
    if isinstance(v, float):
        return f"{v:g}"
    return str(v)


def _csv_cell(v) -> str:
    s = _cell(v)
    if "," in s or '"' in s:
        s = '"' + s.replace('"', '""') + '"'
    return s


def kusd(cents_value: int) -> float:
    return round_half_up(cents_value / 100_000.0, 1)


def ev_report(state: TwinState, series: EvSeries | None = None) -> Report:
    series = series or rollup(list(state.budget_items), state.measured_pc)
    rows = []
    for p in series.points:
        rows.append(
            [
                p.period,
                kusd(p.pv),
                kusd(p.ev),
                kusd(p.ac),
                kusd(p.sv),
                kusd(p.cv),
                format_ratio(p.spi),
                format_ratio(p.cpi),
            ]
        )
    annotations = []
    last = series.points[-1]
    if last.ev > 0 and last.ac > 0:
        fc = forecast(series.bac, last.ev, last.ac)
        annotations.append(
            f"EAC {kusd(fc['eac_cpi'])} kUSD exact"
            f" (printed-CPI approximation {kusd(fc['eac_at_printed_cpi'])});"
            f" VAC {kusd(fc['vac'])} kUSD"
        )
    return Report(
        title="earned value (cumulative, thousands USD)",
        columns=EV_COLUMNS,
        rows=rows,
        seed=state.meta.seed,
        input_hash=state.input_hash(),
        annotations=tuple(annotations),
    )


def forecast_report(state: TwinState) -> Report:
    log = weekly_forecast_log(list(state.forecast_history))
    rows = [
        [r["week"], r["p50"], r["p80"], r["actual"], r["note"]] for r in log["rows"]
    ]
    annotations = []
    if log["convergence_week"] is not None:
        annotations.append(f"P50 converges with actual at week {log['convergence_week']}")
    return Report(
        title="weekly schedule forecast",
        columns=FORECAST_COLUMNS,
        rows=rows,
        seed=state.meta.seed,
        input_hash=state.input_hash(),
        annotations=tuple(annotations),
    )


def criticality_report(state: TwinState, dist) -> Report:
    crit = criticality_index(dist)
    posteriors = state.posteriors()
    rows = []
    for act in state.network.activities:
        post = posteriors[act.id]
        rows.append(
            [
                act.id,
                act.description,
                round_half_up(crit[act.id], 1),
                round_half_up(post.mean, 1),
                round_half_up(post.sd, 1),
            ]
        )
    rows.sort(key=lambda r: (-r[2], r[0]))
    return Report(
        title="activity criticality and posterior durations",
        columns=CRITICALITY_COLUMNS,
        rows=rows,
        seed=dist.seed,
        input_hash=state.input_hash(),
    )


def buffer_report(state: TwinState) -> Report:
    ledger = state.buffer_ledger
    rows = []
    if ledger is not None:
        cum_f = ledger.feeding_cumulative
        cum_p = ledger.project_cumulative
        for i, week in enumerate(ledger.weeks):
            rows.append(
                [
                    week,
                    ledger.feeding_deltas[i],
                    ledger.project_deltas[i],
                    cum_f[i],
                    cum_p[i],
                    round_half_up(100.0 * cum_p[i] / ledger.project_size, 1),
                ]
            )
    annotations = []
    if ledger is not None and ledger.overruns:
        annotations.extend(ledger.overruns)
    return Report(
        title="weekly buffer consumption",
        columns=BUFFER_COLUMNS,
        rows=rows,
        seed=state.meta.seed,
        input_hash=state.input_hash(),
        annotations=tuple(annotations),
    )


def leveling_report(state: TwinState) -> Report:
    rows = []
    for week in sorted(state.decisions.entries):
        rec = state.decisions.entries[week]
        adopted = {"yes": "Yes", "no": "No", "pending": "Pending"}[rec.adopted]
        rows.append([rec.week, rec.action_id, rec.summary, adopted, rec.rejection_reason, ""])
    return Report(
        title="leveling recommendations and adoption",
        columns=LEVELING_COLUMNS,
        rows=rows,
        seed=state.meta.seed,
        input_hash=state.input_hash(),
    )


def scenario_report(state: TwinState, results) -> Report:
    rows = []
    for r in results:
        scenario = state.scenarios.get(r.name)
        key_inputs = scenario.notes if scenario is not None else ""
        rows.append(
            [
                r.name,
                key_inputs,
                " ".join(r.affected_divisions),
                round_half_up(r.dfinish_p50, 1),
                round_half_up(r.dfinish_p80, 1),
                kusd(r.dcost_p50),
                kusd(r.dcost_p80),
                r.notes,
            ]
        )
    return Report(
        title="what-if scenario results",
        columns=SCENARIO_COLUMNS,
        rows=rows,
        seed=state.meta.seed,
        input_hash=state.input_hash(),
    )


def tornado_report(state: TwinState, results) -> Report:
    from .whatif import tornado_rows

    rows = [[name, round_half_up(delta, 1)] for name, delta in tornado_rows(results)]
    return Report(
        title="scenario sensitivity (schedule days)",
        columns=TORNADO_COLUMNS,
        rows=rows,
        seed=state.meta.seed,
        input_hash=state.input_hash(),
    )


def quantity_report(state: TwinState) -> Report:
    rows = []
    for q in state.quantities:
        delta, pct = reconcile(q)
        rows.append(
            [q.wbs_id, q.element_class, q.planned_qty, q.measured_qty, delta,
             f"{pct:+.2f}%", q.evidence_link]
        )
    return Report(
        title="quantity reconciliation by WBS",
        columns=["wbs_id", "element_class", "planned_qty", "measured_qty", "delta_qty", "delta_pct", "evidence_link"],
        rows=rows,
        seed=state.meta.seed,
        input_hash=state.input_hash(),
    )


def metrics_reports(state: TwinState) -> list[Report]:
    out = []
    for name, matrix in sorted(state.confusion_matrices.items()):
        m = classification_metrics(matrix)
        rows = [
            [cls, round_half_up(v["precision"], 3), round_half_up(v["recall"], 3), round_half_up(v["f1"], 3)]
            for cls, v in m["per_class"].items()
        ]
        rows.append(
            ["macro-average", round_half_up(m["macro"]["precision"], 3),
             round_half_up(m["macro"]["recall"], 3), round_half_up(m["macro"]["f1"], 3)]
        )
        rows.append(
            ["micro/overall", round_half_up(m["accuracy"], 3),
             round_half_up(m["accuracy"], 3), round_half_up(m["accuracy"], 3)]
        )
        out.append(
            Report(
                title=f"classification metrics: {name}",
                columns=["class", "precision", "recall", "f1"],
                rows=rows,
                seed=state.meta.seed,
                input_hash=state.input_hash(),
            )
        )
    if state.iou_rows:
        agg = iou_aggregate(state.iou_rows)
        rows = [
            [r["class"], r["iou"], r["support_px"]] for r in state.iou_rows
        ]
        rows.append(["macro-average", round_half_up(agg["macro"], 2), None])
        rows.append(["micro/overall", round_half_up(agg["micro"], 2), sum(r["support_px"] for r in state.iou_rows)])
        out.append(
            Report(
                title="segmentation quality (IoU)",
                columns=["class", "iou", "support_px"],
                rows=rows,
                seed=state.meta.seed,
                input_hash=state.input_hash(),
            )
        )
    if state.mapping_records:
        ev = mapping_evaluation(list(state.mapping_records))
        rows = [
            [division, m["support"], round_half_up(m["precision"], 3),
             round_half_up(m["recall"], 3), round_half_up(m["f1"], 3),
             round_half_up(m["mean_review_minutes"], 1)]
            for division, m in sorted(ev["per_division"].items())
        ]
        w = ev["weighted"]
        rows.append(
            ["weighted-average", w["support"], round_half_up(w["precision"], 3),
             round_half_up(w["recall"], 3), round_half_up(w["f1"], 3), None]
        )
        out.append(
            Report(
                title="cost-mapping evaluation by division",
                columns=["division", "support", "precision", "recall", "f1", "avg_review_min"],
                rows=rows,
                seed=state.meta.seed,
                input_hash=state.input_hash(),
            )
        )
    return out
