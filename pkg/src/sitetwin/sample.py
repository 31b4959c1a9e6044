"""Bundled synthetic mid-rise project used by the CLI, service, and tests.

A compact 18-activity tower schedule with priors, weekly evidence, a cost
ledger localized to Dallas-Fort Worth rates, buffer history, seven saved
scenarios, and a traceability graph. All values are synthetic but shaped
like a real control-period dataset.
"""

from __future__ import annotations

import datetime as dt
from importlib import resources
from pathlib import Path

import numpy as np

from .costs import CostItem, CostLedger, LocalizationFactors
from .earned_value import BudgetItem, cents
from .graph import KnowledgeGraph
from .leveling import LevelTask, LevelingInstance, Objective, ResourcePool
from .progress import ConfusionMatrix, MappingRecord, WbsQuantity
from .project_model import Activity, Calendar, PrecedenceRelation, build_network
from .state import ProjectMeta, TwinState
from .stochastic import BufferLedger, DurationPrior, Evidence, ForecastEntry
from .whatif import (
    CapacityChange,
    DeliveryShift,
    PriceMultiplier,
    Resequence,
    Scenario,
    ScopeChange,
    WeatherDays,
)

# id, description, division, duration, sd, demands
ACTIVITY_ROWS = [
    ("A001", "Site mobilization", "01", 5, 1, {}),
    ("A010", "Foundations (piers/mat)", "03", 18, 3, {"concrete_crew": 4}),
    ("A020", "Superstructure (PT slabs L2-L8)", "03", 56, 9, {"concrete_crew": 6, "crane": 1}),
    ("A030", "Envelope-Curtainwall & windows", "08", 42, 8, {"glazing_crew": 4, "crane": 1}),
    ("A040", "Roofing & waterproofing", "07", 12, 2, {"roofing_crew": 3}),
    ("A050", "Exterior finishes & sealants", "07", 15, 3, {"roofing_crew": 2}),
    ("A060", "Interior partitions & framing", "09", 34, 6, {"drywall_crew": 5}),
    ("A070", "MEP rough-in (core + typical floors)", "23", 36, 7, {"mep_crew": 6}),
    ("A090", "Drywall boarding & taping", "09", 38, 7, {"drywall_crew": 6}),
    ("A100", "Ceiling grid & tiles", "09", 20, 4, {"drywall_crew": 3}),
    ("A110", "Electrical lighting & devices", "26", 26, 5, {"electricians": 5}),
    ("A120", "HVAC equipment start-up", "23", 16, 4, {"mep_crew": 3}),
    ("A130", "Plumbing-fixtures set", "22", 12, 3, {"mep_crew": 2}),
    ("A140", "Elevators-install & inspection", "14", 15, 4, {"elevator_crew": 2}),
    ("A150", "Testing, adjusting, balancing (TAB)", "23", 10, 3, {"mep_crew": 2}),
    ("A160", "Life-safety testing", "28", 9, 2, {"electricians": 2}),
    ("A170", "Commissioning (systems)", "01", 14, 3, {"mep_crew": 2}),
    ("A180", "Final clean & punch", "01", 9, 2, {}),
]

RELATIONS = [
    ("A001", "A010", "FS", 0),
    ("A010", "A020", "FS", 0),
    ("A020", "A030", "SS", 30),
    ("A020", "A040", "FS", 0),
    ("A020", "A060", "SS", 40),
    ("A030", "A050", "FS", 0),
    ("A040", "A050", "SS", 5),
    ("A060", "A070", "SS", 10),
    ("A070", "A090", "SS", 10),
    ("A090", "A100", "SS", 16),
    ("A070", "A110", "SS", 14),
    ("A070", "A120", "SS", 24),
    ("A090", "A130", "SS", 16),
    ("A060", "A140", "FS", 0),
    ("A120", "A150", "SS", 6),
    ("A110", "A160", "FS", 0),
    ("A120", "A160", "FS", 0),
    ("A150", "A170", "FS", 0),
    ("A050", "A180", "FS", 0),
    ("A100", "A180", "FS", 0),
    ("A170", "A180", "SS", 6),
]

MONTHLY_PV_EV_AC = [
    (3, 2, 2), (8, 9, 10), (16, 17, 18), (26, 28, 32),
    (38, 41, 45), (52, 58, 60), (66, 68, 72), (78, 76, 80),
    (87, 83, 88), (94, 89, 95), (98, 93, 101), (100, 95, 106),
]

BUFFER_DELTAS = [
    (0.0, 0.0), (0.0, 0.0), (0.5, 0.0), (0.5, 0.0),
    (1.0, 0.5), (0.5, 0.5), (0.5, 0.5), (0.5, 0.5),
    (0.5, 0.5), (0.5, 0.5), (1.0, 0.5), (0.5, 0.5),
    (0.5, 0.5), (0.5, 0.5), (0.5, 0.5), (0.5, 0.5),
]

FORECAST_HISTORY = [
    (1, 120, 125, 128, "initial prior; high uncertainty"),
    (2, 121, 126, 128, "posterior updates begin"),
    (3, 122, 127, 128, ""), (4, 123, 128, 128, ""), (5, 124, 129, 128, ""),
    (6, 125, 129, 128, ""), (7, 126, 129, 128, ""),
    (8, 126, 129, 128, "volatility on some paths"),
    (9, 127, 130, 128, "uncertainty narrows"),
    (10, 127, 130, 128, ""), (11, 127, 130, 128, ""), (12, 127, 130, 128, ""),
    (13, 128, 130, 128, ""), (14, 128, 130, 128, "stable forecast"),
    (15, 128, 130, 128, ""), (16, 128, 130, 128, "data date"),
]

QUANTITY_ROWS = [
    ("WBS-001", "Wall", 8200, 8035, "m2", "reality-capture 2025-07; ortho 2025-07-15"),
    ("WBS-002", "Slab", 2850, 2910, "m3", "reality-capture 2025-08; ortho 2025-08-12"),
    ("WBS-003", "Beam", 480, 472, "m3", "reality-capture 2025-06; field photos wk 24"),
    ("WBS-004", "Column", 360, 358, "m3", "reality-capture 2025-06; scan notes 06-21"),
    ("WBS-005", "Door", 186, 184, "ea", "punch list doors 2025-07; photo log"),
    ("WBS-006", "Window", 640, 652, "ea", "model compare; glazier log 2025-07"),
    ("WBS-007", "Duct", 5100, 4975, "m", "MEP walk-down wk 30; point cloud 2025-07"),
    ("WBS-008", "Pipe", 9200, 9355, "m", "as-built redlines; scan 2025-08"),
    ("WBS-009", "Cable Tray", 1500, 1475, "m", "install log; interior drone set wk 32"),
    ("WBS-010", "Ceiling", 11800, 11620, "m2", "interior scans 2025-09; QC walk-down"),
]

CONFUSION_COUNTS = [
    [198, 10, 8, 6, 1],
    [12, 178, 3, 9, 3],
    [4, 8, 233, 12, 10],
    [6, 3, 9, 210, 4],
    [0, 1, 7, 3, 162],
]

CONFUSION_CLASSES = (
    "Rebar Placement",
    "Formwork Stripping",
    "Drywall Boarding",
    "MEP Rough-In",
    "Paint/Finish",
)

IOU_ROWS = [
    {"class": "Rebar Placement", "iou": 0.78, "support_px": 180_000},
    {"class": "Formwork Stripping", "iou": 0.74, "support_px": 165_000},
    {"class": "Drywall Boarding", "iou": 0.81, "support_px": 220_000},
    {"class": "MEP Rough-In", "iou": 0.76, "support_px": 205_000},
    {"class": "Paint/Finish", "iou": 0.72, "support_px": 150_000},
]

COST_ITEMS = [
    # item, division, wbs, material, labor, equipment, crew_hours, confidence, trade
    ("CONC-SLAB", "03", "WBS-002", "310.00", "145.00", "58.00", 2600, 0.95, "concrete"),
    ("CONC-FND", "03", "WBS-003", "120.00", "64.00", "31.00", 1150, 0.92, "concrete"),
    ("STEEL-MISC", "05", "WBS-003", "96.00", "41.00", "12.00", 720, 0.88, "ironworker"),
    ("FIREPROOF-1", "07", "WBS-001", "44.00", "36.00", "6.00", 640, 0.66, "insulator"),
    ("ROOF-MEMBR", "07", "WBS-001", "82.00", "37.00", "9.00", 660, 0.9, "roofer"),
    ("GLAZE-CW", "08", "WBS-006", "410.00", "126.00", "38.00", 2200, 0.93, "glazier"),
    ("GWB-BOARD", "09", "WBS-001", "50.00", "25.00", "6.25", 3100, 0.91, "drywaller"),
    ("CEIL-GRID", "09", "WBS-010", "61.00", "29.00", "4.00", 520, 0.86, "drywaller"),
    ("FIRE-SUPP", "21", "WBS-008", "74.00", "52.00", "8.00", 910, 0.84, "pipefitter"),
    ("PLUMB-RISER", "22", "WBS-008", "118.00", "87.00", "12.00", 1540, 0.9, "plumber"),
    ("HVAC-AHU", "23", "WBS-007", "232.00", "96.00", "25.00", 1700, 0.94, "sheetmetal"),
    ("ELEC-LIGHT", "26", "WBS-009", "140.00", "118.00", "10.00", 2100, 0.95, "electrician"),
    ("COMM-CABLE", "27", "WBS-009", "38.00", "33.00", "3.00", 580, 0.68, "electrician"),
]

MAPPING_SAMPLE = [
    # item, predicted, gold, confidence, review minutes
    ("SPEC-0331", "03", "03", 0.97, 0.8),
    ("SPEC-0332", "03", "03", 0.94, 1.1),
    ("SPEC-0411", "04", "04", 0.90, 1.4),
    ("SPEC-0512", "05", "05", 0.92, 1.2),
    ("SPEC-0515", "05", "03", 0.61, 2.4),
    ("SPEC-0611", "06", "06", 0.89, 1.6),
    ("SPEC-0713", "07", "07", 0.88, 1.7),
    ("SPEC-0714", "07", "09", 0.57, 2.9),
    ("SPEC-0811", "08", "08", 0.95, 0.9),
    ("SPEC-0911", "09", "09", 0.91, 1.5),
    ("SPEC-0912", "09", "09", 0.90, 1.2),
    ("SPEC-2111", "21", "21", 0.89, 1.1),
    ("SPEC-2112", "22", "21", 0.63, 2.2),
    ("SPEC-2211", "22", "22", 0.92, 1.2),
    ("SPEC-2311", "23", "23", 0.90, 1.4),
    ("SPEC-2614", "26", "26", 0.93, 1.0),
    ("SPEC-2711", "27", "27", 0.88, 1.3),
    ("SPEC-2712", "27", "26", 0.64, 2.0),
]


def sample_state() -> TwinState:
    activities = [
        Activity(
            id=act_id,
            description=desc,
            wbs_code=f"WBS-{i + 1:03d}" if i < 10 else "WBS-010",
            csi_division=division,
            baseline_duration=float(duration),
            resource_demands=demands,
            vendor_ids=_vendors_for(act_id),
            crew_ids=tuple(demands),
        )
        for i, (act_id, desc, division, duration, _sd, demands) in enumerate(ACTIVITY_ROWS)
    ]
    relations = [PrecedenceRelation(p, s, kind=k, lag=float(lag)) for p, s, k, lag in RELATIONS]
    network = build_network(activities, relations)

    priors: dict[str, DurationPrior] = {}
    for act_id, _desc, _division, duration, sd, _demands in ACTIVITY_ROWS:
        if act_id == "A020":
            priors[act_id] = DurationPrior.lognormal(56, 9)
        else:
            a = max(0.5, duration - 1.5 * sd)
            priors[act_id] = DurationPrior.triangular(a, duration, duration + 1.5 * sd)

    evidence = []
    # steady progress readings on the long-running trades
    for week, (act_id, pc, elapsed) in enumerate(
        [
            ("A010", 0.30, 6.0), ("A010", 0.62, 12.0), ("A010", 0.95, 17.0),
            ("A020", 0.18, 10.0), ("A020", 0.36, 20.0), ("A020", 0.55, 31.0),
            ("A020", 0.73, 41.0), ("A020", 0.90, 51.0),
            ("A030", 0.24, 10.0), ("A030", 0.47, 20.0), ("A030", 0.71, 30.0),
            ("A060", 0.30, 10.0), ("A060", 0.59, 20.0),
            ("A090", 0.26, 10.0), ("A090", 0.52, 20.0), ("A090", 0.79, 30.0),
        ],
        start=1,
    ):
        evidence.append(Evidence(act_id, week, percent_complete=pc, elapsed=elapsed))

    bac = 100 * 100_000
    planned_curve = {t + 1: pv * 100_000 / bac for t, (pv, _, _) in enumerate(MONTHLY_PV_EV_AC)}
    actuals = {t + 1: ac * 100_000 for t, (_, _, ac) in enumerate(MONTHLY_PV_EV_AC)}
    budget = BudgetItem("project", bac, planned_curve, actuals)
    measured_pc = {
        ("project", t + 1): ev * 100_000 / bac for t, (_, ev, _) in enumerate(MONTHLY_PV_EV_AC)
    }

    ledger = CostLedger.from_items(
        CostItem(
            item_id=item_id,
            csi_division=division,
            wbs_id=wbs,
            material=cents(material),
            labor=cents(labor),
            equipment=cents(equipment),
            crew_hours=hours,
            mapping_confidence=confidence,
            trade=trade,
        )
        for item_id, division, wbs, material, labor, equipment, hours, confidence, trade in (
            (r[0], r[1], r[2], r[3], r[4], r[5], r[6], r[7], r[8]) for r in COST_ITEMS
        )
    )
    # thousands are k$ figures: stored values above are k$, scale to real dollars
    ledger.scale_items(list(ledger.items), 1000.0)

    localization = LocalizationFactors(
        cci_factor=0.915,
        local_wage={"electrician": cents("34.80"), "drywaller": cents("27.10"),
                    "glazier": cents("31.40"), "plumber": cents("33.20")},
        national_wage={"electrician": cents("38.10"), "drywaller": cents("29.60"),
                       "glazier": cents("33.90"), "plumber": cents("35.70")},
    )

    buffer_ledger = BufferLedger(feeding_size=15.0, project_size=20.0)
    for week, (f, p) in enumerate(BUFFER_DELTAS, start=1):
        buffer_ledger.weeks.append(week)
        buffer_ledger.feeding_deltas.append(f)
        buffer_ledger.project_deltas.append(p)

    forecast_history = tuple(
        ForecastEntry(week, p50, p80, actual, note)
        for week, p50, p80, actual, note in FORECAST_HISTORY
    )

    pools = (
        ResourcePool("concrete_crew", 6.0, 2.0),
        ResourcePool("glazing_crew", 4.0, 1.0),
        ResourcePool("roofing_crew", 3.0, 1.0),
        ResourcePool("drywall_crew", 6.0, 2.0),
        ResourcePool("mep_crew", 6.0, 2.0),
        ResourcePool("electricians", 5.0, 2.0),
        ResourcePool("elevator_crew", 2.0, 0.0),
        ResourcePool("crane", 1.0, 0.0),
    )

    graph = _build_graph()

    scenarios = {s.name: s for s in _scenarios()}

    leveling = LevelingInstance(
        tasks=tuple(
            LevelTask(tid, duration=dur, demands=demands, preds=preds)
            for tid, dur, demands, preds in [
                ("L-BOARD-ODD", 5.0, {"drywall_crew": 4.0}, ()),
                ("L-BOARD-EVEN", 5.0, {"drywall_crew": 4.0}, ()),
                ("L-TAPE", 4.0, {"drywall_crew": 3.0}, ("L-BOARD-ODD",)),
                ("L-DEVICES", 4.0, {"electricians": 4.0}, ()),
                ("L-RISERS", 3.0, {"electricians": 3.0}, ()),
                ("L-CEILING", 4.0, {"drywall_crew": 2.0}, ("L-TAPE",)),
                ("L-TAB", 3.0, {"mep_crew": 3.0}, ("L-DEVICES",)),
                ("L-PUNCH", 2.0, {"mep_crew": 2.0}, ("L-TAB", "L-CEILING")),
            ]
        ),
        pools=pools,
        weeks=6,
        objective=Objective(w_span=1.0, w_overtime=1.0, w_idle=0.1),
    )

    return TwinState(
        meta=ProjectMeta(
            name="DFW Midrise (synthetic)",
            region="Dallas-Fort Worth, TX",
            seed=42,
            start_date=dt.date(2025, 1, 6),
            current_week=16,
            feeding_buffer_days=15.0,
            project_buffer_days=20.0,
        ),
        network=network,
        calendar=Calendar(
            name="standard",
            workweek=frozenset({0, 1, 2, 3, 4}),
            exceptions=frozenset({dt.date(2025, 5, 26), dt.date(2025, 7, 4)}),
        ),
        pools=pools,
        priors=priors,
        evidence=tuple(evidence),
        budget_items=(budget,),
        measured_pc=measured_pc,
        quantities=tuple(
            WbsQuantity(wbs, cls, planned, measured, unit, link)
            for wbs, cls, planned, measured, unit, link in QUANTITY_ROWS
        ),
        ledger=ledger,
        localization=localization,
        buffer_ledger=buffer_ledger,
        forecast_history=forecast_history,
        scenarios=scenarios,
        graph=graph,
        confusion_matrices={
            "activity_recognition": ConfusionMatrix(CONFUSION_CLASSES, np.array(CONFUSION_COUNTS))
        },
        iou_rows=tuple(IOU_ROWS),
        mapping_records=tuple(
            MappingRecord(item, division_of(item), pred, gold, conf, minutes)
            for item, pred, gold, conf, minutes in MAPPING_SAMPLE
        ),
        leveling=leveling,
    )


def division_of(item_id: str) -> str:
    return item_id.split("-")[1][:2]


def _vendors_for(act_id: str) -> tuple[str, ...]:
    return {
        "A030": ("VEND-GLAZE", "VEND-ALUM"),
        "A120": ("VEND-AHU",),
        "A020": ("VEND-PT",),
        "A110": ("VEND-ELEC",),
    }.get(act_id, ())


def _build_graph() -> KnowledgeGraph:
    g = KnowledgeGraph()
    for act_id, desc, division, *_ in ACTIVITY_ROWS:
        g.add_node("activity", act_id, {"description": desc, "division": division})
    for wbs in {f"WBS-{i:03d}" for i in range(1, 11)}:
        g.add_node("wbs", wbs)
    for item in COST_ITEMS:
        g.add_node("cost_code", item[0], {"division": item[1]})
    for vendor, label in [
        ("VEND-GLAZE", "curtainwall glazing"),
        ("VEND-ALUM", "aluminum framing"),
        ("VEND-AHU", "air handlers"),
        ("VEND-PT", "post-tension"),
        ("VEND-ELEC", "electrical distribution"),
        ("VEND-GWB", "gypsum board"),
    ]:
        g.add_node("vendor", vendor, {"supplies": label})
    for crew in ("concrete_crew", "glazing_crew", "roofing_crew", "drywall_crew",
                 "mep_crew", "electricians", "elevator_crew", "crane"):
        g.add_node("crew", crew)
    for item in COST_ITEMS:
        g.add_edge("cost_code", item[0], "contains", "wbs", item[2])
    code_to_activity = {
        "GLAZE-CW": "A030", "HVAC-AHU": "A120", "CONC-SLAB": "A020", "CONC-FND": "A010",
        "GWB-BOARD": "A090", "CEIL-GRID": "A100", "ELEC-LIGHT": "A110", "PLUMB-RISER": "A130",
        "FIRE-SUPP": "A070", "ROOF-MEMBR": "A040", "FIREPROOF-1": "A050", "STEEL-MISC": "A020",
        "COMM-CABLE": "A110",
    }
    for code, act in code_to_activity.items():
        g.add_edge("cost_code", code, "maps_to", "activity", act)
    for vendor, codes in [
        ("VEND-GLAZE", ["GLAZE-CW"]),
        ("VEND-ALUM", ["GLAZE-CW"]),
        ("VEND-AHU", ["HVAC-AHU"]),
        ("VEND-PT", ["CONC-SLAB"]),
        ("VEND-ELEC", ["ELEC-LIGHT", "COMM-CABLE"]),
        ("VEND-GWB", ["GWB-BOARD"]),
    ]:
        for code in codes:
            g.add_edge("vendor", vendor, "supplies", "cost_code", code)
    for crew, acts in [
        ("glazing_crew", ["A030"]),
        ("drywall_crew", ["A060", "A090", "A100"]),
        ("mep_crew", ["A070", "A120", "A130", "A150", "A170"]),
        ("electricians", ["A110", "A160"]),
        ("concrete_crew", ["A010", "A020"]),
    ]:
        for act in acts:
            g.add_edge("crew", crew, "performs", "activity", act)
    return g


def _scenarios() -> list[Scenario]:
    return [
        Scenario(
            "drywall-material-escalation",
            operators=(
                PriceMultiplier(factor=1.08, divisions=("09",)),
                DeliveryShift(activity_ids=("A090", "A100"), days=3.0),
            ),
            notes="unit price +8%; board delivery +3 d",
        ),
        Scenario(
            "late-ahu-delivery",
            operators=(DeliveryShift(activity_ids=("A120",), days=14.0),),
            notes="AHU arrival +14 d; crane re-shuffle",
        ),
        Scenario(
            "rain-days-critical-window",
            operators=(
                WeatherDays(
                    dates=(dt.date(2025, 3, 18), dt.date(2025, 3, 19), dt.date(2025, 3, 20))
                ),
            ),
            notes="three lost days during structure pours",
        ),
        Scenario(
            "steel-lead-time",
            operators=(DeliveryShift(activity_ids=("A020",), days=7.0),),
            notes="fabrication +7 d",
        ),
        Scenario(
            "electrician-shortage",
            operators=(CapacityChange(resource_id="electricians", delta_units=-1.0, week_range=(10, 12)),),
            notes="labor cap -1 FTE for two weeks",
        ),
        Scenario(
            "fireproofing-change-order",
            operators=(ScopeChange(item_ids=("FIREPROOF-1",), factor=1.06),),
            notes="scope +6%; added inspections",
        ),
        Scenario(
            "glazing-resequencing",
            operators=(
                Resequence(
                    remove=(("A030", "A050"),),
                    add=(PrecedenceRelation("A030", "A050", kind="SS", lag=30.0),),
                ),
            ),
            notes="corridor-first swap overlaps sealants with glazing",
        ),
    ]


def sample_project_path() -> Path:
    """Path of the bundled project file (written on first use if missing)."""
    data_dir = resources.files("sitetwin").joinpath("data")
    path = Path(str(data_dir.joinpath("dfw_midrise.json")))
    if not path.exists():
        from .projectfile import save_project

        save_project(sample_state(), path)
    return path
