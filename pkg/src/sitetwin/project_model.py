"""Activity network, calendars, and deterministic CPM.

Internal time is decimal workdays from project start; calendar dates appear
only at I/O boundaries (weather exceptions, report dates). The network is
immutable after :func:`build_network`, so CPM passes can run concurrently on
shared state.
"""

from __future__ import annotations

import datetime as dt
import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping

import numpy as np

from .divisions import is_known_division
from .errors import CycleError, DanglingReference, MissingDuration
from . import kernel

RELATION_KINDS = ("FS", "SS", "FF", "SF")

#: criticality tolerance in workdays
FLOAT_EPS = 1e-9


@dataclass(frozen=True)
class Activity:
    id: str
    description: str = ""
    wbs_code: str = ""
    csi_division: str = ""
    baseline_duration: float = 0.0
    resource_demands: Mapping[str, float] = field(default_factory=dict)
    vendor_ids: tuple[str, ...] = ()
    crew_ids: tuple[str, ...] = ()

    def __post_init__(self):
        if self.baseline_duration < 0:
            raise ValueError(f"activity {self.id}: negative duration")
        if self.csi_division and not is_known_division(self.csi_division):
            raise ValueError(f"activity {self.id}: unknown CSI division {self.csi_division!r}")
        object.__setattr__(self, "resource_demands", dict(self.resource_demands))
        object.__setattr__(self, "vendor_ids", tuple(self.vendor_ids))
        object.__setattr__(self, "crew_ids", tuple(self.crew_ids))


@dataclass(frozen=True)
class PrecedenceRelation:
    predecessor: str
    successor: str
    kind: str = "FS"
    lag: float = 0.0

    def __post_init__(self):
        if self.predecessor == self.successor:
            raise ValueError(f"self-relation on {self.predecessor!r}")
        if self.kind not in RELATION_KINDS:
            raise ValueError(f"unknown relation kind {self.kind!r}")


_WEEKDAYS = ("Mon", "Tue", "Wed", "Thu", "Fri", "Sat", "Sun")


@dataclass(frozen=True)
class Calendar:
    name: str = "standard"
    workweek: frozenset[int] = frozenset({0, 1, 2, 3, 4})
    exceptions: frozenset[dt.date] = frozenset()

    def __post_init__(self):
        if not self.workweek:
            raise ValueError(f"calendar {self.name!r}: empty workweek")
        object.__setattr__(self, "workweek", frozenset(self.workweek))
        object.__setattr__(self, "exceptions", frozenset(self.exceptions))

    def is_working(self, day: dt.date) -> bool:
        return day.weekday() in self.workweek and day not in self.exceptions

    def with_exceptions(self, days: Iterable[dt.date]) -> "Calendar":
        return Calendar(self.name, self.workweek, self.exceptions | set(days))

    @staticmethod
    def weekday_names(indices: Iterable[int]) -> list[str]:
        return [_WEEKDAYS[i] for i in sorted(indices)]

    @staticmethod
    def weekday_index(name: str) -> int:
        return _WEEKDAYS.index(name)


def workday_add(start: dt.date, days: float, calendar: Calendar) -> dt.date:
    """Date reached after advancing ``days`` workdays from ``start``.

    Whole workdays step to the next working date each; a fractional remainder
    lands partway through the following working day. days must be >= 0.
    """
    if days < 0:
        raise ValueError("days must be >= 0")
    date, _frac = _workday_advance(start, days, calendar)
    return date

def calendar_offset(start: dt.date, days: float, calendar: Calendar) -> float:
    """Elapsed calendar days (decimal) covering ``days`` of work."""
    date, frac = _workday_advance(start, days, calendar)
    return (date - start).days + frac


def _workday_advance(start: dt.date, days: float, calendar: Calendar):
    if days == 0:
        return start, 0.0
    whole = math.floor(days)
    frac = days - whole
    date = start
    one = dt.timedelta(days=1)
    for _ in range(whole):
        date += one
        while not calendar.is_working(date):
            date += one
    if frac > 1e-12:
        if not calendar.is_working(date) or whole == 0:
            nxt = date if (whole == 0 and calendar.is_working(date)) else date + one
            while not calendar.is_working(nxt):
                nxt += one
            date = nxt
        return date, frac
    return date, 0.0


class ActivityNetwork:
    """Validated precedence DAG with a deterministic topological order."""

    def __init__(self, activities: tuple[Activity, ...], relations: tuple[PrecedenceRelation, ...]):
        self.activities = activities
        self.relations = relations
        self.index = {a.id: i for i, a in enumerate(activities)}
        self._topo = self._toposort()
        self._arrays = None

    def __len__(self):
        return len(self.activities)

    def activity(self, act_id: str) -> Activity:
        try:
            return self.activities[self.index[act_id]]
        except KeyError:
            raise DanglingReference(act_id, "network") from None

    @property
    def topo_order(self) -> tuple[str, ...]:
        return tuple(self.activities[i].id for i in self._topo)

    def _toposort(self):
        n = len(self.activities)
        indeg = [0] * n
        succ: list[list[int]] = [[] for _ in range(n)]
        for rel in self.relations:
            p, s = self.index[rel.predecessor], self.index[rel.successor]
            succ[p].append(s)
            indeg[s] += 1
        ready = [i for i in range(n) if indeg[i] == 0]
        order = []
        while ready:
            i = ready.pop(0)
            order.append(i)
            for s in succ[i]:
                indeg[s] -= 1
                if indeg[s] == 0:
                    ready.append(s)
        if len(order) != n:
            raise CycleError(self._find_cycle(succ, set(range(n)) - set(order)))
        return order

    def _find_cycle(self, succ, remaining):
        start = min(remaining)
        seen = {}
        path = []
        node = start
        while node not in seen:
            seen[node] = len(path)
            path.append(node)
            node = next(s for s in succ[node] if s in remaining)
        cycle = path[seen[node] :]
        return [self.activities[i].id for i in cycle]

    def kernel_arrays(self) -> dict:
        """Flat relation arrays in kernel layout (cached)."""
        if self._arrays is not None:
            return self._arrays
        n = len(self.activities)
        pos = np.empty(n, dtype=np.int64)
        for j, a in enumerate(self._topo):
            pos[a] = j
        kind_code = {k: i for i, k in enumerate(RELATION_KINDS)}
        rels = [
            (self.index[r.predecessor], self.index[r.successor], kind_code[r.kind], r.lag)
            for r in self.relations
        ]
        fwd = sorted(range(len(rels)), key=lambda i: (pos[rels[i][1]], i))
        bwd = sorted(range(len(rels)), key=lambda i: (pos[rels[i][0]], i))
        m = len(rels)
        arrays = {
            "topo": np.array(self._topo, dtype=np.int32),
            "in_off": np.zeros(n + 1, dtype=np.int32),
            "in_pred": np.empty(m, dtype=np.int32),
            "in_kind": np.empty(m, dtype=np.int8),
            "in_lag": np.empty(m, dtype=np.float64),
            "out_off": np.zeros(n + 1, dtype=np.int32),
            "out_succ": np.empty(m, dtype=np.int32),
            "out_kind": np.empty(m, dtype=np.int8),
            "out_lag": np.empty(m, dtype=np.float64),
        }
        counts = np.zeros(n, dtype=np.int64)
        for i in fwd:
            counts[pos[rels[i][1]]] += 1
        arrays["in_off"][1:] = np.cumsum(counts).astype(np.int32)
        for k, i in enumerate(fwd):
            p, s, kk, lag = rels[i]
            arrays["in_pred"][k] = p
            arrays["in_kind"][k] = kk
            arrays["in_lag"][k] = lag
        counts[:] = 0
        for i in bwd:
            counts[pos[rels[i][0]]] += 1
        arrays["out_off"][1:] = np.cumsum(counts).astype(np.int32)
        for k, i in enumerate(bwd):
            p, s, kk, lag = rels[i]
            arrays["out_succ"][k] = s
            arrays["out_kind"][k] = kk
            arrays["out_lag"][k] = lag
        self._arrays = arrays
        return arrays

    def duration_vector(self, durations: Mapping[str, float]) -> np.ndarray:
        vec = np.empty(len(self.activities))
        for i, a in enumerate(self.activities):
            if a.id not in durations:
                raise MissingDuration(a.id)
            d = durations[a.id]
            if d < 0:
                raise ValueError(f"negative duration for {a.id}")
            vec[i] = d
        return vec


@dataclass(frozen=True)
class ScheduleResult:
    es: dict[str, float]
    ef: dict[str, float]
    ls: dict[str, float]
    lf: dict[str, float]
    total_float: dict[str, float]
    project_finish: float
    critical_set: frozenset[str]
    warnings: tuple[str, ...] = ()


def build_network(activities: Iterable[Activity], relations: Iterable[PrecedenceRelation]) -> ActivityNetwork:
    acts = tuple(activities)
    rels = tuple(relations)
    ids = set()
    for a in acts:
        if a.id in ids:
            raise ValueError(f"duplicate activity id {a.id!r}")
        ids.add(a.id)
    for r in rels:
        for ref in (r.predecessor, r.successor):
            if ref not in ids:
                raise DanglingReference(ref, f"relation {r.predecessor}->{r.successor}")
    return ActivityNetwork(acts, rels)


def cpm_pass(
    network: ActivityNetwork,
    durations: Mapping[str, float],
    calendar: Calendar | None = None,
) -> ScheduleResult:
    """Deterministic forward/backward pass in workday time.

    The calendar argument is accepted for interface symmetry with date-level
    reporting; the pass itself is pure workday arithmetic.
    """
    vec = network.duration_vector(durations)
    arr = network.kernel_arrays()
    es, ef, lf, finish = kernel.cpm_full(
        arr["topo"],
        arr["in_off"],
        arr["in_pred"],
        arr["in_kind"],
        arr["in_lag"],
        arr["out_off"],
        arr["out_succ"],
        arr["out_kind"],
        arr["out_lag"],
        vec,
    )
    ls = lf - vec
    tf = lf - ef
    ids = [a.id for a in network.activities]
    warnings = _clamp_warnings(network, arr, vec, es, ef)
    critical = frozenset(ids[i] for i in range(len(ids)) if abs(tf[i]) <= FLOAT_EPS)
    return ScheduleResult(
        es=dict(zip(ids, es.tolist())),
        ef=dict(zip(ids, ef.tolist())),
        ls=dict(zip(ids, ls.tolist())),
        lf=dict(zip(ids, lf.tolist())),
        total_float=dict(zip(ids, tf.tolist())),
        project_finish=float(finish),
        critical_set=critical,
        warnings=warnings,
    )


def _clamp_warnings(network, arr, vec, es, ef):
    # Negative lags can pull an unclamped ES below zero; the kernel clamps to
    # 0, and the deterministic pass reports which activities were affected.
    out = []
    topo, in_off = arr["topo"], arr["in_off"]
    for j in range(len(topo)):
        a = topo[j]
        if es[a] != 0.0 or in_off[j] == in_off[j + 1]:
            continue
        best = -math.inf
        for r in range(in_off[j], in_off[j + 1]):
            p = arr["in_pred"][r]
            k = arr["in_kind"][r]
            lag = arr["in_lag"][r]
            if k == 0:
                cand = ef[p] + lag
            elif k == 1:
                cand = es[p] + lag
            elif k == 2:
                cand = ef[p] + lag - vec[a]
            else:
                cand = es[p] + lag - vec[a]
            best = max(best, cand)
        if best < 0:
            out.append(f"start of {network.activities[a].id} clamped to 0 (unclamped {best:g})")
    return tuple(out)
