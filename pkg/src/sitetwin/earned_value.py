"""Cumulative PV/EV/AC roll-ups, variances, indices, and cost forecasts.

Money is integer cents throughout; ratios keep full float precision
internally and are rounded half-up only when printed. Undefined ratios
(zero denominators) surface as ``None`` and render as an em-dash-free "-"
marker in reports rather than crashing or masquerading as zero.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

from decimal import ROUND_HALF_UP, Decimal

from .errors import PeriodMismatch, ZeroCpi
from .progress import round_half_up


def cents(amount: float | str) -> int:
    """Parse an amount in currency units into integer cents (half-up)."""
    return int((Decimal(str(amount)) * 100).quantize(Decimal(1), rounding=ROUND_HALF_UP))


def _round_cents(value: float) -> int:
    return int(Decimal(repr(value)).quantize(Decimal(1), rounding=ROUND_HALF_UP))


def cents_to_thousands(value: int) -> float:
    return value / 100_000.0


@dataclass(frozen=True)
class BudgetItem:
    item_id: str
    bac: int  # cents
    planned_curve: Mapping[int, float]
    actuals: Mapping[int, int] = field(default_factory=dict)  # cumulative cents

    def __post_init__(self):
        if self.bac < 0:
            raise ValueError(f"{self.item_id}: BAC must be >= 0")
        prev = 0.0
        for period in sorted(self.planned_curve):
            frac = self.planned_curve[period]
            if frac < prev - 1e-12:
                raise ValueError(f"{self.item_id}: planned curve must be non-decreasing")
            prev = frac
        if self.planned_curve and abs(prev - 1.0) > 1e-9:
            raise ValueError(f"{self.item_id}: planned curve must end at 1.0")
        prev_ac = 0
        for period in sorted(self.actuals):
            if self.actuals[period] < prev_ac:
                raise ValueError(f"{self.item_id}: actuals must be cumulative non-decreasing")
            prev_ac = self.actuals[period]


@dataclass(frozen=True)
class EvPoint:
    period: int
    pv: int
    ev: int
    ac: int

    @property
    def sv(self) -> int:
        return self.ev - self.pv

    @property
    def cv(self) -> int:
        return self.ev - self.ac

    @property
    def spi(self) -> float | None:
        return self.ev / self.pv if self.pv > 0 else None

    @property
    def cpi(self) -> float | None:
        return self.ev / self.ac if self.ac > 0 else None


@dataclass(frozen=True)
class EvSeries:
    points: tuple[EvPoint, ...]
    bac: int

    def at(self, period: int) -> EvPoint:
        for p in self.points:
            if p.period == period:
                return p
        raise PeriodMismatch(f"no period {period} in series")


def rollup(
    items: Sequence[BudgetItem],
    measured_pc: Mapping[tuple[str, int], float],
) -> EvSeries:
    """Aggregate item-level budgets and progress into a cumulative EV series.

    PV_t = sum(BAC_i * planned_i_t); EV_t = sum(BAC_i * measured_i_t);
    AC_t = sum(actuals_i_t). Per-item products round to whole cents so sums
    stay exact integers.
    """
    periods = sorted({t for item in items for t in item.planned_curve})
    if not periods:
        raise PeriodMismatch("no periods in any planned curve")
    for (item_id, t), m in measured_pc.items():
        if not (0.0 <= m <= 1.0):
            raise ValueError(f"measured pc out of range for {item_id} at {t}")
    points = []
    last_planned = {item.item_id: 0.0 for item in items}
    last_measured = {item.item_id: 0.0 for item in items}
    last_actual = {item.item_id: 0 for item in items}
    for t in periods:
        pv = ev = ac = 0
        for item in items:
            if t in item.planned_curve:
                last_planned[item.item_id] = item.planned_curve[t]
            m = measured_pc.get((item.item_id, t))
            if m is not None:
                if m < last_measured[item.item_id] - 1e-12:
                    raise ValueError(f"measured pc regresses for {item.item_id} at {t}")
                last_measured[item.item_id] = m
            if t in item.actuals:
                last_actual[item.item_id] = item.actuals[t]
            pv += _round_cents(last_planned[item.item_id] * item.bac)
            ev += _round_cents(last_measured[item.item_id] * item.bac)
            ac += last_actual[item.item_id]
        points.append(EvPoint(period=t, pv=pv, ev=ev, ac=ac))
    return EvSeries(points=tuple(points), bac=sum(i.bac for i in items))


def indices(pv: int, ev: int, ac: int) -> dict:
    """SV/CV/SPI/CPI from cumulative money values (cents)."""
    out = {
        "sv": ev - pv,
        "cv": ev - ac,
        "spi": ev / pv if pv > 0 else None,
        "cpi": ev / ac if ac > 0 else None,
    }
    return out


def forecast(bac: int, ev: int, ac: int) -> dict:
    """EAC both ways (CPI-based and work-remaining) plus VAC, in cents.

    The two formulas are algebraically identical for CPI = EV/AC; both are
    computed and must agree to a cent, which the report asserts.
    """
    if ev <= 0 or ac <= 0:
        raise ZeroCpi("CPI undefined: EV and AC must be > 0")
    cpi = ev / ac
    eac_cpi = _round_cents(bac / cpi)
    eac_work_remaining = _round_cents(ac + (bac - ev) / cpi)
    printed_cpi = round_half_up(cpi, 2)
    return {
        "cpi": cpi,
        "eac_cpi": eac_cpi,
        "eac_work_remaining": eac_work_remaining,
        "vac": bac - eac_cpi,
        "eac_at_printed_cpi": _round_cents(bac / printed_cpi) if printed_cpi else None,
    }


def scurve_series(series: EvSeries) -> list[tuple[int, dict]]:
    """Plot-ready cumulative curves labeled BCWS/BCWP/ACWP."""
    return [
        (p.period, {"BCWS": p.pv, "BCWP": p.ev, "ACWP": p.ac}) for p in series.points
    ]


def format_ratio(value: float | None) -> str:
    return "-" if value is None else f"{round_half_up(value, 2):.2f}"
