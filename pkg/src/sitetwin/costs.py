"""Cost items keyed by CSI division and WBS, with regional localization.

Localization rule: material and equipment components scale by the city cost
index factor (printed index / 100); labor re-prices from crew hours at the
local wage when both are available, otherwise it scales by the index like
the other components. Everything is integer cents.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from decimal import ROUND_HALF_UP, Decimal
from typing import Iterable, Mapping

from .divisions import is_known_division
from .errors import ItemUniverseMismatch, MissingWagePair

REVIEW_CONFIDENCE_THRESHOLD = 0.70


def _round_cents(value: float) -> int:
    return int(Decimal(repr(value)).quantize(Decimal(1), rounding=ROUND_HALF_UP))


@dataclass(frozen=True)
class CostItem:
    item_id: str
    csi_division: str
    wbs_id: str
    material: int  # cents
    labor: int
    equipment: int
    crew_hours: float | None = None
    mapping_confidence: float = 1.0
    trade: str = "general"

    def __post_init__(self):
        if not is_known_division(self.csi_division):
            raise ValueError(f"{self.item_id}: unknown division {self.csi_division!r}")
        if not (0.0 <= self.mapping_confidence <= 1.0):
            raise ValueError(f"{self.item_id}: confidence out of range")

    @property
    def base_cost(self) -> int:
        return self.material + self.labor + self.equipment

    @property
    def needs_review(self) -> bool:
        return self.mapping_confidence < REVIEW_CONFIDENCE_THRESHOLD


@dataclass(frozen=True)
class LocalizationFactors:
    cci_factor: float = 1.0
    local_wage: Mapping[str, int] | None = None  # cents per hour by trade
    national_wage: Mapping[str, int] | None = None
    division_factors: Mapping[str, float] | None = None  # overrides per division

    def __post_init__(self):
        if self.cci_factor <= 0:
            raise ValueError("cci_factor must be > 0")
        if self.division_factors is not None and any(
            f <= 0 for f in self.division_factors.values()
        ):
            raise ValueError("division factors must be > 0")
        if (self.local_wage is None) != (self.national_wage is None):
            raise MissingWagePair("local and national wages must be supplied together")

    def factor_for(self, division: str) -> float:
        if self.division_factors is not None and division in self.division_factors:
            return self.division_factors[division]
        return self.cci_factor


def localize(item: CostItem, factors: LocalizationFactors) -> int:
    """Localized total cost of one item, in cents."""
    factor = factors.factor_for(item.csi_division)
    material = _round_cents(item.material * factor)
    equipment = _round_cents(item.equipment * factor)
    wage = None
    if factors.local_wage is not None and item.crew_hours is not None:
        wage = factors.local_wage.get(item.trade)
    if wage is not None:
        labor = _round_cents(item.crew_hours * wage)
    else:
        labor = _round_cents(item.labor * factor)
    return material + labor + equipment


@dataclass
class CostLedger:
    items: dict[str, CostItem] = field(default_factory=dict)

    @staticmethod
    def from_items(items: Iterable[CostItem]) -> "CostLedger":
        ledger = CostLedger()
        for item in items:
            if item.item_id in ledger.items:
                raise ValueError(f"duplicate cost item {item.item_id!r}")
            ledger.items[item.item_id] = item
        return ledger

    def clone(self) -> "CostLedger":
        return CostLedger(dict(self.items))

    def scale_items(self, item_ids: Iterable[str], factor: float) -> None:
        for item_id in item_ids:
            item = self.items[item_id]
            self.items[item_id] = replace(
                item,
                material=_round_cents(item.material * factor),
                labor=_round_cents(item.labor * factor),
                equipment=_round_cents(item.equipment * factor),
            )

    def items_in_division(self, division: str) -> list[str]:
        return [i.item_id for i in self.items.values() if i.csi_division == division]

    def total(self) -> int:
        return sum(i.base_cost for i in self.items.values())

    def review_queue(self) -> list[str]:
        return sorted(i.item_id for i in self.items.values() if i.needs_review)


def rollup_costs(ledger: CostLedger, group_by: str = "division") -> dict[str, int]:
    """Exact integer-cent totals per CSI division or WBS id."""
    if group_by not in ("division", "wbs"):
        raise ValueError("group_by must be 'division' or 'wbs'")
    out: dict[str, int] = {}
    for item in ledger.items.values():
        key = item.csi_division if group_by == "division" else item.wbs_id
        out[key] = out.get(key, 0) + item.base_cost
    return out


def ledger_delta(base: CostLedger, modified: CostLedger) -> dict:
    """modified - base, overall and per division (cents)."""
    if set(base.items) != set(modified.items):
        missing = set(base.items) ^ set(modified.items)
        raise ItemUniverseMismatch(f"ledgers disagree on items: {sorted(missing)[:5]}")
    per_division: dict[str, int] = {}
    total = 0
    for item_id, item in modified.items.items():
        d = item.base_cost - base.items[item_id].base_cost
        if d:
            per_division[item.csi_division] = per_division.get(item.csi_division, 0) + d
            total += d
    return {"total": total, "per_division": per_division}
