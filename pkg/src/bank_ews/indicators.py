"""The ten model inputs: five bank ratios and five macro indicators.

All ratios are expressed in percent. Percent changes compare a half-year
with the immediately preceding one.
"""

from __future__ import annotations

from dataclasses import astuple, dataclass, fields

import numpy as np

from .data_model import BankPeriodRecord, MacroPeriodRecord
from .errors import DivisionByZero, NonAdjacentPeriods, PeriodMismatch

FEATURE_NAMES = ("f1", "f2", "f3", "f4", "f5", "m1", "m2", "m3", "m4", "m5")


@dataclass(frozen=True)
class IndicatorVector:
    f1: float  # other assets / total assets
    f2: float  # financial outflows / average total inflows
    f3: float  # operative margin / average assets
    f4: float  # operative margin / average equity
    f5: float  # financial inflows / financial outflows
    m1: float  # active - passive rate spread, percentage points
    m2: float  # real effective exchange rate index
    m3: float  # M2 / M1
    m4: float  # IGAEM change, percent
    m5: float  # reserves ex gold change, percent

    def as_array(self) -> np.ndarray:
        return np.array(astuple(self), dtype=np.float64)

    @classmethod
    def from_array(cls, values) -> "IndicatorVector":
        arr = np.asarray(values, dtype=np.float64)
        if arr.shape != (len(FEATURE_NAMES),):
            raise ValueError(f"expected {len(FEATURE_NAMES)} values, got shape {arr.shape}")
        return cls(*(float(v) for v in arr))

    @classmethod
    def zeros(cls) -> "IndicatorVector":
        return cls(*([0.0] * len(fields(cls))))


def _pct(num: float, den: float, field: str) -> float:
    if den == 0:
        raise DivisionByZero(field)
    return 100.0 * num / den


def financial_indicators(b: BankPeriodRecord) -> tuple[float, float, float, float, float]:
    return (
        _pct(b.other_assets, b.total_assets, "total_assets"),
        _pct(b.financial_outflows, b.average_total_inflows, "average_total_inflows"),
        _pct(b.operative_margin, b.average_assets, "average_assets"),
        _pct(b.operative_margin, b.average_equity, "average_equity"),
        _pct(b.financial_inflows, b.financial_outflows, "financial_outflows"),
    )


def macro_indicators(current: MacroPeriodRecord, previous: MacroPeriodRecord):
    """Spread, REER, M2/M1 and the half-year percent changes of IGAEM and reserves."""
    if current.period.predecessor() != previous.period:
        raise NonAdjacentPeriods(
            f"{previous.period} is not the predecessor of {current.period}"
        )
    return (
        current.active_rate - current.passive_rate,
        current.reer_index,
        current.m2 / current.m1,
        _pct(current.igaem_index - previous.igaem_index, previous.igaem_index, "igaem_index"),
        _pct(current.reserves_ex_gold - previous.reserves_ex_gold,
             previous.reserves_ex_gold, "reserves_ex_gold"),
    )


def assemble(b: BankPeriodRecord, macro_current: MacroPeriodRecord,
             macro_previous: MacroPeriodRecord) -> IndicatorVector:
    if b.period != macro_current.period:
        raise PeriodMismatch(
            f"bank record period {b.period} != macro period {macro_current.period}"
        )
    return IndicatorVector(*financial_indicators(b), *macro_indicators(macro_current, macro_previous))


def indicators_for(dataset, record: BankPeriodRecord) -> IndicatorVector:
    """Assemble a record's vector using the dataset's macro series."""
    macro = dataset.macro_by_period
    try:
        cur = macro[record.period]
        prev = macro[record.period.predecessor()]
    except KeyError as exc:
        raise PeriodMismatch(f"no macro record for {exc.args[0]}") from None
    return assemble(record, cur, prev)
