"""Deterministic synthetic data: Gaussian class samples and full bank/macro panels.

Random streams come from ``numpy.random.SeedSequence(seed, spawn_key=(stream, i))``
feeding PCG64, so each bank's draws depend only on the seed and the bank's
index, never on generation order.

Panels are built backward from a target score per bank-period: macro series
follow smooth trajectories, the bank ratios f1..f4 are drawn, and f5 is
solved so that ``weights . x`` hits the target. Balance-sheet fields then
follow from the ratios with ``total_assets = average_assets = 100``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Mapping, Optional

import numpy as np

from .data_model import (
    INTERVENED,
    BankPeriodRecord,
    MacroPeriodRecord,
    banks_csv_text,
    macro_csv_text,
)
from .discriminant import PAPER_THRESHOLD, PAPER_WEIGHTS, Label, LabeledVector
from .errors import InvalidConfig, NonPositiveDefinite
from .indicators import IndicatorVector, macro_indicators
from .periods import Period, PeriodRange

MACRO_STREAM = 0
HEALTHY_STREAM = 1
DISTRESSED_STREAM = 2
BANK_STREAM = 3

# year -> (distressed bank's yearly score, cohort median, cohort stdev)
CAPITAL_TABLE = {
    1996: (-199.0, -327.0, 137.0),
    1997: (-289.0, -445.0, 445.0),
    1998: (-270.0, -347.0, 111.0),
    1999: (-272.0, -404.0, 620.0),
    2000: (-150.0, -294.0, 144.0),
}
DEFAULT_COHORT = (-350.0, 130.0)


def _rng(seed: int, stream: int, index: int = 0) -> np.random.Generator:
    ss = np.random.SeedSequence(entropy=seed, spawn_key=(stream, index))
    return np.random.Generator(np.random.PCG64(ss))


@dataclass(frozen=True)
class ScriptedBank:
    """A bank whose score follows a fixed path.

    Periods missing from ``path`` fall back to the cohort draw. The bank
    reports up to and including the first period whose score reaches the
    intervention rule, and is intervened in the period after.
    """

    bank_id: str
    path: Mapping[Period, float]
    capitalization: float = 500.0


@dataclass(frozen=True)
class SynthConfig:
    seed: int = 0
    n_healthy: int = 0
    n_distressed: int = 0
    mean_healthy: tuple = (0.0,) * 10
    mean_distressed: tuple = (1.0,) * 10
    shared_covariance: Optional[np.ndarray] = None
    n_banks: int = 1
    n_periods: int = 2
    start: Period = Period(1996, 1)
    intervention_rule: float = PAPER_THRESHOLD
    score_weights: tuple = PAPER_WEIGHTS
    cohort: Mapping[int, tuple[float, float]] = field(default_factory=dict)
    cohort_margin: float = 20.0
    scripted: tuple[ScriptedBank, ...] = ()

    def __post_init__(self):
        for name in ("n_healthy", "n_distressed", "n_banks", "n_periods"):
            if getattr(self, name) < 0:
                raise InvalidConfig(f"{name} must be >= 0")
        if not 0 <= self.seed < 2**64:
            raise InvalidConfig("seed must be a 64-bit unsigned integer")

    @property
    def covariance(self) -> np.ndarray:
        d = len(self.mean_healthy)
        if self.shared_covariance is None:
            return np.eye(d)
        return np.asarray(self.shared_covariance, dtype=np.float64)

    @property
    def periods(self) -> PeriodRange:
        return PeriodRange(self.start, self.start.shift(self.n_periods - 1))

    def cohort_for(self, year: int) -> tuple[float, float]:
        if year in self.cohort:
            return self.cohort[year]
        return DEFAULT_COHORT


def capital_scenario(seed: int = 0, n_banks: int = 68, n_periods: int = 18,
                     start: Period = Period(1996, 1)) -> SynthConfig:
    """One bank shadowing the tabulated distressed path, crossing the threshold
    in 2000-H1; the rest of the cohort centred on the yearly medians and kept
    below the threshold."""
    if n_banks < 1:
        raise InvalidConfig("n_banks must be >= 1")
    path = {}
    for year, (score, _, _) in CAPITAL_TABLE.items():
        if year == 2000:
            path[Period(2000, 1)] = score
        else:
            path[Period(year, 1)] = score - 10.0
            path[Period(year, 2)] = score
    cohort = {year: (median, sd) for year, (_, median, sd) in CAPITAL_TABLE.items()}
    return SynthConfig(
        seed=seed,
        n_banks=n_banks,
        n_periods=n_periods,
        start=start,
        cohort=cohort,
        scripted=(ScriptedBank("CAPITAL", path),),
    )


def _cholesky(cov: np.ndarray) -> np.ndarray:
    if cov.ndim != 2 or cov.shape[0] != cov.shape[1]:
        raise NonPositiveDefinite("covariance must be square")
    if not np.allclose(cov, cov.T, rtol=0, atol=1e-12 * max(1.0, np.abs(cov).max())):
        raise NonPositiveDefinite("covariance must be symmetric")
    try:
        return np.linalg.cholesky(cov)
    except np.linalg.LinAlgError:
        raise NonPositiveDefinite("covariance is not positive definite") from None


def gaussian_arrays(c: SynthConfig) -> tuple[np.ndarray, np.ndarray]:
    """``(X, distressed)`` with healthy rows first; any dimension."""
    cov = c.covariance
    L = _cholesky(cov)
    d = cov.shape[0]
    mh = np.asarray(c.mean_healthy, dtype=np.float64)
    md = np.asarray(c.mean_distressed, dtype=np.float64)
    if mh.shape != (d,) or md.shape != (d,):
        raise InvalidConfig("class means must match the covariance dimension")
    zh = _rng(c.seed, HEALTHY_STREAM).standard_normal((c.n_healthy, d))
    zd = _rng(c.seed, DISTRESSED_STREAM).standard_normal((c.n_distressed, d))
    X = np.vstack([mh + zh @ L.T, md + zd @ L.T])
    y = np.concatenate([np.zeros(c.n_healthy, bool), np.ones(c.n_distressed, bool)])
    return X, y


def gaussian_classes(c: SynthConfig) -> list[LabeledVector]:
    if len(c.mean_healthy) != 10:
        raise InvalidConfig("labeled vectors need 10-dimensional means")
    X, y = gaussian_arrays(c)
    out = []
    for i, (row, distressed) in enumerate(zip(X, y)):
        label = Label.DISTRESSED if distressed else Label.HEALTHY
        out.append(LabeledVector(IndicatorVector.from_array(row), label, f"{label.value[0].upper()}{i:05d}"))
    return out


# -- panel --------------------------------------------------------------------


def _macro_series(c: SynthConfig) -> list[MacroPeriodRecord]:
    """Smooth trajectories over the predecessor of ``start`` through the last period."""
    rng = _rng(c.seed, MACRO_STREAM)
    out = []
    first = c.start.predecessor()
    for k in range(c.n_periods + 1):
        noise = rng.normal(0.0, 1.0, 6)
        active = 40.0 + 5.0 * math.sin(k / 3.0) + 0.5 * noise[0]
        spread = 12.0 + 2.0 * math.cos(k / 4.0) + 0.3 * noise[1]
        m1 = 1000.0 * 1.06**k
        out.append(MacroPeriodRecord(
            period=first.shift(k),
            active_rate=round(active, 6),
            passive_rate=round(active - spread, 6),
            reer_index=round(110.0 + 10.0 * math.sin(k / 5.0) + noise[2], 6),
            m1=round(m1, 6),
            m2=round(m1 * (2.5 + 0.2 * math.sin(k / 6.0) + 0.02 * abs(noise[3])), 6),
            igaem_index=round(100.0 * 1.01**k * (1.0 + 0.01 * math.sin(k) + 0.002 * noise[4]), 6),
            reserves_ex_gold=round(10000.0 * (1.0 + 0.05 * math.sin(k / 2.0) + 0.01 * noise[5]), 6),
        ))
    return out


def _cohort_score(c: SynthConfig, rng: np.random.Generator, year: int) -> float:
    center, sd = c.cohort_for(year)
    ceiling = c.intervention_rule - c.cohort_margin
    for _ in range(1000):
        z = rng.standard_normal()
        s = center + sd * z
        if z >= -3.0 and s <= ceiling:
            return s
    raise InvalidConfig(f"cohort distribution for {year} lies above the intervention rule")


def _record_for(c: SynthConfig, rng: np.random.Generator, bank_id: str, period: Period,
                target: float, macro_x: tuple, capitalization: float) -> BankPeriodRecord:
    w = np.asarray(c.score_weights, dtype=np.float64)
    if w.shape != (10,) or w[4] == 0:
        raise InvalidConfig("score_weights must have 10 entries with nonzero f5 weight")
    f1 = rng.uniform(2.0, 15.0)
    f2 = rng.uniform(40.0, 80.0)
    f3 = rng.normal(2.0, 1.0)
    equity_ratio = rng.uniform(0.08, 0.15)
    outflows = rng.uniform(5.0, 15.0)
    f4 = f3 / equity_ratio
    partial = np.array([f1, f2, f3, f4, 0.0, *macro_x])
    f5 = (target - float(w @ partial)) / w[4]
    if f5 < 0:
        raise InvalidConfig(f"target score {target} unreachable for {bank_id} at {period}")
    return BankPeriodRecord(
        bank_id=bank_id,
        period=period,
        other_assets=f1,
        total_assets=100.0,
        financial_outflows=outflows,
        average_total_inflows=100.0 * outflows / f2,
        operative_margin=f3,
        average_assets=100.0,
        average_equity=100.0 * equity_ratio,
        financial_inflows=f5 * outflows / 100.0,
        average_capitalization=capitalization,
    )


def generate_panel_records(c: SynthConfig) -> tuple[list[BankPeriodRecord], list[MacroPeriodRecord]]:
    if c.n_banks < 1 or c.n_periods < 2:
        raise InvalidConfig("panel needs n_banks >= 1 and n_periods >= 2")
    if len(c.scripted) > c.n_banks:
        raise InvalidConfig("more scripted banks than n_banks")
    macro = _macro_series(c)
    by_period = {m.period: m for m in macro}
    macro_x = {
        p: macro_indicators(by_period[p], by_period[p.predecessor()]) for p in c.periods
    }

    n_plain = c.n_banks - len(c.scripted)
    width = max(3, len(str(n_plain)))
    plan = [(f"BANK{i + 1:0{width}d}", None) for i in range(n_plain)]
    plan += [(s.bank_id, s) for s in c.scripted]
    ids = [bank_id for bank_id, _ in plan]
    if len(set(ids)) != len(ids):
        raise InvalidConfig("duplicate bank ids")

    records = []
    for index, (bank_id, script) in enumerate(plan):
        rng = _rng(c.seed, BANK_STREAM, index)
        cap = script.capitalization if script else float(np.exp(rng.normal(6.0, 0.8)))
        rows, crossing = [], None
        for p in c.periods:
            if script is not None and p in script.path:
                target = float(script.path[p])
            else:
                target = _cohort_score(c, rng, p.year)
            rows.append(_record_for(c, rng, bank_id, p, target, macro_x[p], cap))
            if script is not None and target >= c.intervention_rule:
                crossing = p
                break
        if crossing is not None:
            iv = crossing.successor()
            rows = [replace(r, status=INTERVENED, intervention_period=iv) for r in rows]
        records.extend(rows)
    return records, macro


@dataclass(frozen=True)
class PanelFiles:
    banks_csv: str
    macro_csv: str


def generate_panel(c: SynthConfig) -> PanelFiles:
    banks, macro = generate_panel_records(c)
    return PanelFiles(banks_csv_text(banks), macro_csv_text(macro))
