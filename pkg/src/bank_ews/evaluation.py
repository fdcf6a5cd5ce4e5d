"""Calibration pairing, confusion matrices, horizon study and the rolling probe."""

from __future__ import annotations

import csv
import io
import math
import statistics
import warnings
from dataclasses import dataclass
from typing import Iterable, Mapping, Optional, Sequence

import numpy as np

from .data_model import Dataset
from .discriminant import DiscriminantModel, Label, LabeledVector, to_arrays
from .errors import EwsError, HorizonMismatch, InsufficientPool
from .indicators import indicators_for
from .periods import Period, PeriodRange


@dataclass(frozen=True)
class ConfusionMatrix:
    """Counts with distressed as the positive class."""

    tp: int
    fn: int
    fp: int
    tn: int

    def __post_init__(self):
        if min(self.tp, self.fn, self.fp, self.tn) < 0:
            raise ValueError("confusion counts must be >= 0")

    @classmethod
    def from_decisions(cls, actual_distressed, predicted_distressed) -> "ConfusionMatrix":
        a = np.asarray(actual_distressed, dtype=bool)
        p = np.asarray(predicted_distressed, dtype=bool)
        return cls(
            tp=int(np.sum(a & p)),
            fn=int(np.sum(a & ~p)),
            fp=int(np.sum(~a & p)),
            tn=int(np.sum(~a & ~p)),
        )

    @property
    def total(self) -> int:
        return self.tp + self.fn + self.fp + self.tn

    @property
    def accuracy(self) -> float:
        return 100.0 * (self.tp + self.tn) / self.total

    @property
    def distressed_recall(self) -> float:
        return 100.0 * self.tp / (self.tp + self.fn)

    @property
    def healthy_recall(self) -> float:
        return 100.0 * self.tn / (self.fp + self.tn)

    @property
    def type_i_rate(self) -> float:
        return 100.0 - self.distressed_recall

    @property
    def type_ii_rate(self) -> float:
        return 100.0 - self.healthy_recall

    def __add__(self, other: "ConfusionMatrix") -> "ConfusionMatrix":
        return ConfusionMatrix(self.tp + other.tp, self.fn + other.fn,
                               self.fp + other.fp, self.tn + other.tn)


def evaluate(model: DiscriminantModel, data: Iterable[LabeledVector]) -> ConfusionMatrix:
    X, y = to_arrays(data)
    if y.size == 0:
        raise ValueError("cannot evaluate on empty data")
    return ConfusionMatrix.from_decisions(y, model.decisions(X))


def horizon_study(model_per_horizon: Mapping[int, DiscriminantModel],
                  data_per_horizon: Mapping[int, Sequence[LabeledVector]]) -> dict[int, ConfusionMatrix]:
    if set(model_per_horizon) != set(data_per_horizon):
        raise HorizonMismatch(
            f"model horizons {sorted(model_per_horizon)} != data horizons {sorted(data_per_horizon)}"
        )
    if not model_per_horizon:
        raise HorizonMismatch("no horizons given")
    out = {}
    for h in sorted(model_per_horizon, reverse=True):
        data = list(data_per_horizon[h])
        if not data:
            raise ValueError(f"empty data for horizon {h}")
        out[h] = evaluate(model_per_horizon[h], data)
    return out


def _pct(x: float) -> str:
    return "-" if math.isnan(x) else f"{x:.0f}"


def render_horizon_table(table: Mapping[int, ConfusionMatrix]) -> str:
    """Plain-text table in Yes/No layout: rows are actual, columns predicted."""

    def safe(fn):
        try:
            return fn()
        except ZeroDivisionError:
            return float("nan")

    horizons = sorted(table, reverse=True)
    col = 24
    title = " " * 10 + "".join(
        f"{h} year{'s' if h != 1 else ''} before c.".ljust(col) for h in horizons
    )
    head = " " * 10 + "".join(f"{'Yes':>5} {'No':>5} {'%':>5}".ljust(col) for _ in horizons)
    yes = "Yes".ljust(10) + "".join(
        f"{cm.tp:>5} {cm.fn:>5} {_pct(safe(lambda cm=cm: cm.distressed_recall)):>5}".ljust(col)
        for cm in (table[h] for h in horizons)
    )
    no = "No".ljust(10) + "".join(
        f"{cm.fp:>5} {cm.tn:>5} {_pct(safe(lambda cm=cm: cm.healthy_recall)):>5}".ljust(col)
        for cm in (table[h] for h in horizons)
    )
    acc = "Accuracy".ljust(10) + "".join(f"{table[h].accuracy:.2f}%".ljust(col) for h in horizons)
    return "\n".join(line.rstrip() for line in (title, head, yes, no, acc)) + "\n"


# -- pairing ------------------------------------------------------------------


@dataclass(frozen=True)
class PairingResult:
    pairs: tuple[tuple[str, str], ...]
    unmatched: tuple[str, ...]


def pair_banks(intervened: Sequence[tuple[str, float]],
               active: Sequence[tuple[str, float]]) -> PairingResult:
    """Greedy nearest-capitalization matching without replacement.

    Intervened banks are processed largest first; each takes the remaining
    active bank closest in capitalization, ties going to the smaller id.
    """
    if not intervened or not active:
        raise ValueError("both bank lists must be non-empty")
    for bank_id, cap in list(intervened) + list(active):
        if not cap > 0:
            raise ValueError(f"capitalization of {bank_id} must be > 0")

    pool = dict(active)
    pairs, unmatched = [], []
    for bank_id, cap in sorted(intervened, key=lambda t: (-t[1], t[0])):
        if not pool:
            unmatched.append(bank_id)
            continue
        best = min(pool, key=lambda a: (abs(pool[a] - cap), a))
        pairs.append((bank_id, best))
        del pool[best]
    if unmatched:
        warnings.warn(
            f"{len(unmatched)} intervened bank(s) left unmatched: fewer active banks than intervened",
            InsufficientPool,
            stacklevel=2,
        )
    return PairingResult(tuple(pairs), tuple(unmatched))


def capitalization_pool(d: Dataset, window: Optional[PeriodRange] = None):
    """Per-bank mean capitalization split into (intervened, active) lists."""
    caps: dict[str, list[float]] = {}
    for r in d.all_records():
        if window is None or r.period in window:
            caps.setdefault(r.bank_id, []).append(r.average_capitalization)
    intervened, active = [], []
    for bank_id in sorted(caps):
        status, _ = d.bank_status(bank_id)
        entry = (bank_id, float(np.mean(caps[bank_id])))
        (intervened if status == "intervened" else active).append(entry)
    return intervened, active


# -- labeling -----------------------------------------------------------------


@dataclass(frozen=True)
class LabelingResult:
    vectors: tuple[LabeledVector, ...]
    exceptions: tuple[tuple[str, Period, str], ...]


def label_dataset(d: Dataset, window: Optional[PeriodRange] = None,
                  intervened_from: Optional[Period] = None,
                  intervened_by: Optional[Period] = None) -> LabelingResult:
    """Labeled indicator vectors for every retained bank-period in ``window``.

    A bank-period is distressed when its bank is intervened with an
    intervention period inside ``[intervened_from, intervened_by]`` (either
    bound may be open).
    """
    vectors, exceptions = [], []
    for r in d.banks:
        if window is not None and r.period not in window:
            continue
        distressed = (
            r.intervened
            and (intervened_from is None or r.intervention_period >= intervened_from)
            and (intervened_by is None or r.intervention_period <= intervened_by)
        )
        try:
            x = indicators_for(d, r)
        except (EwsError, ArithmeticError) as exc:
            exceptions.append((r.bank_id, r.period, str(exc)))
            continue
        label = Label.DISTRESSED if distressed else Label.HEALTHY
        vectors.append(LabeledVector(x, label, r.bank_id, r.period))
    return LabelingResult(tuple(vectors), tuple(exceptions))


# -- probe --------------------------------------------------------------------


@dataclass(frozen=True)
class ProbeEntry:
    bank_id: str
    period: Period
    score: float
    flagged: bool
    distance: float


@dataclass(frozen=True)
class Alert:
    bank_id: str
    first_flag_period: Period
    intervention_period: Optional[Period]
    lead_periods: Optional[int]


@dataclass(frozen=True)
class YearlyStats:
    year: int
    n_banks: int
    median: float
    mean: float
    stdev: float


YEARLY_REDUCERS = {
    "max": max,
    "mean": lambda xs: sum(xs) / len(xs),
    "last": lambda xs: xs[-1],
}


@dataclass(frozen=True)
class ProbeReport:
    threshold: float
    entries: tuple[ProbeEntry, ...]
    yearly_stats: tuple[YearlyStats, ...]
    bank_yearly: Mapping[tuple[str, int], float]
    alerts: tuple[Alert, ...]
    exceptions: tuple[tuple[str, Period, str], ...] = ()
    yearly: str = "max"

    @property
    def flagged(self) -> tuple[ProbeEntry, ...]:
        return tuple(e for e in self.entries if e.flagged)

    @property
    def false_alarms(self) -> tuple[Alert, ...]:
        """Alerts for banks with no recorded intervention."""
        return tuple(a for a in self.alerts if a.intervention_period is None)


def yearly_values(entries: Iterable[ProbeEntry], how: str = "max") -> dict[tuple[str, int], float]:
    """One value per (bank, calendar year) reduced from its semiannual scores."""
    reduce = YEARLY_REDUCERS[how]
    grouped: dict[tuple[str, int], list[float]] = {}
    for e in sorted(entries, key=lambda e: (e.bank_id, e.period)):
        grouped.setdefault((e.bank_id, e.period.year), []).append(e.score)
    return {k: float(reduce(v)) for k, v in sorted(grouped.items())}


def yearly_statistics(bank_yearly: Mapping[tuple[str, int], float]) -> tuple[YearlyStats, ...]:
    """Median, mean and sample standard deviation over all banks, per year."""
    by_year: dict[int, list[float]] = {}
    for (_, year), v in sorted(bank_yearly.items()):
        by_year.setdefault(year, []).append(v)
    out = []
    for year in sorted(by_year):
        vals = by_year[year]
        sd = statistics.stdev(vals) if len(vals) > 1 else float("nan")
        out.append(YearlyStats(year, len(vals), statistics.median(vals), statistics.fmean(vals), sd))
    return tuple(out)


def build_alerts(entries: Iterable[ProbeEntry],
                 interventions: Mapping[str, Optional[Period]]) -> tuple[Alert, ...]:
    first: dict[str, Period] = {}
    for e in entries:
        if e.flagged and (e.bank_id not in first or e.period < first[e.bank_id]):
            first[e.bank_id] = e.period
    alerts = []
    for bank_id in sorted(first):
        iv = interventions.get(bank_id)
        lead = iv - first[bank_id] if iv is not None else None
        alerts.append(Alert(bank_id, first[bank_id], iv, lead))
    return tuple(alerts)


def probe(model: DiscriminantModel, d: Dataset, start: Period, end: Period,
          yearly: str = "max") -> ProbeReport:
    """Score every bank in every half-year of ``[start, end]`` where data exists.

    Bank-periods that cannot be scored (excluded at load, missing macro,
    zero denominators) land in ``exceptions``; the probe itself completes.
    """
    window = PeriodRange(start, end)
    if yearly not in YEARLY_REDUCERS:
        raise ValueError(f"yearly must be one of {sorted(YEARLY_REDUCERS)}")

    entries, exceptions = [], []
    for r in d.banks:
        if r.period not in window:
            continue
        try:
            x = indicators_for(d, r)
        except (EwsError, ArithmeticError) as exc:
            exceptions.append((r.bank_id, r.period, str(exc)))
            continue
        s = float(np.dot(model.weights, x.as_array()))
        entries.append(ProbeEntry(r.bank_id, r.period, s, s >= model.threshold, s - model.threshold))
    for ex in d.exclusions:
        if ex.record.period in window:
            exceptions.append((ex.bank_id, ex.record.period, ex.reason))

    entries.sort(key=lambda e: (e.bank_id, e.period))
    exceptions.sort(key=lambda t: (t[0], t[1]))
    interventions = {b: d.bank_status(b)[1] for b in d.bank_ids}
    bank_yearly = yearly_values(entries, yearly)
    return ProbeReport(
        threshold=model.threshold,
        entries=tuple(entries),
        yearly_stats=yearly_statistics(bank_yearly),
        bank_yearly=bank_yearly,
        alerts=build_alerts(entries, interventions),
        exceptions=tuple(exceptions),
        yearly=yearly,
    )


# -- report rendering ---------------------------------------------------------

PROBE_HEADER = ("bank_id", "period", "score", "flagged", "distance")
ALERTS_HEADER = ("bank_id", "first_flag_period", "intervention_period", "lead_periods")
YEARLY_HEADER = ("year", "n_banks", "median", "mean", "stdev")


def _csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def probe_csv_text(entries: Iterable[ProbeEntry]) -> str:
    return _csv(PROBE_HEADER, (
        (e.bank_id, e.period, repr(e.score), "true" if e.flagged else "false", repr(e.distance))
        for e in entries
    ))


def alerts_csv_text(alerts: Iterable[Alert]) -> str:
    return _csv(ALERTS_HEADER, (
        (a.bank_id, a.first_flag_period, a.intervention_period or "",
         "" if a.lead_periods is None else a.lead_periods)
        for a in alerts
    ))


def yearly_csv_text(stats: Iterable[YearlyStats]) -> str:
    return _csv(YEARLY_HEADER, (
        (s.year, s.n_banks, repr(s.median), repr(s.mean), repr(s.stdev)) for s in stats
    ))


def read_probe_csv(text: str) -> tuple[ProbeEntry, ...]:
    reader = csv.reader(io.StringIO(text))
    header = next(reader, None)
    if header is None or tuple(h.strip() for h in header) != PROBE_HEADER:
        raise ValueError(f"expected probe header {','.join(PROBE_HEADER)}")
    out = []
    for lineno, row in enumerate(reader, start=2):
        if not row:
            continue
        if len(row) != len(PROBE_HEADER) or row[3] not in ("true", "false"):
            raise ValueError(f"malformed probe row {lineno}: {row}")
        out.append(ProbeEntry(row[0], Period.parse(row[1]), float(row[2]),
                              row[3] == "true", float(row[4])))
    return tuple(out)


def render_probe_text(entries: Sequence[ProbeEntry], yearly: str = "max") -> str:
    """Per-year cohort statistics plus every flagged bank-period."""
    bank_yearly = yearly_values(entries, yearly)
    stats = yearly_statistics(bank_yearly)
    flagged = [e for e in entries if e.flagged]
    flagged_banks = sorted({e.bank_id for e in flagged})

    lines = [f"{'Year':<6}" + "".join(f"{b:>12}" for b in flagged_banks)
             + f"{'Median':>10}{'Mean':>10}{'StDev':>10}{'Banks':>7}"]
    for s in stats:
        cells = "".join(
            f"{bank_yearly[(b, s.year)]:>12.0f}" if (b, s.year) in bank_yearly else f"{'':>12}"
            for b in flagged_banks
        )
        lines.append(f"{s.year:<6}{cells}{s.median:>10.0f}{s.mean:>10.0f}{s.stdev:>10.0f}{s.n_banks:>7}")
    lines.append("")
    lines.append(f"flagged bank-periods: {len(flagged)}")
    for e in flagged:
        lines.append(f"  {e.bank_id} {e.period} score={e.score:.3f} distance={e.distance:+.3f}")
    return "\n".join(lines) + "\n"
