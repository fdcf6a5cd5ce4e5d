"""Domain records, CSV ingestion/validation and completeness filtering.

Two CSV files make up a dataset: one row per bank and half-year
(``banks.csv``) and one row per half-year of economy-wide series
(``macro.csv``). Validation is strict by default; with ``lenient=True``
bad rows are skipped and reported in :attr:`Dataset.rejected`.
"""

from __future__ import annotations

import csv
import math
import re
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Iterable, Optional

from .errors import DuplicateKey, EmptyWindow, SchemaError
from .periods import Period, PeriodRange

BANKS_HEADER = (
    "bank_id",
    "period",
    "other_assets",
    "total_assets",
    "financial_outflows",
    "avg_total_inflows",
    "operative_margin",
    "avg_assets",
    "avg_equity",
    "financial_inflows",
    "avg_capitalization",
    "status",
    "intervention_period",
)

MACRO_HEADER = (
    "period",
    "active_rate",
    "passive_rate",
    "reer_index",
    "m1",
    "m2",
    "igaem_index",
    "reserves_ex_gold",
)

ACTIVE = "active"
INTERVENED = "intervened"

MISSING_MACRO_PREDECESSOR = "missing macro predecessor"
MISSING_MACRO_PERIOD = "missing macro period"

_DECIMAL_RE = re.compile(r"^[+-]?(\d+(\.\d*)?|\.\d+)([eE][+-]?\d+)?$")


@dataclass(frozen=True)
class BankPeriodRecord:
    bank_id: str
    period: Period
    other_assets: float
    total_assets: float
    financial_outflows: float
    average_total_inflows: float
    operative_margin: float
    average_assets: float
    average_equity: float
    financial_inflows: float
    average_capitalization: float
    status: str = ACTIVE
    intervention_period: Optional[Period] = None

    @property
    def intervened(self) -> bool:
        return self.status == INTERVENED


@dataclass(frozen=True)
class MacroPeriodRecord:
    period: Period
    active_rate: float
    passive_rate: float
    reer_index: float
    m1: float
    m2: float
    igaem_index: float
    reserves_ex_gold: float


@dataclass(frozen=True)
class Exclusion:
    record: BankPeriodRecord
    reason: str

    @property
    def bank_id(self) -> str:
        return self.record.bank_id


@dataclass(frozen=True)
class Dataset:
    banks: tuple[BankPeriodRecord, ...]
    macro: tuple[MacroPeriodRecord, ...]
    exclusions: tuple[Exclusion, ...] = ()
    rejected: tuple[SchemaError, ...] = field(default=(), compare=False)

    @cached_property
    def macro_by_period(self) -> dict[Period, MacroPeriodRecord]:
        return {m.period: m for m in self.macro}

    @cached_property
    def records_by_bank(self) -> dict[str, tuple[BankPeriodRecord, ...]]:
        out: dict[str, list[BankPeriodRecord]] = {}
        for r in self.banks:
            out.setdefault(r.bank_id, []).append(r)
        return {k: tuple(sorted(v, key=lambda r: r.period)) for k, v in sorted(out.items())}

    @property
    def bank_ids(self) -> list[str]:
        """Every bank id seen, retained or excluded, sorted."""
        ids = {r.bank_id for r in self.banks} | {e.bank_id for e in self.exclusions}
        return sorted(ids)

    def all_records(self) -> list[BankPeriodRecord]:
        """Retained and excluded bank-periods, sorted by (bank_id, period)."""
        recs = list(self.banks) + [e.record for e in self.exclusions]
        return sorted(recs, key=lambda r: (r.bank_id, r.period))

    def bank_status(self, bank_id: str) -> tuple[str, Optional[Period]]:
        """Latest recorded status of a bank."""
        recs = [r for r in self.all_records() if r.bank_id == bank_id]
        if not recs:
            raise KeyError(bank_id)
        for r in recs:
            if r.intervened:
                return INTERVENED, r.intervention_period
        return ACTIVE, None


# -- parsing helpers ---------------------------------------------------------


def _parse_number(text: str, row: int, column: str, source: str) -> float:
    s = text.strip()
    if not _DECIMAL_RE.match(s):
        raise SchemaError(row, column, f"not a decimal number: {text!r}", source)
    value = float(s)
    if not math.isfinite(value):
        raise SchemaError(row, column, f"not finite: {text!r}", source)
    return value


def _parse_period(text: str, row: int, column: str, source: str) -> Period:
    try:
        return Period.parse(text)
    except ValueError as exc:
        raise SchemaError(row, column, str(exc), source) from None


def _check(cond: bool, row: int, column: str, message: str, source: str) -> None:
    if not cond:
        raise SchemaError(row, column, message, source)


def _read_rows(path: Path, header: tuple[str, ...]):
    """Yield ``(line number, cells)``; malformed rows yield a SchemaError instead of cells."""
    source = path.name
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            first = next(reader)
        except StopIteration:
            raise SchemaError(1, "header", "file is empty", source) from None
        if tuple(c.strip() for c in first) != header:
            raise SchemaError(1, "header", f"expected header {','.join(header)}", source)
        for lineno, cells in enumerate(reader, start=2):
            if not cells or all(not c.strip() for c in cells):
                continue
            if len(cells) != len(header):
                yield lineno, SchemaError(
                    lineno, "*", f"expected {len(header)} fields, got {len(cells)}", source
                )
                continue
            yield lineno, dict(zip(header, cells))


def _parse_bank_row(row: int, cells: dict[str, str], source: str) -> BankPeriodRecord:
    bank_id = cells["bank_id"].strip()
    _check(bool(bank_id), row, "bank_id", "empty bank_id", source)
    period = _parse_period(cells["period"], row, "period", source)
    num = {
        c: _parse_number(cells[c], row, c, source)
        for c in BANKS_HEADER[2:11]
    }
    for c in ("total_assets", "avg_assets", "avg_total_inflows", "financial_outflows",
              "avg_capitalization"):
        _check(num[c] > 0, row, c, "must be > 0", source)
    for c in ("other_assets", "financial_inflows"):
        _check(num[c] >= 0, row, c, "must be >= 0", source)
    _check(num["avg_equity"] != 0, row, "avg_equity", "must be nonzero", source)

    status = cells["status"].strip()
    _check(status in (ACTIVE, INTERVENED), row, "status",
           f"must be '{ACTIVE}' or '{INTERVENED}', got {status!r}", source)
    raw_iv = cells["intervention_period"].strip()
    intervention = None
    if status == INTERVENED:
        _check(bool(raw_iv), row, "intervention_period", "required when status=intervened", source)
        intervention = _parse_period(raw_iv, row, "intervention_period", source)
    else:
        _check(not raw_iv, row, "intervention_period", "must be empty unless intervened", source)

    return BankPeriodRecord(
        bank_id=bank_id,
        period=period,
        other_assets=num["other_assets"],
        total_assets=num["total_assets"],
        financial_outflows=num["financial_outflows"],
        average_total_inflows=num["avg_total_inflows"],
        operative_margin=num["operative_margin"],
        average_assets=num["avg_assets"],
        average_equity=num["avg_equity"],
        financial_inflows=num["financial_inflows"],
        average_capitalization=num["avg_capitalization"],
        status=status,
        intervention_period=intervention,
    )


def _parse_macro_row(row: int, cells: dict[str, str], source: str) -> MacroPeriodRecord:
    period = _parse_period(cells["period"], row, "period", source)
    num = {c: _parse_number(cells[c], row, c, source) for c in MACRO_HEADER[1:]}
    for c in ("m1", "igaem_index", "reserves_ex_gold", "reer_index"):
        _check(num[c] > 0, row, c, "must be > 0", source)
    _check(num["m2"] >= num["m1"], row, "m2", "must be >= m1", source)
    return MacroPeriodRecord(period=period, **num)


def _load_table(path: Path, header, parse, key, lenient: bool):
    if not path.is_file():
        raise FileNotFoundError(f"no such file: {path}")
    rows: dict = {}
    rejected: list[SchemaError] = []
    for row, cells in _read_rows(path, header):
        try:
            if isinstance(cells, SchemaError):
                raise cells
            rec = parse(row, cells, path.name)
        except SchemaError as err:
            if not lenient:
                raise
            rejected.append(err)
            continue
        k = key(rec)
        if k in rows:
            if not lenient:
                raise DuplicateKey(k, row, path.name)
            rejected.append(SchemaError(row, "period", f"duplicate key {k}", path.name))
            continue
        rows[k] = rec
    return list(rows.values()), rejected


def load_bank_records(banks_file, lenient: bool = False):
    """Parse ``banks.csv`` alone; returns ``(records, rejected)``."""
    return _load_table(Path(banks_file), BANKS_HEADER, _parse_bank_row,
                       lambda r: f"({r.bank_id}, {r.period})", lenient)


def load_macro_records(macro_file, lenient: bool = False):
    """Parse ``macro.csv`` alone; returns ``(records, rejected)``."""
    return _load_table(Path(macro_file), MACRO_HEADER, _parse_macro_row,
                       lambda m: str(m.period), lenient)


def load_dataset(banks_file, macro_file, lenient: bool = False) -> Dataset:
    """Load and validate a bank panel plus its macro series.

    Raises :class:`FileNotFoundError`, :class:`SchemaError` or
    :class:`DuplicateKey`. With ``lenient`` set, offending rows are skipped
    and collected in ``Dataset.rejected`` instead (header errors still raise).
    Bank-periods without macro coverage for the period and its predecessor
    are moved to ``Dataset.exclusions``.
    """
    for p in (banks_file, macro_file):
        if not Path(p).is_file():
            raise FileNotFoundError(f"no such file: {p}")
    macro, rejected_m = load_macro_records(macro_file, lenient)
    banks, rejected_b = load_bank_records(banks_file, lenient)
    return build_dataset(banks, macro, rejected=rejected_m + rejected_b)


def build_dataset(banks: Iterable[BankPeriodRecord], macro: Iterable[MacroPeriodRecord],
                  rejected: Iterable[SchemaError] = ()) -> Dataset:
    """Assemble a Dataset, moving bank-periods without macro coverage to exclusions."""
    macro_sorted = tuple(sorted(macro, key=lambda m: m.period))
    periods = {m.period for m in macro_sorted}
    kept, excluded = [], []
    for rec in sorted(banks, key=lambda r: (r.bank_id, r.period)):
        if rec.period not in periods:
            excluded.append(Exclusion(rec, MISSING_MACRO_PERIOD))
        elif rec.period.predecessor() not in periods:
            excluded.append(Exclusion(rec, MISSING_MACRO_PREDECESSOR))
        else:
            kept.append(rec)
    return Dataset(tuple(kept), macro_sorted, tuple(excluded), tuple(rejected))


def _fmt(x: float) -> str:
    return repr(float(x))


def bank_row(r: BankPeriodRecord) -> list[str]:
    return [
        r.bank_id, str(r.period),
        _fmt(r.other_assets), _fmt(r.total_assets), _fmt(r.financial_outflows),
        _fmt(r.average_total_inflows), _fmt(r.operative_margin), _fmt(r.average_assets),
        _fmt(r.average_equity), _fmt(r.financial_inflows), _fmt(r.average_capitalization),
        r.status, str(r.intervention_period) if r.intervention_period else "",
    ]


def macro_row(m: MacroPeriodRecord) -> list[str]:
    return [str(m.period)] + [_fmt(getattr(m, c)) for c in MACRO_HEADER[1:]]


def banks_csv_text(records: Iterable[BankPeriodRecord]) -> str:
    lines = [",".join(BANKS_HEADER)]
    for r in sorted(records, key=lambda r: (r.bank_id, r.period)):
        lines.append(",".join(bank_row(r)))
    return "\n".join(lines) + "\n"


def macro_csv_text(records: Iterable[MacroPeriodRecord]) -> str:
    lines = [",".join(MACRO_HEADER)]
    for m in sorted(records, key=lambda m: m.period):
        lines.append(",".join(macro_row(m)))
    return "\n".join(lines) + "\n"


def write_dataset(d: Dataset, banks_file, macro_file) -> None:
    """Write every parsed bank-period (retained and excluded) and the macro series."""
    Path(banks_file).write_text(banks_csv_text(d.all_records()), encoding="utf-8")
    Path(macro_file).write_text(macro_csv_text(d.macro), encoding="utf-8")


def filter_complete_banks(d: Dataset, window: PeriodRange, max_missing: int = 0):
    """Keep banks missing at most ``max_missing`` usable periods inside ``window``.

    Excluded bank-periods count as missing. Returns ``(kept, dropped)`` where
    ``kept`` is a set of bank ids and ``dropped`` a sorted list of
    ``(bank_id, reason)``.
    """
    if window is None or len(window) == 0:
        raise EmptyWindow("window must contain at least one period")
    if max_missing < 0:
        raise ValueError("max_missing must be >= 0")
    wanted = set(window)
    kept: set[str] = set()
    dropped: list[tuple[str, str]] = []
    present: dict[str, set[Period]] = {b: set() for b in d.bank_ids}
    for r in d.banks:
        if r.period in wanted:
            present[r.bank_id].add(r.period)
    for bank_id in d.bank_ids:
        missing = len(wanted - present[bank_id])
        if missing <= max_missing:
            kept.add(bank_id)
        else:
            noun = "period" if missing == 1 else "periods"
            dropped.append((bank_id, f"{missing} missing {noun}"))
    return kept, dropped
