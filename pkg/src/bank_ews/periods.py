"""Half-year periods keyed ``YYYY-H1`` / ``YYYY-H2``."""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import total_ordering
from typing import Iterator

from .errors import EmptyWindow

_PERIOD_RE = re.compile(r"^(\d{4})-H([12])$")


@total_ordering
@dataclass(frozen=True)
class Period:
    year: int
    half: int  # 1 or 2

    def __post_init__(self):
        if self.half not in (1, 2):
            raise ValueError(f"half must be 1 or 2, got {self.half!r}")

    @classmethod
    def parse(cls, text: str) -> "Period":
        m = _PERIOD_RE.match(text.strip())
        if not m:
            raise ValueError(f"invalid period {text!r}, expected YYYY-H1 or YYYY-H2")
        return cls(int(m.group(1)), int(m.group(2)))

    @property
    def ordinal(self) -> int:
        """Number of half-years since year 0 H1."""
        return 2 * self.year + (self.half - 1)

    @classmethod
    def from_ordinal(cls, n: int) -> "Period":
        return cls(n // 2, n % 2 + 1)

    def shift(self, steps: int) -> "Period":
        return Period.from_ordinal(self.ordinal + steps)

    def successor(self) -> "Period":
        return self.shift(1)

    def predecessor(self) -> "Period":
        return self.shift(-1)

    def __sub__(self, other: "Period") -> int:
        """Distance in half-year steps."""
        if not isinstance(other, Period):
            return NotImplemented
        return self.ordinal - other.ordinal

    def __lt__(self, other: "Period") -> bool:
        if not isinstance(other, Period):
            return NotImplemented
        return self.ordinal < other.ordinal

    def __str__(self) -> str:
        return f"{self.year:04d}-H{self.half}"


@dataclass(frozen=True)
class PeriodRange:
    """Inclusive range of half-year periods."""

    start: Period
    end: Period

    def __post_init__(self):
        if self.end < self.start:
            raise EmptyWindow(f"empty period range {self.start}..{self.end}")

    @classmethod
    def parse(cls, text: str) -> "PeriodRange":
        parts = text.split("..")
        if len(parts) != 2:
            raise ValueError(f"invalid period range {text!r}, expected P..P")
        return cls(Period.parse(parts[0]), Period.parse(parts[1]))

    def __iter__(self) -> Iterator[Period]:
        for n in range(self.start.ordinal, self.end.ordinal + 1):
            yield Period.from_ordinal(n)

    def __len__(self) -> int:
        return self.end - self.start + 1

    def __contains__(self, p: object) -> bool:
        return isinstance(p, Period) and self.start <= p <= self.end

    def __str__(self) -> str:
        return f"{self.start}..{self.end}"
