"""OHLCV parsing, validation and exponential smoothing."""

from __future__ import annotations

import datetime as dt
from dataclasses import dataclass, field

import numpy as np

from .errors import EmptyFile, EmptySeries, InvalidAlpha, MalformedHeader, RowParseError

HEADER = "date,open,high,low,close,volume"
COLUMNS = HEADER.split(",")
DEFAULT_ALPHA = 0.9


@dataclass(frozen=True)
class OhlcvBar:
    date: dt.date
    open: float
    high: float
    low: float
    close: float
    volume: int


@dataclass(frozen=True)
class OhlcvSeries:
    bars: tuple
    symbol: str = ""

    def __post_init__(self):
        object.__setattr__(self, "bars", tuple(self.bars))

    def __len__(self):
        return len(self.bars)

    @property
    def dates(self) -> list:
        return [b.date for b in self.bars]

    def column(self, name: str) -> np.ndarray:
        if name == "volume":
            return np.array([b.volume for b in self.bars], dtype=np.int64)
        return np.array([getattr(b, name) for b in self.bars], dtype=np.float64)

    @property
    def open(self):
        return self.column("open")

    @property
    def high(self):
        return self.column("high")

    @property
    def low(self):
        return self.column("low")

    @property
    def close(self):
        return self.column("close")

    @property
    def volume(self):
        return self.column("volume")


@dataclass(frozen=True)
class Violation:
    index: int
    check: str
    message: str

    @property
    def row_number(self) -> int:
        """1-based line number in the CSV file (header is line 1)."""
        return self.index + 2


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple = field(default_factory=tuple)

    @property
    def ok(self) -> bool:
        return not self.violations

    @property
    def first_violation(self):
        return self.violations[0] if self.violations else None


@dataclass(frozen=True)
class SmoothedSeries:
    alpha: float
    values: np.ndarray


def _parse_float(text: str, line: int, column: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise RowParseError(line, column, f"not a number: {text!r}") from None
    if not np.isfinite(value):
        raise RowParseError(line, column, f"not finite: {text!r}")
    return value


def _parse_volume(text: str, line: int) -> int:
    try:
        return int(text)
    except ValueError:
        pass
    value = _parse_float(text, line, "volume")
    if value != int(value):
        raise RowParseError(line, "volume", f"not an integer count: {text!r}")
    return int(value)


def parse_ohlcv_csv(text: str, symbol: str = "") -> OhlcvSeries:
    """Parse a ``date,open,high,low,close,volume`` document into a series.

    Row order is preserved; ordering problems are left to :func:`validate_series`.
    """
    if text.startswith("﻿"):
        text = text[1:]
    lines = [ln[:-1] if ln.endswith("\r") else ln for ln in text.split("\n")]
    while lines and lines[-1] == "":
        lines.pop()
    if not lines:
        raise EmptyFile("empty document")
    if lines[0] != HEADER:
        raise MalformedHeader(f"expected header {HEADER!r}, got {lines[0]!r}")
    if len(lines) == 1:
        raise EmptyFile("header present but no data rows")

    bars = []
    for lineno, raw in enumerate(lines[1:], start=2):
        cells = raw.split(",")
        if len(cells) != len(COLUMNS):
            col = COLUMNS[min(len(cells), len(COLUMNS) - 1)]
            raise RowParseError(lineno, col, f"expected 6 fields, got {len(cells)}")
        try:
            date = dt.date.fromisoformat(cells[0])
        except ValueError:
            raise RowParseError(lineno, "date", f"not an ISO date: {cells[0]!r}") from None
        o, h, lo, c = (_parse_float(cells[i], lineno, COLUMNS[i]) for i in range(1, 5))
        bars.append(OhlcvBar(date, o, h, lo, c, _parse_volume(cells[5], lineno)))
    return OhlcvSeries(tuple(bars), symbol)


def format_price(value: float) -> str:
    text = repr(float(value))
    return text[:-2] if text.endswith(".0") else text


def to_csv(series: OhlcvSeries) -> str:
    """Canonical CSV text: LF endings, shortest round-trip decimals."""
    out = [HEADER]
    for b in series.bars:
        out.append(",".join([
            b.date.isoformat(), format_price(b.open), format_price(b.high),
            format_price(b.low), format_price(b.close), str(b.volume),
        ]))
    return "\n".join(out) + "\n"


def validate_series(series: OhlcvSeries) -> ValidationReport:
    violations = []
    prev = None
    for i, b in enumerate(series.bars):
        if min(b.open, b.high, b.low, b.close) <= 0:
            violations.append(Violation(i, "price_positive", "all prices must be > 0"))
        if b.volume < 0:
            violations.append(Violation(i, "volume_nonnegative", f"volume {b.volume} < 0"))
        if b.high < b.low:
            violations.append(Violation(i, "high_low", f"high {b.high} < low {b.low}"))
        if b.high < max(b.open, b.close):
            violations.append(Violation(i, "high_bound", f"high {b.high} < max(open, close)"))
        if b.low > min(b.open, b.close):
            violations.append(Violation(i, "low_bound", f"low {b.low} > min(open, close)"))
        if prev is not None:
            if b.date == prev:
                violations.append(Violation(i, "duplicate_date", f"{b.date} repeats previous bar"))
            elif b.date < prev:
                violations.append(Violation(i, "date_order", f"{b.date} precedes {prev}"))
        prev = b.date
    return ValidationReport(tuple(violations))


def exponential_smooth(close, alpha: float = DEFAULT_ALPHA) -> SmoothedSeries:
    """Exponentially smooth ``close`` with weight ``alpha`` on the newest value.

    ``S[0] = Y[0]`` and ``S[t] = alpha * Y[t] + (1 - alpha) * S[t-1]``.
    Each step is clamped to the segment between ``S[t-1]`` and ``Y[t]`` so
    rounding can never push a value outside the running min/max.
    """
    if not (0.0 < alpha <= 1.0):
        raise InvalidAlpha(f"alpha must be in (0, 1], got {alpha}")
    y = np.asarray(close, dtype=np.float64)
    if y.size == 0:
        raise EmptySeries("cannot smooth an empty series")
    if alpha == 1.0:
        return SmoothedSeries(alpha, y.copy())

    out = np.empty_like(y)
    s = float(y[0])
    out[0] = s
    for t in range(1, y.size):
        yt = float(y[t])
        nxt = s + alpha * (yt - s)
        lo, hi = (s, yt) if s <= yt else (yt, s)
        s = min(max(nxt, lo), hi)
        out[t] = s
    return SmoothedSeries(alpha, out)
