"""Technical indicators, trend labels and dataset assembly.

All indicator functions take plain sequences or arrays and return float arrays
of the same length, with ``nan`` before the indicator's warm-up index.
Every value at index ``t`` depends on inputs ``0..t`` only.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import EmptyDataset, EmptySeries, InvalidPeriods, LengthMismatch, SeriesTooShort
from .market_data import DEFAULT_ALPHA, OhlcvSeries, exponential_smooth, format_price

FEATURE_NAMES = ("rsi", "stoch_k", "williams_r", "macd_hist", "price_roc", "obv")


class IndicatorVector(NamedTuple):
    rsi: float
    stochastic_k: float
    williams_r: float
    macd_hist: float
    price_roc: float
    obv: float


@dataclass(frozen=True)
class IndicatorParams:
    rsi: int = 14
    stoch: int = 14
    willr: int = 14
    roc: int = 12
    macd_fast: int = 12
    macd_slow: int = 26
    macd_signal: int = 9

    def __post_init__(self):
        for name in ("rsi", "stoch", "willr", "roc", "macd_fast", "macd_slow", "macd_signal"):
            if getattr(self, name) < 1:
                raise InvalidPeriods(f"{name} period must be positive")
        if self.macd_fast >= self.macd_slow:
            raise InvalidPeriods("MACD fast period must be below the slow period")

    @property
    def warmup(self) -> int:
        """First row index at which every indicator is defined and settled."""
        return max(self.rsi, self.stoch, self.willr, self.roc,
                   self.macd_slow + self.macd_signal - 2)


def _as_array(values, name="series"):
    arr = np.asarray(values, dtype=np.float64)
    if arr.ndim != 1:
        raise ValueError(f"{name} must be one-dimensional")
    return arr


def _check_aligned(*arrays):
    if len({a.size for a in arrays}) != 1:
        raise LengthMismatch("input series have different lengths")


def rsi(close, period: int = 14) -> np.ndarray:
    """Relative Strength Index with Wilder smoothing, defined from ``t = period``."""
    c = _as_array(close)
    if c.size <= period:
        raise SeriesTooShort(f"RSI({period}) needs more than {period} values, got {c.size}")
    diff = np.diff(c)
    gains = np.where(diff > 0, diff, 0.0)
    losses = np.where(diff < 0, -diff, 0.0)

    out = np.full(c.size, np.nan)
    avg_gain = gains[:period].mean()
    avg_loss = losses[:period].mean()
    for t in range(period, c.size):
        if t > period:
            avg_gain = (avg_gain * (period - 1) + gains[t - 1]) / period
            avg_loss = (avg_loss * (period - 1) + losses[t - 1]) / period
        if avg_loss == 0.0:
            out[t] = 50.0 if avg_gain == 0.0 else 100.0
        else:
            out[t] = 100.0 - 100.0 / (1.0 + avg_gain / avg_loss)
    return out


def _rolling_range(high, low, close, period):
    # the close joins the range so a smoothed close cannot escape it
    hi = np.maximum(high, close)
    lo = np.minimum(low, close)
    hh = np.full(close.size, np.nan)
    ll = np.full(close.size, np.nan)
    if close.size >= period:
        win_hi = np.lib.stride_tricks.sliding_window_view(hi, period)
        win_lo = np.lib.stride_tricks.sliding_window_view(lo, period)
        hh[period - 1:] = win_hi.max(axis=1)
        ll[period - 1:] = win_lo.min(axis=1)
    return hh, ll


def stochastic_k(high, low, close, period: int = 14) -> np.ndarray:
    """Stochastic %K without %D smoothing; a flat window gives 50."""
    h, lo, c = _as_array(high), _as_array(low), _as_array(close)
    _check_aligned(h, lo, c)
    if c.size < period:
        raise SeriesTooShort(f"%K({period}) needs at least {period} values, got {c.size}")
    hh, ll = _rolling_range(h, lo, c, period)
    out = np.full(c.size, np.nan)
    defined = slice(period - 1, None)
    span = hh[defined] - ll[defined]
    flat = span == 0.0
    safe = np.where(flat, 1.0, span)
    k = 100.0 * (c[defined] - ll[defined]) / safe
    out[defined] = np.where(flat, 50.0, np.clip(k, 0.0, 100.0))
    return out


def williams_r(high, low, close, period: int = 14) -> np.ndarray:
    """Williams %R, computed as ``%K - 100`` so the identity holds exactly."""
    return stochastic_k(high, low, close, period) - 100.0


def ema(values, period: int) -> np.ndarray:
    """EMA with weight ``2 / (period + 1)``, seeded with the first value."""
    return exponential_smooth(values, 2.0 / (period + 1)).values


def macd(close, fast: int = 12, slow: int = 26, signal: int = 9):
    """Return ``(macd_line, signal_line, histogram)``."""
    if min(fast, slow, signal) < 1 or fast >= slow:
        raise InvalidPeriods(f"invalid MACD periods ({fast}, {slow}, {signal})")
    c = _as_array(close)
    if c.size == 0:
        raise EmptySeries("MACD of an empty series")
    line = ema(c, fast) - ema(c, slow)
    sig = ema(line, signal)
    return line, sig, line - sig


def price_rate_of_change(close, period: int = 12) -> np.ndarray:
    c = _as_array(close)
    if c.size <= period:
        raise SeriesTooShort(f"ROC({period}) needs more than {period} values, got {c.size}")
    out = np.full(c.size, np.nan)
    out[period:] = 100.0 * (c[period:] - c[:-period]) / c[:-period]
    return out


def on_balance_volume(close, volume) -> np.ndarray:
    c = _as_array(close)
    v = _as_array(volume, "volume")
    _check_aligned(c, v)
    if c.size == 0:
        raise EmptySeries("OBV of an empty series")
    steps = np.zeros(c.size)
    steps[1:] = v[1:] * np.sign(np.diff(c))
    return np.cumsum(steps)


def make_labels(close, horizon_d: int) -> np.ndarray:
    """``label[i] = 1`` iff ``close[i + d] > close[i]``; ties are 0."""
    c = _as_array(close)
    if horizon_d < 1:
        raise InvalidPeriods("horizon must be a positive number of rows")
    if c.size <= horizon_d:
        raise SeriesTooShort(f"need more than {horizon_d} values for horizon {horizon_d}")
    return (c[horizon_d:] > c[:-horizon_d]).astype(np.int64)


def dead_zone_mask(close, horizon_d: int, eps: float) -> np.ndarray:
    """True where ``|close[i+d] - close[i]| <= eps * close[i]`` (a "sideways" move)."""
    c = _as_array(close)
    return np.abs(c[horizon_d:] - c[:-horizon_d]) <= eps * c[:-horizon_d]


@dataclass(frozen=True)
class Dataset:
    dates: tuple
    features: np.ndarray
    labels: np.ndarray
    horizon_d: int
    index: np.ndarray
    feature_names: tuple = FEATURE_NAMES
    symbol: str = ""

    def __len__(self):
        return int(self.labels.size)

    def row(self, i: int) -> IndicatorVector:
        return IndicatorVector(*map(float, self.features[i]))

    def take(self, rows) -> "Dataset":
        rows = np.asarray(rows, dtype=np.int64)
        return Dataset(
            tuple(self.dates[i] for i in rows), self.features[rows], self.labels[rows],
            self.horizon_d, self.index[rows], self.feature_names, self.symbol,
        )

    def to_csv(self) -> str:
        lines = ["date," + ",".join(self.feature_names) + ",label"]
        for date, feats, label in zip(self.dates, self.features, self.labels):
            lines.append(",".join([date.isoformat(), *map(format_price, feats), str(int(label))]))
        return "\n".join(lines) + "\n"


def feature_matrix(series: OhlcvSeries, smoothed_close, params: IndicatorParams) -> np.ndarray:
    """All six indicator columns over the full series (``nan`` during warm-up)."""
    high, low, volume = series.high, series.low, series.volume
    return np.column_stack([
        rsi(smoothed_close, params.rsi),
        stochastic_k(high, low, smoothed_close, params.stoch),
        williams_r(high, low, smoothed_close, params.willr),
        macd(smoothed_close, params.macd_fast, params.macd_slow, params.macd_signal)[2],
        price_rate_of_change(smoothed_close, params.roc),
        on_balance_volume(smoothed_close, volume),
    ])


def feature_rows(series: OhlcvSeries, alpha: float = DEFAULT_ALPHA,
                 params: IndicatorParams | None = None):
    """``(dates, features)`` for every bar past warm-up, including unlabelled recent bars."""
    params = params or IndicatorParams()
    if len(series) <= params.warmup:
        raise EmptyDataset(f"{len(series)} bars do not cover warm-up {params.warmup}")
    smoothed = exponential_smooth(series.close, alpha).values
    feats = feature_matrix(series, smoothed, params)
    return tuple(series.dates[params.warmup:]), feats[params.warmup:]


def build_dataset(series: OhlcvSeries, alpha: float = DEFAULT_ALPHA, horizon_d: int = 30,
                  params: IndicatorParams | None = None, label_on_raw: bool = False,
                  dead_zone: float | None = None) -> Dataset:
    """Smooth, featurize and label ``series``.

    Row ``i`` (bar index ``warmup + i``) carries indicators computed from bars
    up to that index and the label comparing the close ``horizon_d`` bars later.
    With ``dead_zone`` set, rows whose move is within ``dead_zone * close`` are
    dropped instead of being labelled.
    """
    params = params or IndicatorParams()
    if horizon_d < 1:
        raise InvalidPeriods("horizon must be a positive number of rows")
    n = len(series)
    warmup = params.warmup
    if n <= warmup + horizon_d:
        raise EmptyDataset(
            f"{n} bars leave no rows after warm-up {warmup} and horizon {horizon_d}")

    smoothed = exponential_smooth(series.close, alpha).values
    feats = feature_matrix(series, smoothed, params)
    label_close = series.close if label_on_raw else smoothed
    labels = make_labels(label_close, horizon_d)

    keep = np.arange(warmup, n - horizon_d)
    if dead_zone is not None:
        sideways = dead_zone_mask(label_close, horizon_d, dead_zone)
        keep = keep[~sideways[keep]]
        if keep.size == 0:
            raise EmptyDataset("dead zone removed every row")

    dates = series.dates
    return Dataset(
        dates=tuple(dates[i] for i in keep),
        features=feats[keep],
        labels=labels[keep],
        horizon_d=horizon_d,
        index=keep,
        symbol=series.symbol,
    )
