"""Synthetic OHLCV series: a geometric random walk with piecewise drift regimes."""

from __future__ import annotations

import datetime as dt
from dataclasses import dataclass

import numpy as np

from ..errors import InvalidSpec
from ..market_data import OhlcvBar, OhlcvSeries
from ..rng import SplitMix64

START_DATE = dt.date(2000, 1, 3)


@dataclass(frozen=True)
class RegimeSpec:
    """Regime parameters.

    Regime lengths are uniform on ``[regime_min, regime_max]`` trading days.
    The first regime's drift sign is random; each later regime takes the sign
    that pulls the cumulative drift back toward zero, which keeps prices in a
    bounded band. Drift magnitude is ``drift`` in log-price per day; daily
    log-returns add Gaussian noise of standard deviation ``volatility``.
    """

    drift: float = 0.002
    volatility: float = 0.015
    regime_min: int = 150
    regime_max: int = 400
    start_price: float = 100.0
    base_volume: int = 1_000_000

    def check(self):
        if not self.drift >= 0 or not self.volatility > 0:
            raise InvalidSpec("drift must be >= 0 and volatility > 0")
        if not 1 <= self.regime_min <= self.regime_max:
            raise InvalidSpec("need 1 <= regime_min <= regime_max")
        if not self.start_price > 0 or self.base_volume < 1:
            raise InvalidSpec("start_price and base_volume must be positive")


PRESETS = {
    "moderate": RegimeSpec(drift=0.002, volatility=0.015, regime_min=150, regime_max=400),
    "strong": RegimeSpec(drift=0.004, volatility=0.01, regime_min=600, regime_max=1200),
    "noise": RegimeSpec(drift=0.0, volatility=0.015, regime_min=100, regime_max=100),
}


def trading_days(start: dt.date, n: int) -> list:
    days = []
    d = start
    while len(days) < n:
        if d.weekday() < 5:
            days.append(d)
        d += dt.timedelta(days=1)
    return days


def _simulate(n_days: int, spec: RegimeSpec, seed: int):
    if n_days < 50:
        raise InvalidSpec(f"n_days must be >= 50, got {n_days}")
    spec.check()
    rng = SplitMix64.from_keys(seed, 0x5E7)

    drifts = np.empty(n_days)
    sign = 1.0 if rng.randbelow(2) else -1.0
    offset = 0  # signed count of drift days so far
    pos = 0
    while pos < n_days:
        length = spec.regime_min + rng.randbelow(spec.regime_max - spec.regime_min + 1)
        drifts[pos:pos + length] = sign * spec.drift
        pos += length
        offset += int(sign) * length
        sign = -1.0 if offset > 0 else 1.0

    noise = rng.normal(5 * n_days).reshape(5, n_days)
    log_ret = drifts + spec.volatility * noise[0]
    log_ret[0] = 0.0
    close = spec.start_price * np.exp(np.cumsum(log_ret))
    prev_close = np.r_[spec.start_price, close[:-1]]
    open_ = prev_close * np.exp(0.25 * spec.volatility * noise[1])
    # a small floor keeps every bar's range strictly positive
    high = np.maximum(open_, close) * np.exp(0.001 + 0.5 * spec.volatility * np.abs(noise[2]))
    low = np.minimum(open_, close) * np.exp(-0.001 - 0.5 * spec.volatility * np.abs(noise[3]))
    volume = np.maximum(1, np.rint(spec.base_volume * np.exp(0.3 * noise[4]
                                   + 20.0 * np.abs(log_ret)))).astype(np.int64)

    o, h, lo, c = (np.round(a, 6) for a in (open_, high, low, close))
    h = np.maximum.reduce([h, o, c])
    lo = np.minimum.reduce([lo, o, c])
    dates = trading_days(START_DATE, n_days)
    bars = tuple(OhlcvBar(dates[i], float(o[i]), float(h[i]), float(lo[i]), float(c[i]), int(volume[i]))
                 for i in range(n_days))
    return bars, drifts


def generate_synthetic(n_days: int, spec: RegimeSpec = PRESETS["moderate"], seed: int = 42,
                       symbol: str = "SYN") -> OhlcvSeries:
    bars, _ = _simulate(n_days, spec, seed)
    return OhlcvSeries(bars, symbol)


def regime_drifts(n_days: int, spec: RegimeSpec = PRESETS["moderate"], seed: int = 42) -> np.ndarray:
    """Per-day drift used by :func:`generate_synthetic` for the same arguments."""
    return _simulate(n_days, spec, seed)[1]
