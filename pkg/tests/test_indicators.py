import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from stocktrend.errors import EmptyDataset, InvalidPeriods, LengthMismatch, SeriesTooShort
from stocktrend.evaluation.synthetic import PRESETS, generate_synthetic
from stocktrend.indicators import (FEATURE_NAMES, IndicatorParams, build_dataset, feature_rows, macd,
                                   make_labels, on_balance_volume, price_rate_of_change, rsi,
                                   stochastic_k, williams_r)
from stocktrend.market_data import OhlcvSeries, exponential_smooth


def wilder_rsi_oracle(close, period):
    out = [None] * len(close)
    gains = [max(close[i] - close[i - 1], 0.0) for i in range(1, len(close))]
    losses = [max(close[i - 1] - close[i], 0.0) for i in range(1, len(close))]
    g = sum(gains[:period]) / period
    lo = sum(losses[:period]) / period
    for t in range(period, len(close)):
        if t > period:
            g = (g * (period - 1) + gains[t - 1]) / period
            lo = (lo * (period - 1) + losses[t - 1]) / period
        out[t] = 100.0 if lo == 0 else 100.0 - 100.0 / (1.0 + g / lo)
    return out


def window_oracle(high, low, close, period):
    out = []
    for t in range(len(close)):
        if t < period - 1:
            out.append(None)
            continue
        hh = max(max(high[t - period + 1:t + 1]), max(close[t - period + 1:t + 1]))
        ll = min(min(low[t - period + 1:t + 1]), min(close[t - period + 1:t + 1]))
        out.append(50.0 if hh == ll else 100.0 * (close[t] - ll) / (hh - ll))
    return out


def ema_oracle(xs, period):
    k = 2.0 / (period + 1)
    e = xs[0]
    out = [e]
    for x in xs[1:]:
        e = k * x + (1 - k) * e
        out.append(e)
    return out


def hlc(rs, n):
    close = 100 + np.cumsum(rs.normal(size=n))
    high = close + rs.uniform(0.1, 2, n)
    low = close - rs.uniform(0.1, 2, n)
    return high, low, close


# RSI

def test_rsi_monotone_extremes():
    up = np.arange(1.0, 40.0)
    down = up[::-1]
    assert np.all(rsi(up, 14)[14:] == 100.0)
    assert np.all(rsi(down, 14)[14:] == 0.0)
    assert np.all(np.isnan(rsi(up, 14)[:14]))


def test_rsi_fifteen_bar_fixture():
    close = [44.34, 44.09, 44.15, 43.61, 44.33, 44.83, 45.10, 45.42, 45.84, 46.08, 45.89, 46.03,
             45.61, 46.28, 46.28]
    got = rsi(close, 14)
    want = wilder_rsi_oracle(close, 14)
    assert abs(got[14] - want[14]) < 1e-12
    assert 0 < got[14] < 100


def test_rsi_matches_oracle_on_long_series(rs):
    close = (100 + np.cumsum(rs.normal(size=300))).tolist()
    got = rsi(close, 14)
    want = wilder_rsi_oracle(close, 14)
    assert np.allclose(got[14:], want[14:], rtol=0, atol=1e-10)


def test_rsi_too_short():
    with pytest.raises(SeriesTooShort):
        rsi([1.0] * 14, 14)


# stochastic / williams

def test_stochastic_direct_values():
    high = [110.0] * 14
    low = [90.0] * 14
    close = [100.0] * 13 + [95.0]
    assert stochastic_k(high, low, close, 14)[-1] == pytest.approx(25.0, abs=1e-12)
    assert williams_r(high, low, close, 14)[-1] == pytest.approx(-75.0, abs=1e-12)
    close_at_top = [100.0] * 13 + [110.0]
    assert stochastic_k(high, low, close_at_top, 14)[-1] == 100.0
    assert williams_r(high, low, close_at_top, 14)[-1] == 0.0


def test_flat_window_neutral():
    flat = [5.0] * 20
    assert np.all(stochastic_k(flat, flat, flat, 14)[13:] == 50.0)
    assert np.all(williams_r(flat, flat, flat, 14)[13:] == -50.0)


def test_stochastic_matches_window_scan(rs):
    high, low, close = hlc(rs, 20)
    got = stochastic_k(high, low, close, 14)
    want = window_oracle(high.tolist(), low.tolist(), close.tolist(), 14)
    assert np.all(np.isnan(got[:13]))
    assert np.allclose(got[13:], want[13:], rtol=0, atol=1e-12)


def test_williams_identity_on_random_fixtures(rs):
    for _ in range(50):
        high, low, close = hlc(rs, 60)
        close = exponential_smooth(close, 0.7).values
        k = stochastic_k(high, low, close, 14)
        r = williams_r(high, low, close, 14)
        assert np.array_equal(r[13:], k[13:] - 100.0)
        assert np.all((k[13:] >= 0) & (k[13:] <= 100))
        assert np.all((r[13:] >= -100) & (r[13:] <= 0))


def test_stochastic_errors():
    with pytest.raises(LengthMismatch):
        stochastic_k([1.0, 2.0], [1.0], [1.0, 2.0], 2)
    with pytest.raises(SeriesTooShort):
        williams_r([1.0] * 3, [1.0] * 3, [1.0] * 3, 14)


# MACD

def test_macd_constant_is_zero():
    for part in macd([7.5] * 50):
        assert np.all(part == 0.0)


def test_macd_length_one():
    assert [p.tolist() for p in macd([3.0])] == [[0.0], [0.0], [0.0]]


def test_macd_five_bar_fixture():
    close = [10.0, 10.5, 10.2, 11.0, 11.4]
    line, sig, hist = macd(close, 12, 26, 9)
    want_line = np.subtract(ema_oracle(close, 12), ema_oracle(close, 26))
    want_sig = ema_oracle(want_line.tolist(), 9)
    assert np.allclose(line, want_line, rtol=0, atol=1e-12)
    assert np.allclose(sig, want_sig, rtol=0, atol=1e-12)
    assert np.allclose(hist, want_line - want_sig, rtol=0, atol=1e-12)


def test_macd_invalid_periods():
    with pytest.raises(InvalidPeriods):
        macd([1.0, 2.0], fast=26, slow=12)


# ROC / OBV

def test_roc_values(rs):
    assert np.all(price_rate_of_change([4.0] * 20, 12)[12:] == 0.0)
    doubled = [10.0] * 12 + [20.0]
    assert price_rate_of_change(doubled, 12)[12] == 100.0
    close = (50 + np.cumsum(rs.normal(size=40))).tolist()
    got = price_rate_of_change(close, 12)
    want = [100 * (close[t] - close[t - 12]) / close[t - 12] for t in range(12, 40)]
    assert np.allclose(got[12:], want, rtol=0, atol=1e-12)
    with pytest.raises(SeriesTooShort):
        price_rate_of_change([1.0] * 12, 12)


def test_obv_values():
    vol = [100, 200, 300, 400, 500]
    assert np.all(on_balance_volume([3.0] * 5, vol) == 0)
    assert on_balance_volume([1.0, 2.0, 3.0, 4.0, 5.0], vol).tolist() == [0, 200, 500, 900, 1400]
    close = [10.0, 11.0, 11.0, 9.0, 12.0]
    obv, want = 0, [0]
    for t in range(1, 5):
        obv += vol[t] * ((close[t] > close[t - 1]) - (close[t] < close[t - 1]))
        want.append(obv)
    assert on_balance_volume(close, vol).tolist() == want
    with pytest.raises(LengthMismatch):
        on_balance_volume([1.0, 2.0], [1])


# labels

def test_labels_rise_and_ties():
    assert make_labels([1.0, 2.0], 1).tolist() == [1]
    assert make_labels([2.0, 2.0], 1).tolist() == [0]
    assert make_labels([3.0, 1.0], 1).tolist() == [0]
    assert np.all(make_labels(np.arange(30.0), 7) == 1)
    with pytest.raises(SeriesTooShort):
        make_labels([1.0, 2.0, 3.0], 3)


def test_labels_brute_force(rs):
    close = rs.normal(size=20).tolist()
    want = [1 if close[i + 3] > close[i] else 0 for i in range(17)]
    assert make_labels(close, 3).tolist() == want


# dataset

def _series(n, seed=1):
    return generate_synthetic(max(n, 50), PRESETS["moderate"], seed=seed) if n >= 50 else None


def _truncate(series, n):
    return OhlcvSeries(series.bars[:n], series.symbol)


def test_warmup_default_is_33():
    assert IndicatorParams().warmup == 33


def test_dataset_row_count_100():
    ds = build_dataset(_series(100), horizon_d=5)
    assert len(ds) == 62
    assert ds.features.shape == (62, 6)
    assert ds.feature_names == FEATURE_NAMES


@pytest.mark.parametrize("n", [38, 20])
def test_too_short_dataset(n):
    base = _series(100)
    with pytest.raises(EmptyDataset):
        build_dataset(_truncate(base, n), horizon_d=5)


@given(st.integers(39, 300), st.integers(1, 60))
@settings(max_examples=40, deadline=None)
def test_row_count_formula(n, d):
    base = _series(400, seed=3)
    s = _truncate(base, n)
    if n <= 33 + d:
        with pytest.raises(EmptyDataset):
            build_dataset(s, horizon_d=d)
    else:
        assert len(build_dataset(s, horizon_d=d)) == n - 33 - d


def test_label_alignment_and_finiteness():
    s = _series(400, seed=5)
    d = 10
    ds = build_dataset(s, alpha=0.8, horizon_d=d)
    smooth = exponential_smooth(s.close, 0.8).values
    for i, idx in enumerate(ds.index):
        assert ds.labels[i] == int(smooth[idx + d] > smooth[idx])
        assert ds.dates[i] == s.dates[idx]
    assert np.all(np.isfinite(ds.features))
    raw = build_dataset(s, alpha=0.8, horizon_d=d, label_on_raw=True)
    assert np.array_equal(raw.labels, (s.close[raw.index + d] > s.close[raw.index]).astype(int))


def test_no_lookahead_prefix_stability():
    s = _series(500, seed=9)
    _, full = feature_rows(s)
    for n in (60, 150, 333):
        _, part = feature_rows(_truncate(s, n))
        assert np.array_equal(full[:part.shape[0]], part)


def test_feature_ranges():
    ds = build_dataset(_series(800, seed=2), horizon_d=30)
    f = ds.features
    assert np.all((f[:, 0] >= 0) & (f[:, 0] <= 100))
    assert np.all((f[:, 1] >= 0) & (f[:, 1] <= 100))
    assert np.all((f[:, 2] >= -100) & (f[:, 2] <= 0))
    assert np.array_equal(f[:, 2], f[:, 1] - 100)


def test_dead_zone_drops_sideways_rows():
    s = _series(400, seed=4)
    plain = build_dataset(s, horizon_d=10)
    dz = build_dataset(s, horizon_d=10, dead_zone=0.01)
    assert 0 < len(dz) < len(plain)
    c = exponential_smooth(s.close, 0.9).values
    moves = np.abs(c[dz.index + 10] - c[dz.index])
    assert np.all(moves > 0.01 * c[dz.index])


def test_dataset_csv_header():
    ds = build_dataset(_series(100), horizon_d=5)
    text = ds.to_csv()
    assert text.splitlines()[0] == "date,rsi,stoch_k,williams_r,macd_hist,price_roc,obv,label"
    assert len(text.splitlines()) == 63
