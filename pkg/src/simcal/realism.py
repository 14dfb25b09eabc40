"""Stylized-fact metrics of mid-price return series.

The report is computed from a 1-second log-return series.  Returns at a
coarser time scale dt are the overlapping (1-second stride) sums of dt
consecutive 1-second returns, which telescopes to the log price change over
[t, t + dt].

The per-run autocorrelation entries use the sample autocorrelation function
(full-series mean and denominator, :func:`simcal.features.sample_acf`); at
lags comparable to the series length this estimator shrinks toward zero,
unlike the pairwise Pearson estimator :func:`autocorr` provided for generic
series.  Degenerate-variance series report 0 for all correlations and
moments, matching the feature-extraction convention.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from .errors import InvalidInputError
from .features import excess_kurtosis, sample_acf

MINUTE_AUTOCORR_LAGS_MIN = (20, 25)
SQUARED_RETURN_BASE_SECONDS = 10
SQUARED_RETURN_LAGS = tuple(range(1, 11))
KURTOSIS_SCALES_SECONDS = (1, 10, 60)


def log_returns(mid_prices: np.ndarray, dt_steps: int) -> np.ndarray:
    """log m_{t+dt} - log m_t for every start index t."""
    prices = np.asarray(mid_prices, dtype=float)
    if dt_steps < 1:
        raise InvalidInputError("dt_steps must be >= 1")
    if prices.ndim != 1 or prices.size <= dt_steps:
        raise InvalidInputError("need more prices than dt_steps")
    if np.any(prices <= 0):
        raise InvalidInputError("prices must be positive")
    logp = np.log(prices)
    return logp[dt_steps:] - logp[:-dt_steps]


def aggregate_returns(returns_1s: np.ndarray, window: int) -> np.ndarray:
    """Overlapping sums of ``window`` consecutive 1-second returns."""
    r = np.asarray(returns_1s, dtype=float)
    if window < 1 or r.size < window:
        raise InvalidInputError("window must be in [1, len(returns)]")
    if window == 1:
        return r.copy()
    return sliding_window_view(r, window).sum(axis=1)


def autocorr(series: np.ndarray, lag: int) -> float:
    """Pearson correlation of (x_t, x_{t+lag}); 0 for degenerate pairs."""
    x = np.asarray(series, dtype=float)
    if lag < 0 or lag >= x.size - 1:
        raise InvalidInputError(f"lag must be in [0, {x.size - 2}]")
    a = x[: x.size - lag]
    b = x[lag:]
    sa, sb = a.std(), b.std()
    if sa == 0.0 or sb == 0.0:
        return 0.0
    return float(np.mean((a - a.mean()) * (b - b.mean())) / (sa * sb))


@dataclass(frozen=True)
class StylizedFactReport:
    minutely_return_kurtosis: float | None
    return_autocorr_at_lag: dict[int, float | None]     # lag in minutes
    squared_return_autocorr: tuple[float, ...] | None   # lags 1..10, 10 s base
    kurtosis_by_scale: dict[int, float | None]          # dt in seconds
    n_returns: int

    def to_dict(self) -> dict:
        return {
            "minutely_return_kurtosis": self.minutely_return_kurtosis,
            "return_autocorr_at_lag": {str(k): v for k, v
                                       in self.return_autocorr_at_lag.items()},
            "squared_return_autocorr": (list(self.squared_return_autocorr)
                                        if self.squared_return_autocorr is not None
                                        else None),
            "kurtosis_by_scale": {str(k): v for k, v
                                  in self.kurtosis_by_scale.items()},
            "n_returns": self.n_returns,
        }


def stylized_fact_report(returns_1s: np.ndarray) -> StylizedFactReport:
    """Heavy-tail, autocorrelation and volatility-clustering metrics.

    Metrics whose window or lag does not fit into the series are reported
    as None; everything else is still computed.
    """
    r = np.asarray(returns_1s, dtype=float)
    if r.ndim != 1 or r.size < 2:
        raise InvalidInputError("need a 1-D series of at least 2 returns")
    if not np.all(np.isfinite(r)):
        raise InvalidInputError("returns must be finite")

    kurtosis_by_scale: dict[int, float | None] = {}
    for dt in KURTOSIS_SCALES_SECONDS:
        if r.size >= dt:
            kurtosis_by_scale[dt] = float(excess_kurtosis(aggregate_returns(r, dt)))
        else:
            kurtosis_by_scale[dt] = None

    minutely = aggregate_returns(r, 60) if r.size >= 60 else None
    minute_acf: dict[int, float | None] = {}
    for lag_min in MINUTE_AUTOCORR_LAGS_MIN:
        lag = lag_min * 60
        if minutely is not None and minutely.size > lag:
            minute_acf[lag_min] = float(sample_acf(minutely, lag))
        else:
            minute_acf[lag_min] = None

    sq_acf = None
    base = SQUARED_RETURN_BASE_SECONDS
    if r.size >= base:
        r10 = aggregate_returns(r, base)
        sq = r10 * r10
        max_lag = SQUARED_RETURN_LAGS[-1] * base
        if sq.size > max_lag:
            sq_acf = tuple(float(sample_acf(sq, l * base))
                           for l in SQUARED_RETURN_LAGS)

    return StylizedFactReport(
        minutely_return_kurtosis=kurtosis_by_scale.get(60),
        return_autocorr_at_lag=minute_acf,
        squared_return_autocorr=sq_acf,
        kurtosis_by_scale=kurtosis_by_scale,
        n_returns=int(r.size),
    )
