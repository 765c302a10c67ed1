"""Return, volatility, covariance/correlation, and portfolio-level statistics.

Conventions, fixed once so golden values stay stable:

* sample statistics everywhere (variance divisor T-1);
* annualization by ``trading_days`` (default 252): means scale by the
  factor itself, volatilities by its square root;
* correlation entries involving a (near-)constant column are 0, never NaN,
  with variances floored at ``VARIANCE_FLOOR`` wherever they divide.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from datetime import date
from typing import TYPE_CHECKING

import numpy as np

from .errors import AlignmentError, InsufficientDataError, UndefinedSharpeError

if TYPE_CHECKING:
    from .backtest import WeightSchedule
    from .market_data import PriceTable
    from .mvp import Portfolio

TRADING_DAYS = 252
VARIANCE_FLOOR = 1e-12


@dataclass(frozen=True)
class ReturnTable:
    """Daily fractional returns; row ``t`` is dated at the later day of the pair."""

    dates: tuple[date, ...]
    tickers: tuple[str, ...]
    values: np.ndarray

    def __post_init__(self) -> None:
        values = np.array(self.values, dtype=float)
        if values.shape != (len(self.dates), len(self.tickers)):
            raise ValueError("returns shape does not match dates x tickers")
        if not np.all(np.isfinite(values)):
            raise ValueError("returns must be finite")
        values.setflags(write=False)
        object.__setattr__(self, "dates", tuple(self.dates))
        object.__setattr__(self, "tickers", tuple(self.tickers))
        object.__setattr__(self, "values", values)

    @property
    def n_rows(self) -> int:
        return len(self.dates)

    @property
    def n_assets(self) -> int:
        return len(self.tickers)


@dataclass(frozen=True)
class CovMatrix:
    """Sample covariance of daily returns (daily variance units)."""

    tickers: tuple[str, ...]
    values: np.ndarray

    def __post_init__(self) -> None:
        values = np.array(self.values, dtype=float)
        n = len(self.tickers)
        if values.shape != (n, n):
            raise ValueError("covariance matrix shape does not match tickers")
        if np.max(np.abs(values - values.T), initial=0.0) > 1e-12:
            raise ValueError("covariance matrix must be symmetric within 1e-12")
        if np.any(np.diag(values) < 0):
            raise ValueError("covariance diagonal must be non-negative")
        if np.linalg.eigvalsh(values).min() < -1e-9:
            raise ValueError("covariance matrix must be positive semidefinite")
        values.setflags(write=False)
        object.__setattr__(self, "tickers", tuple(self.tickers))
        object.__setattr__(self, "values", values)


@dataclass(frozen=True)
class CorrMatrix:
    """Pearson correlations of daily returns, dimensionless."""

    tickers: tuple[str, ...]
    values: np.ndarray

    def __post_init__(self) -> None:
        values = np.array(self.values, dtype=float)
        n = len(self.tickers)
        if values.shape != (n, n):
            raise ValueError("correlation matrix shape does not match tickers")
        if np.max(np.abs(values - values.T), initial=0.0) > 1e-12:
            raise ValueError("correlation matrix must be symmetric within 1e-12")
        if np.any(np.diag(values) != 1.0):
            raise ValueError("correlation diagonal must be exactly 1")
        if np.any(values < -1.0) or np.any(values > 1.0):
            raise ValueError("correlation entries must lie in [-1, 1]")
        values.setflags(write=False)
        object.__setattr__(self, "tickers", tuple(self.tickers))
        object.__setattr__(self, "values", values)


@dataclass(frozen=True)
class AssetStats:
    """Per-ticker daily/annual mean return and volatility."""

    tickers: tuple[str, ...]
    mean_daily: np.ndarray
    daily_vol: np.ndarray
    annual_vol: np.ndarray
    annual_mean: np.ndarray


@dataclass(frozen=True)
class CumulativeCurve:
    """Compounded cumulative return per date: ``prod(1 + r) - 1`` up to each day."""

    dates: tuple[date, ...]
    values: np.ndarray

    def __post_init__(self) -> None:
        values = np.array(self.values, dtype=float)
        if values.shape != (len(self.dates),):
            raise ValueError("curve values must align with curve dates")
        values.setflags(write=False)
        object.__setattr__(self, "dates", tuple(self.dates))
        object.__setattr__(self, "values", values)


def simple_returns(table: PriceTable) -> ReturnTable:
    """Day-over-day fractional changes: ``P[t+1] / P[t] - 1``."""
    closes = _cleaned_closes(table)
    values = closes[1:] / closes[:-1] - 1.0
    return ReturnTable(table.dates[1:], table.tickers, values)


def log_returns(table: PriceTable) -> ReturnTable:
    """Day-over-day log changes: ``ln(P[t+1] / P[t])``."""
    closes = _cleaned_closes(table)
    values = np.log(closes[1:] / closes[:-1])
    return ReturnTable(table.dates[1:], table.tickers, values)


def _cleaned_closes(table: PriceTable) -> np.ndarray:
    if table.has_missing():
        raise ValueError("price table still has missing cells; forward_fill first")
    return table.closes


def volatility(returns: ReturnTable, trading_days: int = TRADING_DAYS) -> AssetStats:
    """Per-column mean and sample standard deviation, daily and annualized."""
    if returns.n_rows < 2:
        raise InsufficientDataError(
            f"volatility needs at least 2 return rows, got {returns.n_rows}"
        )
    mean_daily = returns.values.mean(axis=0)
    daily_vol = returns.values.std(axis=0, ddof=1)
    root = math.sqrt(trading_days)
    return AssetStats(
        tickers=returns.tickers,
        mean_daily=mean_daily,
        daily_vol=daily_vol,
        annual_vol=daily_vol * root,
        annual_mean=mean_daily * trading_days,
    )


def covariance_values(values: np.ndarray) -> np.ndarray:
    """Sample covariance (divisor T-1) of the columns of a T x N array."""
    values = np.asarray(values, dtype=float)
    if values.shape[0] < 2:
        raise InsufficientDataError("covariance needs at least 2 rows")
    return np.atleast_2d(np.cov(values, rowvar=False, ddof=1))


def correlation_values(values: np.ndarray) -> np.ndarray:
    """Correlation of the columns, with zero-variance columns mapped to 0."""
    cov = covariance_values(values)
    var = np.diag(cov)
    degenerate = var <= VARIANCE_FLOOR
    std = np.sqrt(np.where(degenerate, 1.0, var))
    corr = cov / np.outer(std, std)
    corr[degenerate, :] = 0.0
    corr[:, degenerate] = 0.0
    corr = np.clip(corr, -1.0, 1.0)
    np.fill_diagonal(corr, 1.0)
    return corr


def covariance(returns: ReturnTable) -> CovMatrix:
    return CovMatrix(returns.tickers, covariance_values(returns.values))


def correlation(returns: ReturnTable) -> CorrMatrix:
    return CorrMatrix(returns.tickers, correlation_values(returns.values))


def portfolio_return(weights: Portfolio | np.ndarray, mean_returns: np.ndarray) -> float:
    """Weighted mean return: sum of w_i * mu_i."""
    w = _weight_vector(weights)
    mu = np.asarray(mean_returns, dtype=float)
    if w.shape != mu.shape:
        raise ValueError(f"weights {w.shape} and returns {mu.shape} do not match")
    return float(w @ mu)


def portfolio_variance(weights: Portfolio | np.ndarray, cov: CovMatrix | np.ndarray) -> float:
    """Portfolio variance as the explicit double sum.

    N weighted variance terms plus N(N-1)/2 doubled covariance terms
    (55 in total for N=10). The quadratic-form identity ``w' S w`` is kept
    as an independent oracle in the tests, not used here.
    """
    w = _weight_vector(weights)
    sigma = cov.values if isinstance(cov, CovMatrix) else np.asarray(cov, dtype=float)
    n = w.shape[0]
    if sigma.shape != (n, n):
        raise ValueError(f"weights ({n}) and covariance {sigma.shape} do not match")
    total = 0.0
    for i in range(n):
        total += w[i] * w[i] * sigma[i, i]
    for i in range(n):
        for j in range(i + 1, n):
            total += 2.0 * w[i] * w[j] * sigma[i, j]
    return total


def sharpe_ratio(portfolio_return: float, risk_free: float, portfolio_vol: float) -> float:
    """Excess return over the risk-free rate per unit of volatility."""
    if portfolio_vol <= 0:
        raise UndefinedSharpeError(
            f"Sharpe ratio undefined for volatility {portfolio_vol}"
        )
    return (portfolio_return - risk_free) / portfolio_vol


def cumulative_returns(returns: ReturnTable, schedule: WeightSchedule) -> CumulativeCurve:
    """Compounded portfolio return curve under a (possibly dynamic) weight schedule."""
    weights = aligned_weights(schedule, returns.dates)
    daily = (returns.values * weights).sum(axis=1)
    values = np.cumprod(1.0 + daily) - 1.0
    return CumulativeCurve(returns.dates, values)


def aligned_weights(schedule: WeightSchedule, dates: tuple[date, ...]) -> np.ndarray:
    """Rows of the schedule matching ``dates``; the schedule must cover them all."""
    if schedule.dates == tuple(dates):
        return schedule.weights
    by_date = {d: i for i, d in enumerate(schedule.dates)}
    missing = [d for d in dates if d not in by_date]
    if missing:
        raise AlignmentError(
            f"schedule does not cover {len(missing)} return date(s), "
            f"first missing {missing[0]}"
        )
    return schedule.weights[[by_date[d] for d in dates]]


def _weight_vector(weights: Portfolio | np.ndarray) -> np.ndarray:
    return np.asarray(getattr(weights, "weights", weights), dtype=float)
