"""Mean-variance portfolios via Monte-Carlo frontier sampling.

The random cloud stands in for the textbook quadratic program: the
minimum-risk portfolio is the cloud's lowest-volatility point and the
optimum-risk portfolio its highest-Sharpe point. A closed-form solution
of the sum-to-one minimum-variance problem is kept alongside as an
oracle for the sampler.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .analytics import TRADING_DAYS, CovMatrix
from .errors import SingularMatrixError, UndefinedSharpeError

_CHUNK = 1000  # sampling chunk; fixed so clouds are prefix-stable across counts


@dataclass(frozen=True)
class Portfolio:
    """Named long-only weight vector on the unit simplex."""

    tickers: tuple[str, ...]
    weights: np.ndarray

    def __post_init__(self) -> None:
        weights = np.array(self.weights, dtype=float)
        if weights.shape != (len(self.tickers),):
            raise ValueError("weights must align with tickers")
        if not np.all(np.isfinite(weights)):
            raise ValueError("weights must be finite")
        if np.any(weights < 0):
            raise ValueError("weights must be non-negative (long-only)")
        if abs(float(weights.sum()) - 1.0) > 1e-9:
            raise ValueError(f"weights must sum to 1, got {weights.sum()!r}")
        weights.setflags(write=False)
        object.__setattr__(self, "tickers", tuple(self.tickers))
        object.__setattr__(self, "weights", weights)


@dataclass(frozen=True)
class FrontierPoint:
    """One sampled portfolio: annualized volatility/return, Sharpe, weights."""

    annual_volatility: float
    annual_return: float
    sharpe: float
    weights: np.ndarray


@dataclass(frozen=True)
class FrontierCloud:
    """The full Monte-Carlo sample; deterministic for a fixed seed."""

    points: tuple[FrontierPoint, ...]
    seed: int
    sample_count: int
    risk_free: float

    def __post_init__(self) -> None:
        if len(self.points) != self.sample_count:
            raise ValueError("point count must equal sample_count")
        weights = np.stack([p.weights for p in self.points])
        if np.any(weights < 0) or np.max(np.abs(weights.sum(axis=1) - 1.0)) > 1e-9:
            raise ValueError("every sampled weight vector must lie on the simplex")
        vols = np.array([p.annual_volatility for p in self.points])
        rets = np.array([p.annual_return for p in self.points])
        sharpes = np.array([p.sharpe for p in self.points])
        if np.max(np.abs(sharpes - (rets - self.risk_free) / vols), initial=0.0) > 1e-9:
            raise ValueError("stored Sharpe values inconsistent with return/volatility")

    def volatilities(self) -> np.ndarray:
        return np.array([p.annual_volatility for p in self.points])

    def returns(self) -> np.ndarray:
        return np.array([p.annual_return for p in self.points])

    def sharpes(self) -> np.ndarray:
        return np.array([p.sharpe for p in self.points])


@dataclass(frozen=True)
class MinVariancePortfolio:
    """Closed-form minimum-variance solution (sum-to-one constraint only).

    Unlike :class:`Portfolio` this may carry negative weights; ``long_only``
    flags whether it happens to satisfy the long-only constraint.
    """

    tickers: tuple[str, ...]
    weights: np.ndarray
    long_only: bool

    def __post_init__(self) -> None:
        weights = np.array(self.weights, dtype=float)
        if not np.all(np.isfinite(weights)):
            raise ValueError("weights must be finite")
        if abs(float(weights.sum()) - 1.0) > 1e-9:
            raise ValueError("weights must sum to 1")
        weights.setflags(write=False)
        object.__setattr__(self, "weights", weights)
        object.__setattr__(self, "tickers", tuple(self.tickers))


def equal_weight(n: int, tickers: tuple[str, ...] | None = None) -> Portfolio:
    """1/n in every asset."""
    if n < 1:
        raise ValueError("need at least one asset")
    if tickers is None:
        tickers = tuple(f"asset_{i}" for i in range(n))
    elif len(tickers) != n:
        raise ValueError("tickers must match asset count")
    return Portfolio(tickers, np.full(n, 1.0 / n))


def sample_portfolios(
    mu: np.ndarray,
    cov: CovMatrix | np.ndarray,
    count: int,
    risk_free: float,
    seed: int,
    trading_days: int = TRADING_DAYS,
) -> FrontierCloud:
    """Draw ``count`` random long-only portfolios and score each one.

    Weights are N independent uniform(0,1) draws normalized to sum 1.
    ``mu`` is annual mean returns; ``cov`` is the daily covariance, so
    volatility is annualized here. Sampling is chunked with one child
    RNG stream per chunk, which makes the cloud a deterministic function
    of the seed and prefix-stable in ``count``.
    """
    if count < 1:
        raise ValueError("count must be >= 1")
    mu = np.asarray(mu, dtype=float)
    sigma = cov.values if isinstance(cov, CovMatrix) else np.asarray(cov, dtype=float)
    n = mu.shape[0]
    if sigma.shape != (n, n):
        raise ValueError("mu and covariance dimensions do not match")

    n_chunks = (count + _CHUNK - 1) // _CHUNK
    streams = np.random.SeedSequence(seed).spawn(n_chunks)
    points: list[FrontierPoint] = []
    for chunk_idx in range(n_chunks):
        k = min(_CHUNK, count - chunk_idx * _CHUNK)
        rng = np.random.default_rng(streams[chunk_idx])
        draws = rng.uniform(size=(k, n))
        weights = draws / draws.sum(axis=1, keepdims=True)
        variances = np.maximum(np.einsum("ij,jk,ik->i", weights, sigma, weights), 0.0)
        vols = np.sqrt(variances * trading_days)
        if np.any(vols <= 0):
            raise UndefinedSharpeError("sampled portfolio has zero volatility")
        rets = weights @ mu
        sharpes = (rets - risk_free) / vols
        for i in range(k):
            points.append(
                FrontierPoint(
                    annual_volatility=float(vols[i]),
                    annual_return=float(rets[i]),
                    sharpe=float(sharpes[i]),
                    weights=weights[i],
                )
            )
    return FrontierCloud(tuple(points), seed, count, risk_free)


def min_risk_portfolio(cloud: FrontierCloud) -> FrontierPoint:
    """The cloud's leftmost point: minimum volatility, ties to the lower index."""
    return cloud.points[int(np.argmin(cloud.volatilities()))]


def max_sharpe_portfolio(cloud: FrontierCloud) -> FrontierPoint:
    """The cloud's optimum-risk point: maximum Sharpe, ties to the lower index."""
    return cloud.points[int(np.argmax(cloud.sharpes()))]


def efficient_frontier(cloud: FrontierCloud, bins: int) -> list[FrontierPoint]:
    """Maximum-return point per volatility bin, ordered by volatility."""
    if bins < 1:
        raise ValueError("bins must be >= 1")
    vols = cloud.volatilities()
    rets = cloud.returns()
    vmin = float(vols.min())
    vmax = float(vols.max())
    if vmax == vmin:
        bin_of = np.zeros(len(vols), dtype=int)
    else:
        bin_of = np.minimum(
            ((vols - vmin) / (vmax - vmin) * bins).astype(int), bins - 1
        )
    chosen: list[int] = []
    for b in range(bins):
        members = np.nonzero(bin_of == b)[0]
        if members.size == 0:
            continue
        chosen.append(int(members[np.argmax(rets[members])]))
    chosen.sort(key=lambda i: (vols[i], i))
    return [cloud.points[i] for i in chosen]


def closed_form_min_variance(cov: CovMatrix | np.ndarray) -> MinVariancePortfolio:
    """Analytic minimum-variance weights: ``S^-1 1 / (1' S^-1 1)``.

    Solves the variance minimization with only the sum-to-one constraint,
    so weights can go negative; used as the oracle for the sampled cloud.
    Adds ``1e-10 I`` once if the matrix is (near-)singular.
    """
    if isinstance(cov, CovMatrix):
        tickers = cov.tickers
        sigma = cov.values
    else:
        sigma = np.asarray(cov, dtype=float)
        tickers = tuple(f"asset_{i}" for i in range(sigma.shape[0]))
    n = sigma.shape[0]
    if n == 0:
        raise ValueError("covariance matrix must be non-empty")
    ones = np.ones(n)

    x = _solve_or_none(sigma, ones)
    if x is None:
        x = _solve_or_none(sigma + 1e-10 * np.eye(n), ones)
    if x is None:
        raise SingularMatrixError("covariance matrix singular even after regularization")
    denom = float(x.sum())
    if denom == 0.0 or not np.isfinite(denom):
        raise SingularMatrixError("degenerate minimum-variance solution")
    weights = x / denom
    return MinVariancePortfolio(tickers, weights, long_only=bool(np.all(weights >= 0)))


def _solve_or_none(sigma: np.ndarray, ones: np.ndarray) -> np.ndarray | None:
    try:
        x = np.linalg.solve(sigma, ones)
    except np.linalg.LinAlgError:
        return None
    if not np.all(np.isfinite(x)):
        return None
    residual = float(np.max(np.abs(sigma @ x - ones)))
    if residual > 1e-8 * max(1.0, float(np.max(np.abs(ones)))):
        return None
    return x


def write_frontier_csv(cloud: FrontierCloud, path: str | Path) -> None:
    """Dump the cloud as ``volatility,return,sharpe,w1..wN`` (one row per point)."""
    n = cloud.points[0].weights.shape[0]
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["volatility", "return", "sharpe"] + [f"w{i + 1}" for i in range(n)])
        for p in cloud.points:
            writer.writerow(
                [repr(p.annual_volatility), repr(p.annual_return), repr(p.sharpe)]
                + [repr(float(w)) for w in p.weights]
            )


def read_frontier_csv(path: str | Path) -> np.ndarray:
    """Read a frontier CSV back into a (count, 3 + N) float array."""
    with Path(path).open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        next(reader)
        rows = [[float(cell) for cell in row] for row in reader if row]
    return np.array(rows, dtype=float)
