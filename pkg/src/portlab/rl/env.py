"""Market environment for the rebalancing agent.

The state couples the upper triangle of the rolling-window return
correlation matrix with the current portfolio weights; the Markov
property needs the weights since actions adjust them. Actions nudge one
asset's weight by ``step_delta`` (buy/sell) or leave it alone (hold);
the reward is the annualized Sharpe ratio (risk-free 0) of the portfolio
over the days the adjusted weights were held.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..analytics import TRADING_DAYS, ReturnTable, correlation_values
from ..errors import InsufficientDataError
from .params import Hyperparams

VOL_FLOOR = 1e-8


def num_actions(n_assets: int) -> int:
    """2N+1 discrete actions: buy k (id 2k), sell k (id 2k+1), hold (id 2N)."""
    return 2 * n_assets + 1


def buy_action(asset: int) -> int:
    return 2 * asset


def sell_action(asset: int) -> int:
    return 2 * asset + 1


def hold_action(n_assets: int) -> int:
    return 2 * n_assets


def feature_dim(n_assets: int) -> int:
    """N(N-1)/2 correlation features plus N weights."""
    return n_assets * (n_assets - 1) // 2 + n_assets


@dataclass(frozen=True)
class EnvState:
    """Correlation features over the trailing window, weights, and time index."""

    corr_features: np.ndarray
    weights: np.ndarray
    t: int

    def __post_init__(self) -> None:
        corr = np.asarray(self.corr_features, dtype=float)
        weights = np.asarray(self.weights, dtype=float)
        if np.any(corr < -1.0) or np.any(corr > 1.0):
            raise ValueError("correlation features must lie in [-1, 1]")
        if np.any(weights < 0) or abs(float(weights.sum()) - 1.0) > 1e-9:
            raise ValueError("weights must lie on the simplex")
        object.__setattr__(self, "corr_features", corr)
        object.__setattr__(self, "weights", weights)


def state_features(state: EnvState) -> np.ndarray:
    """Network input vector: correlation features then weights."""
    return np.concatenate([state.corr_features, state.weights])


def apply_action(weights: np.ndarray, action: int, delta: float) -> np.ndarray:
    """Adjust one weight by ``delta`` and renormalize; hold leaves weights as-is."""
    n = weights.shape[0]
    if not 0 <= action <= 2 * n:
        raise ValueError(f"action id {action} out of range for {n} assets")
    if action == hold_action(n):
        return weights
    asset, is_sell = divmod(action, 2)
    adjusted = weights.copy()
    if is_sell:
        adjusted[asset] = max(0.0, adjusted[asset] - delta)
    else:
        adjusted[asset] += delta
    return adjusted / adjusted.sum()


def env_reset(returns: ReturnTable, hp: Hyperparams) -> EnvState:
    """Initial state: equal weights, features from the first ``window`` rows."""
    if returns.n_rows <= hp.window + hp.rebalance_period:
        raise InsufficientDataError(
            f"need more than window + rebalance_period = "
            f"{hp.window + hp.rebalance_period} return rows, got {returns.n_rows}"
        )
    n = returns.n_assets
    weights = np.full(n, 1.0 / n)
    features = _corr_features(returns.values[: hp.window])
    return EnvState(features, weights, hp.window)


def env_step(
    state: EnvState,
    action: int,
    returns: ReturnTable,
    hp: Hyperparams,
) -> tuple[EnvState, float, bool]:
    """Apply an action, hold the weights for ``rebalance_period`` days, score them.

    Returns the next state (time advanced, correlation window refreshed),
    the annualized Sharpe reward over the held days, and whether fewer
    than ``rebalance_period`` days remain afterwards.
    """
    t = state.t
    if t + hp.rebalance_period > returns.n_rows:
        raise InsufficientDataError(
            f"cannot step: only {returns.n_rows - t} rows left at t={t}"
        )
    weights = apply_action(state.weights, action, hp.step_delta)
    held = returns.values[t : t + hp.rebalance_period] @ weights
    reward = annualized_sharpe(held)

    t_next = t + hp.rebalance_period
    features = _corr_features(returns.values[t_next - hp.window : t_next])
    done = (returns.n_rows - t_next) < hp.rebalance_period
    return EnvState(features, weights, t_next), reward, done


def annualized_sharpe(
    daily_returns: np.ndarray, trading_days: int = TRADING_DAYS
) -> float:
    """Mean/std Sharpe of a daily return stream, annualized, risk-free 0.

    The annualized volatility is floored at VOL_FLOOR so the value stays
    finite on degenerate (constant or single-day) windows.
    """
    daily = np.asarray(daily_returns, dtype=float)
    mean = float(daily.mean()) * trading_days
    std = float(daily.std(ddof=1)) if daily.shape[0] >= 2 else 0.0
    vol = max(std * math.sqrt(trading_days), VOL_FLOOR)
    return mean / vol


def _corr_features(window_returns: np.ndarray) -> np.ndarray:
    corr = correlation_values(window_returns)
    iu = np.triu_indices(corr.shape[0], k=1)
    return corr[iu]
