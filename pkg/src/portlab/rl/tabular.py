"""Tabular Q-learning sanity check against value iteration.

Validates the TD update rule on a tiny solvable MDP: the same Bellman
backup used for DQN targets, applied to a lookup table, must converge to
the value-iteration fixed point.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .network import td_target


@dataclass(frozen=True)
class ToyMDP:
    """Deterministic MDP: ``next_state[s, a]`` and ``rewards[s, a]``."""

    next_state: np.ndarray
    rewards: np.ndarray

    def __post_init__(self) -> None:
        next_state = np.asarray(self.next_state, dtype=int)
        rewards = np.asarray(self.rewards, dtype=float)
        if next_state.shape != rewards.shape or next_state.ndim != 2:
            raise ValueError("next_state and rewards must share an (S, A) shape")
        if np.any(next_state < 0) or np.any(next_state >= next_state.shape[0]):
            raise ValueError("next_state entries must be valid state indices")
        object.__setattr__(self, "next_state", next_state)
        object.__setattr__(self, "rewards", rewards)

    @property
    def n_states(self) -> int:
        return self.next_state.shape[0]

    @property
    def n_actions(self) -> int:
        return self.next_state.shape[1]


def two_state_chain() -> ToyMDP:
    """Two states, two actions (stay / switch), distinct optimal Q-values."""
    return ToyMDP(
        next_state=np.array([[0, 1], [1, 0]]),
        rewards=np.array([[0.0, 1.0], [2.0, 0.0]]),
    )


def value_iteration(
    mdp: ToyMDP, discount: float, tol: float = 1e-12, max_iter: int = 1_000_000
) -> np.ndarray:
    """Optimal action-value table Q* by fixed-point iteration."""
    q = np.zeros((mdp.n_states, mdp.n_actions))
    for _ in range(max_iter):
        v_next = q.max(axis=1)[mdp.next_state]
        updated = mdp.rewards + discount * v_next
        if np.max(np.abs(updated - q)) < tol:
            return updated
        q = updated
    raise RuntimeError("value iteration did not converge")


def tabular_q_check(
    mdp: ToyMDP, discount: float, alpha: float, steps: int, seed: int = 0
) -> float:
    """Max |Q - Q*| after running tabular Q-learning with the module's TD rule.

    Exploring starts: each step samples a uniformly random (state, action)
    pair, applies the deterministic dynamics, and nudges the table toward
    the :func:`td_target` backup with step size ``alpha``.
    """
    rng = np.random.default_rng(seed)
    q = np.zeros((mdp.n_states, mdp.n_actions))
    for _ in range(steps):
        s = int(rng.integers(mdp.n_states))
        a = int(rng.integers(mdp.n_actions))
        s_next = int(mdp.next_state[s, a])
        target = td_target(mdp.rewards[s, a], discount, float(q[s_next].max()), False)
        q[s, a] += alpha * (target - q[s, a])
    q_star = value_iteration(mdp, discount)
    return float(np.max(np.abs(q - q_star)))
