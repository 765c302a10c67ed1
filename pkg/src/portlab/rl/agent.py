"""DQN training loop, replay buffer, epsilon-greedy policy, and evaluation.

Training is strictly sequential and bit-reproducible: one generator
seeded from the hyperparameters drives network init, exploration, and
replay sampling in a fixed order.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ..analytics import CumulativeCurve, ReturnTable, cumulative_returns
from ..backtest import WeightSchedule
from .env import annualized_sharpe, env_reset, env_step, state_features
from .network import QNetwork, qnet_forward, qnet_init, qnet_train_step, td_targets
from .params import Hyperparams


@dataclass(frozen=True)
class Transition:
    """One environment step, stored as feature vectors."""

    state: np.ndarray
    action: int
    reward: float
    next_state: np.ndarray
    done: bool

    def __post_init__(self) -> None:
        if not math.isfinite(self.reward):
            raise ValueError("reward must be finite")


class ReplayBuffer:
    """Bounded transition store with ring semantics: oldest evicted first."""

    def __init__(self, capacity: int):
        if capacity < 1:
            raise ValueError("capacity must be >= 1")
        self.capacity = capacity
        self._items: list[Transition] = []
        self._cursor = 0

    def push(self, transition: Transition) -> None:
        if len(self._items) < self.capacity:
            self._items.append(transition)
        else:
            self._items[self._cursor] = transition
            self._cursor = (self._cursor + 1) % self.capacity

    def __len__(self) -> int:
        return len(self._items)

    def sample(self, rng: np.random.Generator, batch_size: int) -> list[Transition]:
        """Uniform sample with replacement."""
        idx = rng.integers(0, len(self._items), size=batch_size)
        return [self._items[i] for i in idx]


def epsilon_greedy(qvals: np.ndarray, eps: float, rng: np.random.Generator) -> int:
    """Uniform random action with probability eps, else argmax (ties: lowest id)."""
    if not 0.0 <= eps <= 1.0:
        raise ValueError("eps must be in [0, 1]")
    if rng.random() < eps:
        return int(rng.integers(0, len(qvals)))
    return int(np.argmax(qvals))


@dataclass(frozen=True)
class EpisodeStats:
    episode: int
    cum_reward: float
    mean_loss: float
    epsilon: float


def train(
    returns_train: ReturnTable, hp: Hyperparams
) -> tuple[QNetwork, list[EpisodeStats]]:
    """Run the replay-trained DQN loop over the training returns.

    Per episode: reset, act epsilon-greedily until done, push transitions,
    and once the buffer holds a batch do one gradient step per environment
    step on a uniformly sampled batch. Epsilon decays multiplicatively per
    episode down to ``eps_min``. With ``episodes=0`` the freshly
    initialized network is returned untouched.
    """
    rng = np.random.default_rng(hp.seed)
    net = qnet_init(returns_train.n_assets, hp, rng=rng)
    buffer = ReplayBuffer(hp.replay_capacity)
    eps = hp.eps_start
    log: list[EpisodeStats] = []
    global_step = 0

    for episode in range(hp.episodes):
        state = env_reset(returns_train, hp)
        cum_reward = 0.0
        losses: list[float] = []
        done = False
        while not done:
            features = state_features(state)
            action = epsilon_greedy(qnet_forward(net, features), eps, rng)
            next_state, reward, done = env_step(state, action, returns_train, hp)
            buffer.push(
                Transition(features, action, reward, state_features(next_state), done)
            )
            cum_reward += reward
            if len(buffer) >= hp.batch_size:
                batch = buffer.sample(rng, hp.batch_size)
                targets = td_targets(batch, net, hp.discount)
                losses.append(
                    qnet_train_step(net, batch, targets, hp.learning_rate, step=global_step)
                )
            state = next_state
            global_step += 1
        mean_loss = float(np.mean(losses)) if losses else 0.0
        log.append(EpisodeStats(episode, cum_reward, mean_loss, eps))
        eps = max(hp.eps_min, eps * hp.eps_decay)

    return net, log


def evaluate(
    net: QNetwork, returns_test: ReturnTable, hp: Hyperparams
) -> tuple[WeightSchedule, CumulativeCurve, float]:
    """Roll the greedy policy over the test table.

    The emitted schedule covers every test date: equal weights during the
    initial lookback window, each action's adjusted weights for the days
    they were held, and the final weights over any trailing remainder.
    Returns the schedule, the compounded cumulative-return curve, and the
    annualized Sharpe (risk-free 0) of the schedule's daily returns.
    """
    n_rows, n_assets = returns_test.values.shape
    weights = np.empty((n_rows, n_assets))
    state = env_reset(returns_test, hp)
    weights[: state.t] = state.weights
    done = False
    while not done:
        action = int(np.argmax(qnet_forward(net, state_features(state))))
        next_state, _, done = env_step(state, action, returns_test, hp)
        weights[state.t : next_state.t] = next_state.weights
        state = next_state
    weights[state.t :] = state.weights

    schedule = WeightSchedule(returns_test.dates, weights)
    curve = cumulative_returns(returns_test, schedule)
    daily = (returns_test.values * weights).sum(axis=1)
    return schedule, curve, annualized_sharpe(daily)


def write_training_log(log: list[EpisodeStats], path: str | Path) -> None:
    """CSV log: ``episode,cum_reward,mean_loss,epsilon``."""
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["episode", "cum_reward", "mean_loss", "epsilon"])
        for row in log:
            writer.writerow(
                [row.episode, repr(row.cum_reward), repr(row.mean_loss), repr(row.epsilon)]
            )


def read_training_log(path: str | Path) -> list[EpisodeStats]:
    with Path(path).open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        next(reader)
        return [
            EpisodeStats(int(r[0]), float(r[1]), float(r[2]), float(r[3]))
            for r in reader
            if r
        ]
