"""Deep-Q-network rebalancing agent: environment, network, training, checks."""

from .agent import (
    EpisodeStats,
    ReplayBuffer,
    Transition,
    epsilon_greedy,
    evaluate,
    read_training_log,
    train,
    write_training_log,
)
from .env import (
    EnvState,
    annualized_sharpe,
    apply_action,
    buy_action,
    env_reset,
    env_step,
    feature_dim,
    hold_action,
    num_actions,
    sell_action,
    state_features,
)
from .network import (
    QNetwork,
    load_qnetwork,
    qnet_forward,
    qnet_init,
    qnet_train_step,
    save_qnetwork,
    td_target,
    td_targets,
)
from .params import Hyperparams
from .tabular import ToyMDP, tabular_q_check, two_state_chain, value_iteration

__all__ = [
    "EnvState",
    "EpisodeStats",
    "Hyperparams",
    "QNetwork",
    "ReplayBuffer",
    "ToyMDP",
    "Transition",
    "annualized_sharpe",
    "apply_action",
    "buy_action",
    "env_reset",
    "env_step",
    "epsilon_greedy",
    "evaluate",
    "feature_dim",
    "hold_action",
    "load_qnetwork",
    "num_actions",
    "qnet_forward",
    "qnet_init",
    "qnet_train_step",
    "read_training_log",
    "save_qnetwork",
    "sell_action",
    "state_features",
    "tabular_q_check",
    "td_target",
    "td_targets",
    "train",
    "two_state_chain",
    "value_iteration",
    "write_training_log",
]
