"""Decision policies: myopic greedy, DP on the discretized belief state,
tabular Q-learning, and the DQN pieces."""

from .replay import Experience, ReplayBuffer
from .greedy import greedy_select
from .dsdp import DsdpPolicy, dsdp_solve, dsdp_act, save_policy, load_policy, solve_cached
from .qtable import QTable, qlearning_update, table_greedy_action, discretize_state
from .dqn import DqnState, dqn_init, dqn_select_action, dqn_train_step, target_sync

__all__ = [
    "Experience",
    "ReplayBuffer",
    "greedy_select",
    "DsdpPolicy",
    "dsdp_solve",
    "dsdp_act",
    "save_policy",
    "load_policy",
    "solve_cached",
    "QTable",
    "qlearning_update",
    "table_greedy_action",
    "discretize_state",
    "DqnState",
    "dqn_init",
    "dqn_select_action",
    "dqn_train_step",
    "target_sync",
]
