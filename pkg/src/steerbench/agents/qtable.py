"""Tabular Q-learning: a dict-backed table plus the one-step update rule.

The table maps a hashable state key to a vector of action values. On the
steering environments the key comes from a coarse discretizer; the update
rule itself is environment-agnostic and is validated against exact value
iteration on a small fixed MDP in the test suite.
"""

from __future__ import annotations

import numpy as np

from ..envs.env1 import Env1State
from ..envs.env2 import Env2State
from ..envs.rewards import signed_margin

__all__ = ["QTable", "qlearning_update", "table_greedy_action", "discretize_state"]


class QTable:
    def __init__(self, n_actions: int):
        self.n_actions = n_actions
        self._q: dict = {}
        self._visits: dict = {}

    def values(self, key) -> np.ndarray:
        row = self._q.get(key)
        if row is None:
            row = np.zeros(self.n_actions)
            self._q[key] = row
        return row

    def visit(self, key, action: int) -> int:
        """Increment and return the visit count of (state, action)."""
        k = (key, action)
        n = self._visits.get(k, 0) + 1
        self._visits[k] = n
        return n

    def __len__(self) -> int:
        return len(self._q)


def table_greedy_action(table: QTable, key, mask: np.ndarray) -> int:
    """Highest-value legal action, lowest index on ties."""
    q = table.values(key).copy()
    q[~mask] = -np.inf
    return int(np.argmax(q))


def qlearning_update(
    table: QTable,
    key,
    action: int,
    reward: float,
    next_key,
    next_mask: np.ndarray,
    done: bool,
    alpha: float,
    gamma: float,
) -> float:
    """One temporal-difference backup; returns the TD error."""
    q = table.values(key)
    if done:
        target = reward
    else:
        q_next = table.values(next_key).copy()
        q_next[~next_mask] = -np.inf
        target = reward + gamma * float(q_next.max())
    td = target - q[action]
    q[action] += alpha * td
    return td


def discretize_state(state) -> tuple:
    """Coarse hashable key for the steering environments.

    Faulted environment: (stage, quarter-meter offset bin). Layered
    environment: (stage, eighth-of-thickness margin bin, rounded
    inclination).
    """
    if isinstance(state, Env2State):
        rho = state.tvd - float(state.real.mid[state.stage])
        return (state.stage, int(round(rho / 0.25)))
    if isinstance(state, Env1State):
        i = state.point
        top = float(state.real.top[i])
        bottom = top + float(state.real.thickness[i])
        margin = signed_margin(state.tvd, top, bottom)
        margin_bin = int(np.clip(round(float(margin) * 8), -12, 12))
        return (state.stage, margin_bin, int(round(state.inclination_deg)))
    raise TypeError(f"unsupported state type: {type(state).__name__}")
