"""Fixed-capacity experience replay with uniform sampling."""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

__all__ = ["Experience", "ReplayBuffer"]


class Experience(NamedTuple):
    """One transition, or a batch of them when the fields are stacked."""

    obs: np.ndarray
    action: int | np.ndarray
    reward: float | np.ndarray
    next_obs: np.ndarray
    done: bool | np.ndarray
    next_mask: np.ndarray


class ReplayBuffer:
    """Ring buffer over preallocated arrays; overwrites oldest when full."""

    def __init__(self, capacity: int, obs_dim: int, n_actions: int):
        self.capacity = capacity
        self._obs = np.empty((capacity, obs_dim))
        self._actions = np.empty(capacity, dtype=np.int64)
        self._rewards = np.empty(capacity)
        self._next_obs = np.empty((capacity, obs_dim))
        self._dones = np.empty(capacity, dtype=bool)
        self._next_masks = np.empty((capacity, n_actions), dtype=bool)
        self._size = 0
        self._cursor = 0

    def __len__(self) -> int:
        return self._size

    def push(self, exp: Experience) -> None:
        i = self._cursor
        self._obs[i] = exp.obs
        self._actions[i] = exp.action
        self._rewards[i] = exp.reward
        self._next_obs[i] = exp.next_obs
        self._dones[i] = exp.done
        self._next_masks[i] = exp.next_mask
        self._cursor = (i + 1) % self.capacity
        self._size = min(self._size + 1, self.capacity)

    def sample(self, batch_size: int, rng: np.random.Generator) -> Experience:
        idx = rng.integers(self._size, size=batch_size)
        return Experience(
            obs=self._obs[idx],
            action=self._actions[idx],
            reward=self._rewards[idx],
            next_obs=self._next_obs[idx],
            done=self._dones[idx],
            next_mask=self._next_masks[idx],
        )
