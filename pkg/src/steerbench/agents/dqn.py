"""Deep Q-learning pieces: action selection, one training step, target sync.

The online network regresses Q(s, a) toward r + gamma * max_a' Q_target(s',
a') over legal a', with terminal transitions bootstrapping to zero. Action
masking applies both when acting and inside the bootstrap max, so the agent
never learns through moves it could not take.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..neural import (
    OptimizerState,
    QNetwork,
    apply_update,
    clone_weights,
    forward,
    forward_batch,
    init_optimizer,
    loss_and_gradients,
)
from .replay import ReplayBuffer

__all__ = ["DqnState", "dqn_init", "dqn_select_action", "dqn_train_step", "target_sync"]


@dataclass
class DqnState:
    online: QNetwork
    target: QNetwork
    opt: OptimizerState
    train_steps: int = 0


def dqn_init(net: QNetwork, optimizer: str = "adam", lr: float = 1e-3) -> DqnState:
    return DqnState(online=net, target=clone_weights(net), opt=init_optimizer(net, optimizer, lr))


def dqn_select_action(
    net: QNetwork,
    obs: np.ndarray,
    epsilon: float,
    mask: np.ndarray,
    rng: np.random.Generator,
) -> int:
    """Epsilon-greedy over the legal actions (greedy ties: lowest index)."""
    legal = np.flatnonzero(mask)
    if epsilon > 0.0 and rng.random() < epsilon:
        return int(legal[rng.integers(len(legal))])
    q = forward(net, obs)
    q_masked = np.where(mask, q, -np.inf)
    return int(np.argmax(q_masked))


def dqn_train_step(
    dqn: DqnState,
    buffer: ReplayBuffer,
    batch_size: int,
    gamma: float,
    rng: np.random.Generator,
) -> float:
    """Sample a minibatch, regress toward the target network, update once."""
    batch = buffer.sample(batch_size, rng)
    q_next = forward_batch(dqn.target, batch.next_obs)
    q_next = np.where(batch.next_mask, q_next, -np.inf)
    bootstrap = np.where(batch.done, 0.0, q_next.max(axis=1))
    targets = batch.reward + gamma * bootstrap
    loss, grads = loss_and_gradients(dqn.online, batch.obs, batch.action, targets)
    apply_update(dqn.online, grads, dqn.opt)
    dqn.train_steps += 1
    return loss


def target_sync(dqn: DqnState) -> None:
    dqn.target = clone_weights(dqn.online)
