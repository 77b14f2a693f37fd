"""Training loops and checkpoint round-tripping for the learning agents.

Seeding layout (all through numpy SeedSequence so streams never collide):

* geology for training episode e of run seed s:  SeedSequence((s, 1, e))
* agent randomness (init, epsilon, minibatches): SeedSequence((s, 0))
* geology for evaluation episode e:              SeedSequence((eval_seed, e))
* policy randomness during evaluation:           SeedSequence((eval_seed, e, 1))

Evaluation streams depend only on the eval seed, so every agent is scored
on the same geology draws (paired comparisons).
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, replace

import numpy as np

from ..agents.dqn import DqnState, dqn_init, dqn_select_action, dqn_train_step, target_sync
from ..agents.qtable import QTable, discretize_state, qlearning_update, table_greedy_action
from ..agents.replay import Experience, ReplayBuffer
from ..envs.env1 import (
    ACTIONS_ENV1,
    OBS_DIM_ENV1,
    env1_reset,
    legal_actions_env1,
    observe_env1,
    step_env1,
)
from ..envs.env2 import (
    ACTIONS_ENV2,
    OBS_DIM_ENV2,
    env2_reset,
    legal_actions_env2,
    observe_env2,
    step_env2,
)
from ..envs.metrics import episode_metrics
from ..geomodel import sample_realization_env1, sample_realization_env2
from ..neural import qnet_init
from .config import ExperimentConfig

__all__ = [
    "TrainingCurve",
    "TrainResult",
    "moving_average",
    "start_episode",
    "env_step",
    "observation_for",
    "legal_mask",
    "n_actions_for",
    "obs_dim_for",
    "train_agent",
]

log = logging.getLogger(__name__)


def n_actions_for(env: str) -> int:
    return len(ACTIONS_ENV1) if env == "env1" else len(ACTIONS_ENV2) + 1


def obs_dim_for(env: str) -> int:
    return OBS_DIM_ENV1 if env == "env1" else OBS_DIM_ENV2


def start_episode(
    config: ExperimentConfig,
    rng: np.random.Generator,
    scenario: tuple[float, float, float] | None = None,
):
    """Sample geology (and the episode scenario where applicable) and reset.

    In the faulted environment with v_prod unset, the per-episode value is
    drawn first, then the realization, so a fixed-v evaluation consumes the
    stream exactly like any other and stays paired across scenarios. In the
    layered environment an explicit (w1, w2, perm_low) triple overrides the
    configured scenario; training uses this to mix scenarios while
    evaluation leaves it unset and scores the configured one.
    """
    if config.env == "env1":
        w1, w2, params = config.w1, config.w2, config.layered
        if scenario is not None:
            w1, w2, perm_low = scenario
            params = replace(params, perm_low=perm_low)
        real = sample_realization_env1(params, rng)
        return env1_reset(params, real, w1, w2)
    v = config.v_prod
    if v is None:
        v = float(rng.uniform(config.v_min, config.v_max))
    real = sample_realization_env2(config.faulted, rng)
    return env2_reset(config.faulted, real, config.costs, v)


def _training_episode(config: ExperimentConfig, rng: np.random.Generator):
    """Episode start for training runs: in the layered environment draw the
    scenario uniformly from the configured pool (before the geology, so the
    stream layout matches the per-episode value draw in the faulted one)."""
    scenario = None
    if config.env == "env1":
        pool = config.train_scenarios
        scenario = pool[int(rng.integers(len(pool)))]
    return start_episode(config, rng, scenario)


def env_step(config: ExperimentConfig, state, action: int):
    if config.env == "env1":
        return step_env1(state, action)
    return step_env2(state, action)


def legal_mask(config: ExperimentConfig, state) -> np.ndarray:
    if config.env == "env1":
        return legal_actions_env1(state)
    return legal_actions_env2(state)


def observation_for(config: ExperimentConfig, state) -> np.ndarray:
    if config.env == "env1":
        mode = "posterior" if config.agent == "dqn-posterior" else "sensor"
        return observe_env1(state, mode)
    return observe_env2(state)


@dataclass
class TrainingCurve:
    """Per-episode series recorded during one training run."""

    episode: np.ndarray
    reward: np.ndarray
    contact_pct: np.ndarray
    hq_pct: np.ndarray | None
    cost: np.ndarray | None
    n_sidetracks: np.ndarray | None


def moving_average(series: np.ndarray, window: int = 100) -> np.ndarray:
    """Trailing moving average, defined from index window-1 onward. A series
    shorter than the window collapses to its single overall mean."""
    window = min(window, len(series))
    if window == 0:
        return np.empty(0)
    kernel = np.ones(window) / window
    return np.convolve(series, kernel, mode="valid")


@dataclass
class TrainResult:
    agent: str
    seed: int
    curve: TrainingCurve
    dqn: DqnState | None = None
    table: QTable | None = None


def _epsilon(config: ExperimentConfig, episode: int) -> float:
    span = max(1, int(config.eps_fraction * config.episodes))
    frac = min(1.0, episode / span)
    return config.eps_start + frac * (config.eps_end - config.eps_start)


def train_agent(config: ExperimentConfig, seed: int) -> TrainResult:
    """Train one seed of a learning agent and return it with its curve."""
    if config.agent in ("dqn-sensor", "dqn-posterior"):
        return _train_dqn(config, seed)
    if config.agent == "qlearn":
        return _train_qlearn(config, seed)
    raise ValueError(f"agent {config.agent!r} does not train")


def _record(rows: list, state) -> None:
    m = episode_metrics(state)
    rows.append((m.total_reward, m.contact_pct, m.hq_pct, m.cost, m.n_sidetracks))


def _curve_from(rows: list, env: str) -> TrainingCurve:
    arr = np.array([[r[0], r[1]] for r in rows])
    curve = TrainingCurve(
        episode=np.arange(len(rows)),
        reward=arr[:, 0],
        contact_pct=arr[:, 1],
        hq_pct=None,
        cost=None,
        n_sidetracks=None,
    )
    if env == "env1":
        curve.hq_pct = np.array([r[2] for r in rows])
    else:
        curve.cost = np.array([r[3] for r in rows])
        curve.n_sidetracks = np.array([r[4] for r in rows], dtype=float)
    return curve


def _train_dqn(config: ExperimentConfig, seed: int) -> TrainResult:
    n_actions = n_actions_for(config.env)
    obs_dim = obs_dim_for(config.env)
    agent_rng = np.random.default_rng(np.random.SeedSequence((seed, 0)))
    net = qnet_init((obs_dim, config.hidden1, config.hidden2, n_actions), agent_rng)
    dqn = dqn_init(net, config.optimizer, config.lr)
    buffer = ReplayBuffer(config.buffer_capacity, obs_dim, n_actions)
    rows: list = []

    scale = config.reward_scale
    clip = config.reward_clip
    for episode in range(config.episodes):
        eps = _epsilon(config, episode)
        ep_rng = np.random.default_rng(np.random.SeedSequence((seed, 1, episode)))
        state = _training_episode(config, ep_rng)
        obs = observation_for(config, state)
        while not state.done:
            mask = legal_mask(config, state)
            action = dqn_select_action(dqn.online, obs, eps, mask, agent_rng)
            state, reward = env_step(config, state, action)
            next_obs = observation_for(config, state)
            next_mask = legal_mask(config, state)
            # Rewards are rescaled (and optionally clipped) inside the TD
            # targets only; curves and evaluation always use the
            # environment's own units.
            r = reward / scale
            if clip > 0.0:
                r = min(clip, max(-clip, r))
            buffer.push(Experience(obs, action, r, next_obs, state.done, next_mask))
            obs = next_obs
            if len(buffer) >= config.warmup:
                for _ in range(config.updates_per_step):
                    dqn_train_step(dqn, buffer, config.batch_size, config.gamma, agent_rng)
                    if dqn.train_steps % config.target_sync_every == 0:
                        target_sync(dqn)
        _record(rows, state)
        if (episode + 1) % 1000 == 0:
            recent = np.mean([r[0] for r in rows[-100:]])
            log.info(
                "seed %d episode %d/%d eps=%.3f recent mean reward %.3f",
                seed, episode + 1, config.episodes, eps, recent,
            )
    return TrainResult(agent=config.agent, seed=seed, curve=_curve_from(rows, config.env), dqn=dqn)


def _train_qlearn(config: ExperimentConfig, seed: int) -> TrainResult:
    n_actions = n_actions_for(config.env)
    agent_rng = np.random.default_rng(np.random.SeedSequence((seed, 0)))
    table = QTable(n_actions)
    rows: list = []

    for episode in range(config.episodes):
        eps = _epsilon(config, episode)
        ep_rng = np.random.default_rng(np.random.SeedSequence((seed, 1, episode)))
        state = _training_episode(config, ep_rng)
        key = discretize_state(state)
        while not state.done:
            mask = legal_mask(config, state)
            if agent_rng.random() < eps:
                legal = np.flatnonzero(mask)
                action = int(legal[agent_rng.integers(len(legal))])
            else:
                action = table_greedy_action(table, key, mask)
            state, reward = env_step(config, state, action)
            next_key = discretize_state(state)
            next_mask = legal_mask(config, state)
            alpha = 1.0 / table.visit(key, action)
            qlearning_update(
                table, key, action, reward, next_key, next_mask, state.done, alpha, config.gamma
            )
            key = next_key
        _record(rows, state)
    return TrainResult(agent=config.agent, seed=seed, curve=_curve_from(rows, config.env), table=table)
