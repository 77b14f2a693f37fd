"""Episode summary metrics shared by both environments."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .env1 import Env1State
from .env2 import Env2State
from .rewards import reward_r1, reward_r2, signed_margin

__all__ = ["EpisodeResult", "episode_metrics", "trajectory_rows"]


@dataclass
class EpisodeResult:
    """Summary of one finished episode.

    ``hq_pct`` is only set for the layered environment; sidetrack count,
    cost, and value only for the faulted one.
    """

    env: str
    total_reward: float
    stage_rewards: tuple[float, ...]
    contact_pct: float
    hq_pct: float | None = None
    n_sidetracks: int | None = None
    cost: float | None = None
    value: float | None = None


def episode_metrics(state) -> EpisodeResult:
    if not state.done:
        raise ValueError("metrics are defined for finished episodes")
    if isinstance(state, Env1State):
        return _metrics_env1(state)
    if isinstance(state, Env2State):
        return _metrics_env2(state)
    raise TypeError(f"unsupported state type: {type(state).__name__}")


def _metrics_env1(state: Env1State) -> EpisodeResult:
    real = state.real
    # The landing node after the last stage is never scored, so it does not
    # count toward contact either.
    tvds = state.tvds[: state.params.n_points]
    idx = np.arange(len(tvds))
    top = real.top[idx]
    bottom = top + real.thickness[idx]
    inside = (tvds >= top) & (tvds <= bottom)
    in_hq = inside & (tvds <= real.hq_bottom[idx])
    return EpisodeResult(
        env="env1",
        total_reward=state.total_reward,
        stage_rewards=state.stage_rewards,
        contact_pct=100.0 * float(inside.mean()),
        hq_pct=100.0 * float(in_hq.mean()),
    )


def _metrics_env2(state: Env2State) -> EpisodeResult:
    real = state.real
    tvds = state.tvds
    upper = real.upper
    inside = (tvds >= upper) & (tvds <= upper + real.thickness)
    return EpisodeResult(
        env="env2",
        total_reward=state.total_reward,
        stage_rewards=state.stage_rewards,
        contact_pct=100.0 * float(inside.mean()),
        n_sidetracks=state.n_sidetracks,
        cost=state.cost,
        value=state.value,
    )


def trajectory_rows(state) -> list[tuple]:
    """Per-node dump of an episode for plotting and replay.

    Each row is (index, x, tvd, top, bottom, hq, inside, cum_reward). The hq
    column is None in the faulted environment. Rows cover the nodes scored so
    far, which for a finished episode matches the contact accounting; the
    faulted start node carries zero cumulative reward since value accrues on
    arrival at the next node.
    """
    if isinstance(state, Env1State):
        real = state.real
        rows = []
        cum = 0.0
        for i in range(state.point):
            z = float(state.tvds[i])
            top = float(real.top[i])
            bottom = top + float(real.thickness[i])
            cum += state.w1 * float(reward_r1(signed_margin(z, top, bottom)))
            cum += state.w2 * float(reward_r2(real.permeability(i, z)))
            rows.append(
                (i, i * state.params.dx, z, top, bottom, float(real.hq_bottom[i]),
                 top <= z <= bottom, cum)
            )
        return rows
    if isinstance(state, Env2State):
        real = state.real
        rows = []
        cum = 0.0
        for k in range(state.stage + 1):
            z = float(state.tvds[k])
            top = float(real.upper[k])
            bottom = top + real.thickness
            if k > 0:
                cum += state.stage_rewards[k - 1]
            rows.append(
                (k, k * real.spacing, z, top, bottom, None, top <= z <= bottom, cum)
            )
        return rows
    raise TypeError(f"unsupported state type: {type(state).__name__}")
