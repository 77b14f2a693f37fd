"""Layered-reservoir steering environment.

The bit starts on the reservoir mid-line at the first grid node, drilling
horizontally. Each of the 10 stages picks an inclination change from
-5 to +5 degrees (11 actions); the stage drills 10 grid nodes under a
minimum-curvature path and collects the weighted sum of the two point
rewards over the nodes entered at the old position through the node just
before the landing node. The landing node is scored by the next stage, so
every evaluated node is scored exactly once. Episodes never terminate
early; leaving the reservoir just earns negative placement rewards.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from ..geomodel import ForwardFnParams1, GeoRealization1
from .rewards import reward_r1, reward_r2, signed_margin
from .trajectory import min_curvature_segment

__all__ = [
    "ACTIONS_ENV1",
    "N_SUB",
    "OBS_DIM_ENV1",
    "Env1State",
    "env1_reset",
    "step_env1",
    "stage_reward_env1",
    "legal_actions_env1",
    "observe_env1",
]

ACTIONS_ENV1 = np.arange(-5.0, 6.0)
N_SUB = 10
_LOOKAHEAD = 10
OBS_DIM_ENV1 = 4 * (_LOOKAHEAD + 1) + 5


@dataclass
class Env1State:
    params: ForwardFnParams1
    real: GeoRealization1
    w1: float
    w2: float
    stage: int
    point: int
    tvd: float
    inclination_deg: float
    tvds: np.ndarray
    total_reward: float
    stage_rewards: tuple[float, ...]

    @property
    def n_stages(self) -> int:
        return self.params.n_points // N_SUB

    @property
    def done(self) -> bool:
        return self.stage >= self.n_stages


def env1_reset(params: ForwardFnParams1, real: GeoRealization1, w1: float, w2: float) -> Env1State:
    """Start an episode at the true mid-line of node 0, drilling horizontally."""
    tvd0 = float(real.top[0] + 0.5 * real.thickness[0])
    return Env1State(
        params=params,
        real=real,
        w1=w1,
        w2=w2,
        stage=0,
        point=0,
        tvd=tvd0,
        inclination_deg=0.0,
        tvds=np.array([tvd0]),
        total_reward=0.0,
        stage_rewards=(),
    )


def stage_reward_env1(
    real: GeoRealization1, w1: float, w2: float, start_idx: int, tvds: np.ndarray
) -> float:
    """w1 * sum(r1) + w2 * sum(r2) over consecutive nodes starting at start_idx."""
    idx = np.arange(start_idx, start_idx + len(tvds))
    top = real.top[idx]
    bottom = top + real.thickness[idx]
    r1 = reward_r1(signed_margin(tvds, top, bottom))
    inside = (tvds >= top) & (tvds <= bottom)
    in_hq = inside & (tvds <= real.hq_bottom[idx])
    perm = np.where(in_hq, real.perm_high, np.where(inside, real.perm_low, 0.0))
    r2 = reward_r2(perm)
    return float(w1 * r1.sum() + w2 * r2.sum())


def legal_actions_env1(state: Env1State) -> np.ndarray:
    return np.ones(len(ACTIONS_ENV1), dtype=bool)


def step_env1(state: Env1State, action: int) -> tuple[Env1State, float]:
    """Apply one steering decision; returns the new state and the stage reward."""
    if state.done:
        raise ValueError("episode is over")
    delta = float(ACTIONS_ENV1[action])
    sub_tvds, new_inc = min_curvature_segment(
        state.tvd, state.inclination_deg, delta, state.params.dx, N_SUB
    )
    evaluated = np.concatenate([[state.tvd], sub_tvds[:-1]])
    reward = stage_reward_env1(state.real, state.w1, state.w2, state.point, evaluated)
    new_state = replace(
        state,
        stage=state.stage + 1,
        point=state.point + N_SUB,
        tvd=float(sub_tvds[-1]),
        inclination_deg=new_inc,
        tvds=np.concatenate([state.tvds, sub_tvds]),
        total_reward=state.total_reward + reward,
        stage_rewards=state.stage_rewards + (reward,),
    )
    return new_state, reward


def _obs_rows_posterior(state: Env1State) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    # Posterior means ahead equal the at-bit measurement under the anchored
    # random-walk belief, so every look-ahead column repeats the current one.
    i = state.point
    top = float(state.real.top[i])
    h = float(state.real.thickness[i])
    dtub = np.full(_LOOKAHEAD + 1, (state.tvd - top) / h)
    dtlb = np.full(_LOOKAHEAD + 1, (top + h - state.tvd) / h)
    dthq = np.full(_LOOKAHEAD + 1, (top + state.real.hq_fraction * h - state.tvd) / h)
    hs = np.full(_LOOKAHEAD + 1, h / state.params.thickness_mean)
    return dtub, dtlb, dthq, hs


def _obs_rows_sensor(state: Env1State) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    # What the at-bit sensor logged over the trailing 10 nodes plus now;
    # nodes before the heel are zero-padded.
    n = _LOOKAHEAD + 1
    dtub = np.zeros(n)
    dtlb = np.zeros(n)
    dthq = np.zeros(n)
    hs = np.zeros(n)
    for k in range(n):
        p = state.point - _LOOKAHEAD + k
        if p < 0:
            continue
        top = float(state.real.top[p])
        h = float(state.real.thickness[p])
        z = float(state.tvds[p])
        dtub[k] = (z - top) / h
        dtlb[k] = (top + h - z) / h
        dthq[k] = (top + state.real.hq_fraction * h - z) / h
        hs[k] = h / state.params.thickness_mean
    return dtub, dtlb, dthq, hs


def observe_env1(state: Env1State, mode: str) -> np.ndarray:
    """49-value observation vector.

    ``mode`` selects the boundary block: "posterior" uses the belief means
    over the current node and the 10 ahead; "sensor" uses the logged
    measurements over the 10 behind and the current one. Both end with
    inclination, lateral progress, at-bit permeability, and the two reward
    weights.
    """
    if mode == "posterior":
        rows = _obs_rows_posterior(state)
    elif mode == "sensor":
        rows = _obs_rows_sensor(state)
    else:
        raise ValueError(f"unknown observation mode: {mode!r}")
    y = state.real.permeability(state.point, state.tvd)
    extras = np.array(
        [
            state.inclination_deg / 90.0,
            state.point / state.params.n_points,
            y / state.real.perm_high,
            state.w1,
            state.w2,
        ]
    )
    return np.concatenate([*rows, extras])
