"""Faulted-reservoir steering environment.

The bit starts on the reservoir mid-line at node 0 and makes one decision
per node: nudge TVD by one of {-0.5, -0.25, 0, +0.25, +0.5} m, or (only
when the bit sits outside the reservoir) sidetrack. A sidetrack abandons
the exited hole section at the current node, re-enters on the local
mid-line there, and drills level to the next node; the abandoned depth no
longer counts toward contact. Production value v is earned at each node the
bit lands inside; every step pays the drilling cost and a sidetrack pays
its surcharge on top.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from ..geomodel import FaultedTrendParams, GeoRealization2

__all__ = [
    "ACTIONS_ENV2",
    "SIDETRACK",
    "OBS_DIM_ENV2",
    "CostParams",
    "Env2State",
    "env2_reset",
    "step_env2",
    "stage_reward_env2",
    "legal_actions_env2",
    "observe_env2",
    "next_fault_ahead",
]

ACTIONS_ENV2 = (-0.5, -0.25, 0.0, 0.25, 0.5)
SIDETRACK = len(ACTIONS_ENV2)
OBS_DIM_ENV2 = 10


@dataclass(frozen=True)
class CostParams:
    drill: float = 0.0625
    sidetrack: float = 2.567


@dataclass
class Env2State:
    params: FaultedTrendParams
    real: GeoRealization2
    costs: CostParams
    v_prod: float
    stage: int
    tvd: float
    tvds: np.ndarray
    n_sidetracks: int
    cost: float
    value: float
    total_reward: float
    stage_rewards: tuple[float, ...]

    @property
    def n_stages(self) -> int:
        return self.params.n_points - 1

    @property
    def done(self) -> bool:
        return self.stage >= self.n_stages


def env2_reset(
    params: FaultedTrendParams,
    real: GeoRealization2,
    costs: CostParams,
    v_prod: float,
) -> Env2State:
    tvd0 = float(real.mid[0])
    return Env2State(
        params=params,
        real=real,
        costs=costs,
        v_prod=v_prod,
        stage=0,
        tvd=tvd0,
        tvds=np.array([tvd0]),
        n_sidetracks=0,
        cost=0.0,
        value=0.0,
        total_reward=0.0,
        stage_rewards=(),
    )


def stage_reward_env2(value: float, cost: float) -> float:
    """Per-stage net: production value earned minus cost incurred."""
    return value - cost


def legal_actions_env2(state: Env2State) -> np.ndarray:
    mask = np.ones(SIDETRACK + 1, dtype=bool)
    mask[SIDETRACK] = not state.real.inside(state.stage, state.tvd)
    return mask


def step_env2(state: Env2State, action: int) -> tuple[Env2State, float]:
    """Apply one decision; returns the new state and the stage reward."""
    if state.done:
        raise ValueError("episode is over")
    j = state.stage
    if action == SIDETRACK:
        if state.real.inside(j, state.tvd):
            raise ValueError("sidetrack is only legal when the bit is outside the reservoir")
        re_entry = float(state.real.mid[j])
        tvds = state.tvds.copy()
        tvds[j] = re_entry
        next_tvd = re_entry
        cost = state.costs.drill + state.costs.sidetrack
        sidetracks = state.n_sidetracks + 1
    else:
        tvds = state.tvds
        next_tvd = state.tvd + ACTIONS_ENV2[action]
        cost = state.costs.drill
        sidetracks = state.n_sidetracks
    value = state.v_prod if state.real.inside(j + 1, next_tvd) else 0.0
    reward = stage_reward_env2(value, cost)
    new_state = replace(
        state,
        stage=j + 1,
        tvd=next_tvd,
        tvds=np.concatenate([tvds, [next_tvd]]),
        n_sidetracks=sidetracks,
        cost=state.cost + cost,
        value=state.value + value,
        total_reward=state.total_reward + reward,
        stage_rewards=state.stage_rewards + (reward,),
    )
    return new_state, reward


def next_fault_ahead(params: FaultedTrendParams, x: float):
    """First fault whose candidate zone is not fully behind lateral position x."""
    for fault in params.faults:
        if fault.zone_end > x:
            return fault
    return None


def observe_env2(state: Env2State) -> np.ndarray:
    """10-value observation vector.

    Boundary distances at the current and previous node (normalized by
    thickness), the next fault's candidate zone and mean throw (sentinel
    1, 1, 0 when no fault remains ahead), an outside-the-reservoir flag,
    lateral progress, and the episode's production value.
    """
    p = state.params
    real = state.real
    h = p.thickness
    total_length = p.spacing * (p.n_points - 1)
    j = state.stage
    dtub = (state.tvd - real.upper[j]) / h
    dtlb = (real.lower[j] - state.tvd) / h
    if j > 0:
        z_prev = state.tvds[j - 1]
        dtub_prev = (z_prev - real.upper[j - 1]) / h
        dtlb_prev = (real.lower[j - 1] - z_prev) / h
    else:
        dtub_prev = 0.0
        dtlb_prev = 0.0
    fault = next_fault_ahead(p, p.spacing * j)
    if fault is not None:
        fault_cue = (fault.zone_start / total_length, fault.zone_end / total_length, fault.disp_mean / h)
    else:
        fault_cue = (1.0, 1.0, 0.0)
    return np.array(
        [
            dtub,
            dtlb,
            dtub_prev,
            dtlb_prev,
            *fault_cue,
            0.0 if real.inside(j, state.tvd) else 1.0,
            j / state.n_stages,
            state.v_prod / 4.0,
        ]
    )
