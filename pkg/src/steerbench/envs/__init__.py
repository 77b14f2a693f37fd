"""Steering environments: shared rewards, well-path stepping, and the two
sequential decision problems."""

from .rewards import reward_r1, reward_r2, signed_margin
from .trajectory import arc_tvd_increment, min_curvature_segment
from .env1 import (
    ACTIONS_ENV1,
    N_SUB,
    OBS_DIM_ENV1,
    Env1State,
    env1_reset,
    step_env1,
    stage_reward_env1,
    legal_actions_env1,
    observe_env1,
)
from .env2 import (
    ACTIONS_ENV2,
    SIDETRACK,
    OBS_DIM_ENV2,
    CostParams,
    Env2State,
    env2_reset,
    step_env2,
    stage_reward_env2,
    legal_actions_env2,
    observe_env2,
    next_fault_ahead,
)
from .metrics import EpisodeResult, episode_metrics, trajectory_rows

__all__ = [
    "reward_r1",
    "reward_r2",
    "signed_margin",
    "arc_tvd_increment",
    "min_curvature_segment",
    "ACTIONS_ENV1",
    "N_SUB",
    "OBS_DIM_ENV1",
    "Env1State",
    "env1_reset",
    "step_env1",
    "stage_reward_env1",
    "legal_actions_env1",
    "observe_env1",
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
    "EpisodeResult",
    "episode_metrics",
    "trajectory_rows",
]
