"""Myopic agent: maximize the belief-expected immediate stage reward.

In the layered environment the expectation is Monte Carlo over boundary
paths sampled from the current belief (shared draws across actions). In the
faulted environment it is exact, by enumerating the fault hypotheses.
Value ties go to the gentlest steering move (smallest action magnitude,
then lowest index); a sidetrack only wins a tie if nothing else matches it.
"""

from __future__ import annotations

import numpy as np

from ..bayes import (
    belief_from_state,
    expected_stage_rewards_env1,
    expected_step_rewards_env2,
    fault_belief_from_state,
)
from ..envs.env1 import ACTIONS_ENV1, Env1State
from ..envs.env2 import ACTIONS_ENV2, SIDETRACK, Env2State

__all__ = ["greedy_select"]


def _argmax_gentlest(values: np.ndarray, magnitudes: list[float]) -> int:
    best = None
    best_key = None
    for a, v in enumerate(values):
        key = (-v, magnitudes[a], a)
        if best is None or key < best_key:
            best = a
            best_key = key
    return best


def greedy_select(state, rng: np.random.Generator | None = None, mc: int = 100) -> int:
    """Pick the action with the highest expected immediate reward."""
    if isinstance(state, Env1State):
        if rng is None:
            raise ValueError("the layered environment needs an rng for belief sampling")
        belief = belief_from_state(state)
        values = expected_stage_rewards_env1(state, belief, mc, rng)
        return _argmax_gentlest(values, [abs(float(d)) for d in ACTIONS_ENV1])
    if isinstance(state, Env2State):
        belief = fault_belief_from_state(state)
        values = expected_step_rewards_env2(state, belief)
        # Rank the sidetrack behind every steering move on exact ties.
        magnitudes = [abs(d) for d in ACTIONS_ENV2] + [float("inf")]
        assert len(magnitudes) == SIDETRACK + 1
        return _argmax_gentlest(values, magnitudes)
    raise TypeError(f"unsupported state type: {type(state).__name__}")
