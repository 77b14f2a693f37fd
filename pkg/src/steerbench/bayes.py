"""Sequential belief updating for both environments.

Layered reservoir: the top boundary and thickness are believed to follow
Gaussian random walks. The at-bit sensor is exact, so conditioning collapses
the belief at the bit to the measurement; k nodes ahead the posterior mean
stays at the measured value and the variance grows linearly, k * step_sd^2.

Faulted reservoir: each fault has a uniform prior over a few candidate
locations and a Gaussian throw. Passing a candidate without seeing an offset
rules that candidate out (the survivors stay equally likely); seeing an
offset resolves the fault entirely. The small hypothesis space makes every
update and expectation exact, no sampling needed.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, replace

import numpy as np

from .envs.env2 import ACTIONS_ENV2, SIDETRACK, Env2State
from .envs.env1 import ACTIONS_ENV1, N_SUB, Env1State
from .envs.rewards import reward_r1, reward_r2
from .envs.trajectory import min_curvature_segment
from .geomodel import FaultedTrendParams, FaultSpec

__all__ = [
    "BoundaryBelief",
    "condition_on_measurement",
    "belief_from_state",
    "sample_boundary_paths",
    "expected_stage_reward",
    "expected_stage_rewards_env1",
    "FaultBelief",
    "init_fault_belief",
    "update_fault_belief",
    "fault_belief_from_state",
    "step_crossing_mixture",
    "expected_step_rewards_env2",
]


# ---------------------------------------------------------------------------
# layered reservoir


@dataclass(frozen=True)
class BoundaryBelief:
    """Random-walk belief over the top boundary and thickness, anchored at the
    last measured node."""

    anchor_index: int
    top_at_anchor: float
    thickness_at_anchor: float
    top_step_sd: float
    thickness_step_sd: float
    thickness_min: float

    def top_sd(self, k: int) -> float:
        """Posterior sd of the top boundary k nodes ahead of the anchor."""
        return math.sqrt(k) * self.top_step_sd

    def thickness_sd(self, k: int) -> float:
        return math.sqrt(k) * self.thickness_step_sd


def condition_on_measurement(
    belief: BoundaryBelief, point_index: int, measured_top: float, measured_thickness: float
) -> BoundaryBelief:
    """Exact measurement at a node: posterior collapses there, walk resumes ahead."""
    return replace(
        belief,
        anchor_index=point_index,
        top_at_anchor=measured_top,
        thickness_at_anchor=measured_thickness,
    )


def belief_from_state(state: Env1State) -> BoundaryBelief:
    """Belief conditioned on the at-bit measurement in the given state."""
    i = state.point
    return BoundaryBelief(
        anchor_index=i,
        top_at_anchor=float(state.real.top[i]),
        thickness_at_anchor=float(state.real.thickness[i]),
        top_step_sd=state.params.boundary_step_sd,
        thickness_step_sd=state.params.thickness_step_sd,
        thickness_min=state.params.thickness_min,
    )


def sample_boundary_paths(
    belief: BoundaryBelief, n_ahead: int, n_draws: int, rng: np.random.Generator
) -> tuple[np.ndarray, np.ndarray]:
    """Sample joint boundary paths over the anchor node and ``n_ahead`` nodes.

    Returns (tops, thicknesses), each of shape (n_draws, n_ahead + 1); column
    0 is the exact anchor value. Thickness draws are floored like the prior.
    """
    top_steps = rng.normal(0.0, belief.top_step_sd, size=(n_draws, n_ahead))
    thick_steps = rng.normal(0.0, belief.thickness_step_sd, size=(n_draws, n_ahead))
    tops = belief.top_at_anchor + np.concatenate(
        [np.zeros((n_draws, 1)), np.cumsum(top_steps, axis=1)], axis=1
    )
    thicknesses = belief.thickness_at_anchor + np.concatenate(
        [np.zeros((n_draws, 1)), np.cumsum(thick_steps, axis=1)], axis=1
    )
    thicknesses = np.maximum(thicknesses, belief.thickness_min)
    return tops, thicknesses


def _stage_rewards_on_paths(
    state: Env1State, tops: np.ndarray, thicknesses: np.ndarray, action: int
) -> float:
    sub_tvds, _ = min_curvature_segment(
        state.tvd, state.inclination_deg, float(ACTIONS_ENV1[action]), state.params.dx, N_SUB
    )
    tvds = np.concatenate([[state.tvd], sub_tvds[:-1]])
    bottoms = tops + thicknesses
    x = np.minimum(tvds - tops, bottoms - tvds) / thicknesses
    r1 = reward_r1(x)
    inside = (tvds >= tops) & (tvds <= bottoms)
    in_hq = inside & (tvds <= tops + state.real.hq_fraction * thicknesses)
    perm = np.where(in_hq, state.real.perm_high, np.where(inside, state.real.perm_low, 0.0))
    r2 = reward_r2(perm)
    per_draw = state.w1 * r1.sum(axis=1) + state.w2 * r2.sum(axis=1)
    return float(per_draw.mean())


def expected_stage_rewards_env1(
    state: Env1State, belief: BoundaryBelief, mc: int, rng: np.random.Generator
) -> np.ndarray:
    """Posterior-expected stage reward for every action, using one shared set
    of boundary draws (common random numbers keep the argmax fair)."""
    tops, thicknesses = sample_boundary_paths(belief, N_SUB - 1, mc, rng)
    return np.array(
        [_stage_rewards_on_paths(state, tops, thicknesses, a) for a in range(len(ACTIONS_ENV1))]
    )


def expected_stage_reward(
    state: Env1State, belief: BoundaryBelief, action: int, mc: int, rng: np.random.Generator
) -> float:
    """Posterior-expected stage reward of one action."""
    tops, thicknesses = sample_boundary_paths(belief, N_SUB - 1, mc, rng)
    return _stage_rewards_on_paths(state, tops, thicknesses, action)


# ---------------------------------------------------------------------------
# faulted reservoir


@dataclass(frozen=True)
class FaultBelief:
    """Per-fault candidate sets still in play. A resolved fault (offset seen,
    or every candidate ruled out) has an empty remaining set."""

    faults: tuple[FaultSpec, ...]
    remaining: tuple[tuple[float, ...], ...]


def init_fault_belief(params: FaultedTrendParams) -> FaultBelief:
    return FaultBelief(
        faults=params.faults,
        remaining=tuple(tuple(f.candidates) for f in params.faults),
    )


def update_fault_belief(
    belief: FaultBelief, x_new: float, observed_offset: float, tol: float = 1e-9
) -> FaultBelief:
    """Condition on the measurement at lateral position ``x_new``.

    No offset there rules out every candidate at or before ``x_new``; an
    offset resolves the (unique, zones being disjoint) fault that could have
    caused it.
    """
    if abs(observed_offset) <= tol:
        remaining = tuple(
            tuple(c for c in cands if c > x_new) for cands in belief.remaining
        )
        return replace(belief, remaining=remaining)
    remaining = list(belief.remaining)
    for k, cands in enumerate(remaining):
        if x_new in cands:
            remaining[k] = ()
            break
    return replace(belief, remaining=tuple(remaining))


def fault_belief_from_state(state: Env2State) -> FaultBelief:
    """Replay the measured upper-boundary offsets along the drilled lateral."""
    belief = init_fault_belief(state.params)
    upper = state.real.upper
    base = state.real.base_upper
    for j in range(1, state.stage + 1):
        offset = (upper[j] - upper[j - 1]) - (base[j] - base[j - 1])
        belief = update_fault_belief(belief, float(state.real.xs[j]), float(offset))
    return belief


def step_crossing_mixture(
    belief: FaultBelief, x_curr: float, x_next: float
) -> list[tuple[float, float, float]]:
    """(probability, throw mean, throw sd) per fault that might be crossed
    while drilling from ``x_curr`` to ``x_next``."""
    out = []
    for fault, cands in zip(belief.faults, belief.remaining):
        if not cands:
            continue
        hits = sum(1 for c in cands if x_curr < c <= x_next)
        if hits:
            out.append((hits / len(cands), fault.disp_mean, fault.disp_sd))
    return out


def _normal_interval_prob(lo: float, hi: float, mean: float, sd: float) -> float:
    if sd == 0.0:
        return 1.0 if lo <= mean <= hi else 0.0
    a = (lo - mean) / (sd * math.sqrt(2.0))
    b = (hi - mean) / (sd * math.sqrt(2.0))
    return 0.5 * (math.erf(b) - math.erf(a))


def _prob_inside(offset_from_mid: float, mixture, half_thickness: float) -> float:
    """P(|offset_from_mid - sum of crossed throws| <= half_thickness)."""
    total = 0.0
    for combo in itertools.product((0, 1), repeat=len(mixture)):
        weight = 1.0
        mean = 0.0
        var = 0.0
        for bit, (p, m, s) in zip(combo, mixture):
            weight *= p if bit else 1.0 - p
            if bit:
                mean += m
                var += s * s
        if weight == 0.0:
            continue
        total += weight * _normal_interval_prob(
            offset_from_mid - half_thickness,
            offset_from_mid + half_thickness,
            mean,
            math.sqrt(var),
        )
    return total


def expected_step_rewards_env2(state: Env2State, belief: FaultBelief) -> np.ndarray:
    """Exact belief-expected immediate reward for each action.

    Illegal actions get -inf. The sidetrack entry accounts for re-entry on
    the measured mid-line before the level run to the next node.
    """
    p = state.params
    j = state.stage
    x_curr = p.spacing * j
    x_next = p.spacing * (j + 1)
    half = 0.5 * p.thickness
    mid_now = float(state.real.mid[j])
    trend_step = float(state.real.base_upper[j + 1] - state.real.base_upper[j])
    mixture = step_crossing_mixture(belief, x_curr, x_next)
    rewards = np.empty(SIDETRACK + 1)
    rho = state.tvd - mid_now
    for a, delta in enumerate(ACTIONS_ENV2):
        p_in = _prob_inside(rho + delta - trend_step, mixture, half)
        rewards[a] = state.v_prod * p_in - state.costs.drill
    if state.real.inside(j, state.tvd):
        rewards[SIDETRACK] = -np.inf
    else:
        p_in = _prob_inside(-trend_step, mixture, half)
        rewards[SIDETRACK] = state.v_prod * p_in - state.costs.drill - state.costs.sidetrack
    return rewards
