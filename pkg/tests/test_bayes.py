"""Belief tracking: anchored random walks and fault hypothesis elimination."""

from __future__ import annotations

import dataclasses
import math

import numpy as np
import pytest

from steerbench.bayes import (
    BoundaryBelief,
    FaultBelief,
    belief_from_state,
    condition_on_measurement,
    expected_stage_reward,
    expected_stage_rewards_env1,
    fault_belief_from_state,
    init_fault_belief,
    sample_boundary_paths,
    step_crossing_mixture,
    update_fault_belief,
    expected_step_rewards_env2,
)
from steerbench.envs import (
    ACTIONS_ENV1,
    CostParams,
    env1_reset,
    env2_reset,
    step_env1,
    step_env2,
)
from steerbench.geomodel import (
    FaultSpec,
    FaultedTrendParams,
    default_faulted_params,
    default_layered_params,
    sample_realization_env1,
    sample_realization_env2,
)


def _belief(top_sd=1.0, thick_sd=0.3):
    return BoundaryBelief(
        anchor_index=0,
        top_at_anchor=1000.0,
        thickness_at_anchor=25.0,
        top_step_sd=top_sd,
        thickness_step_sd=thick_sd,
        thickness_min=10.0,
    )


# ------------------------------------------------------------ random walk ---

def test_posterior_sd_grows_with_square_root_of_distance():
    belief = _belief(top_sd=1.0)
    assert belief.top_sd(0) == 0.0
    assert belief.top_sd(1) == 1.0
    assert belief.top_sd(4) == 2.0
    assert belief.top_sd(9) == pytest.approx(3.0)
    assert belief.thickness_sd(4) == pytest.approx(0.6)


def test_conditioning_moves_the_anchor():
    belief = _belief()
    updated = condition_on_measurement(belief, 7, 1003.5, 24.0)
    assert updated.anchor_index == 7
    assert updated.top_at_anchor == 1003.5
    assert updated.thickness_at_anchor == 24.0
    assert updated.top_step_sd == belief.top_step_sd


def test_belief_from_state_reads_at_bit_values():
    params = default_layered_params()
    real = sample_realization_env1(params, np.random.default_rng(1))
    state = env1_reset(params, real, 0.67, 0.33)
    state, _ = step_env1(state, 5)
    belief = belief_from_state(state)
    assert belief.anchor_index == 10
    assert belief.top_at_anchor == real.top[10]
    assert belief.thickness_at_anchor == real.thickness[10]


def test_sampled_paths_anchor_exactly():
    belief = _belief()
    tops, thicks = sample_boundary_paths(belief, 9, 64, np.random.default_rng(0))
    assert tops.shape == (64, 10)
    np.testing.assert_array_equal(tops[:, 0], belief.top_at_anchor)
    np.testing.assert_array_equal(thicks[:, 0], belief.thickness_at_anchor)


def test_sampled_path_spread_matches_the_walk():
    belief = _belief(top_sd=1.0)
    tops, _ = sample_boundary_paths(belief, 9, 40_000, np.random.default_rng(3))
    for k in (1, 4, 9):
        assert np.std(tops[:, k] - belief.top_at_anchor) == pytest.approx(
            belief.top_sd(k), rel=0.03
        )


def test_zero_variance_paths_are_flat():
    belief = _belief(top_sd=0.0, thick_sd=0.0)
    tops, thicks = sample_boundary_paths(belief, 9, 8, np.random.default_rng(0))
    np.testing.assert_array_equal(tops, belief.top_at_anchor)
    np.testing.assert_array_equal(thicks, belief.thickness_at_anchor)


def test_thickness_draws_respect_floor():
    belief = dataclasses.replace(_belief(thick_sd=8.0), thickness_at_anchor=11.0)
    _, thicks = sample_boundary_paths(belief, 9, 2000, np.random.default_rng(0))
    assert thicks.min() >= belief.thickness_min


def test_expected_reward_zero_variance_equals_true_stage_reward():
    """With a collapsed belief the expectation must equal the realized reward."""
    params = dataclasses.replace(
        default_layered_params(), boundary_step_sd=0.0, thickness_step_sd=0.0
    )
    real = sample_realization_env1(params, np.random.default_rng(0))
    state = env1_reset(params, real, 0.67, 0.33)
    belief = belief_from_state(state)
    rng = np.random.default_rng(0)
    for action in (0, 5, 10):
        expect = expected_stage_reward(state, belief, action, 16, rng)
        _, realized = step_env1(state, action)
        assert expect == pytest.approx(realized, abs=1e-9)


def test_vector_and_scalar_expectations_agree_under_shared_draws():
    params = default_layered_params()
    real = sample_realization_env1(params, np.random.default_rng(5))
    state = env1_reset(params, real, 0.67, 0.33)
    belief = belief_from_state(state)
    vec = expected_stage_rewards_env1(state, belief, 256, np.random.default_rng(42))
    for action in range(len(ACTIONS_ENV1)):
        scalar = expected_stage_reward(state, belief, action, 256, np.random.default_rng(42))
        assert vec[action] == pytest.approx(scalar, abs=1e-12)


# -------------------------------------------------------- fault hypotheses ---

def _two_faults():
    return (
        FaultSpec(candidates=(120.0, 150.0, 180.0), disp_mean=3.0, disp_sd=1.0),
        FaultSpec(candidates=(360.0, 390.0), disp_mean=2.0, disp_sd=1.0),
    )


def test_initial_belief_keeps_all_candidates():
    params = FaultedTrendParams(faults=_two_faults())
    belief = init_fault_belief(params)
    assert belief.remaining == ((120.0, 150.0, 180.0), (360.0, 390.0))


def test_no_offset_eliminates_passed_candidates():
    params = FaultedTrendParams(faults=_two_faults())
    belief = init_fault_belief(params)
    belief = update_fault_belief(belief, 120.0, 0.0)
    assert belief.remaining[0] == (150.0, 180.0)
    assert belief.remaining[1] == (360.0, 390.0)
    belief = update_fault_belief(belief, 150.0, 0.0)
    assert belief.remaining[0] == (180.0,)


def test_observed_offset_resolves_the_fault():
    params = FaultedTrendParams(faults=_two_faults())
    belief = init_fault_belief(params)
    belief = update_fault_belief(belief, 150.0, 2.7)
    assert belief.remaining[0] == ()
    assert belief.remaining[1] == (360.0, 390.0)


def test_crossing_probability_is_remaining_fraction():
    params = FaultedTrendParams(faults=_two_faults())
    belief = init_fault_belief(params)
    mix = step_crossing_mixture(belief, 90.0, 120.0)
    assert len(mix) == 1
    p, mean, sd = mix[0]
    assert p == pytest.approx(1.0 / 3.0)
    assert (mean, sd) == (3.0, 1.0)
    # After one elimination the survivor probability renormalizes to 1/2.
    belief = update_fault_belief(belief, 120.0, 0.0)
    mix = step_crossing_mixture(belief, 120.0, 150.0)
    assert mix[0][0] == pytest.approx(0.5)


def test_no_crossing_when_zone_is_behind():
    params = FaultedTrendParams(faults=_two_faults())
    belief = init_fault_belief(params)
    assert step_crossing_mixture(belief, 200.0, 230.0) == []


def test_belief_replay_matches_incremental_updates():
    params = default_faulted_params()
    real = sample_realization_env2(params, np.random.default_rng(8))
    state = env2_reset(params, real, CostParams(), 2.0)
    rng = np.random.default_rng(0)
    while not state.done:
        state, _ = step_env2(state, int(rng.integers(0, 5)))
    replayed = fault_belief_from_state(state)
    # Every fault location actually crossed must be resolved by now, and the
    # ruled-out candidates are exactly those at or before the bit with no
    # offset seen.
    x_bit = state.real.xs[state.stage]
    for fault, cands, loc in zip(
        replayed.faults, replayed.remaining, state.real.fault_locations
    ):
        if loc <= x_bit:
            assert cands == ()
        else:
            assert all(c > x_bit for c in cands)


def test_expected_step_rewards_fault_free_inside():
    params = FaultedTrendParams(faults=())
    real = sample_realization_env2(params, np.random.default_rng(0))
    state = env2_reset(params, real, CostParams(), 2.0)
    rewards = expected_step_rewards_env2(state, init_fault_belief(params))
    # Trend dips 0.5 m per step; from the mid-line every steering action
    # lands inside (half-thickness 2.5 m), so each earns v - drill cost.
    np.testing.assert_allclose(rewards[:5], 2.0 - 0.0625)
    assert rewards[5] == -np.inf  # sidetrack illegal inside


def test_expected_step_rewards_match_monte_carlo():
    """Exact mixture expectation vs brute-force sampling of fault scenarios."""
    faults = (FaultSpec(candidates=(30.0, 60.0, 90.0), disp_mean=2.0, disp_sd=1.0),)
    params = FaultedTrendParams(faults=faults)
    real = sample_realization_env2(params, np.random.default_rng(1))
    state = env2_reset(params, real, CostParams(), 2.0)
    belief = init_fault_belief(params)
    exact = expected_step_rewards_env2(state, belief)

    rng = np.random.default_rng(7)
    n = 200_000
    trend_step = params.dip_per_step
    half = 0.5 * params.thickness
    crossed = rng.random(n) < 1.0 / 3.0  # one candidate inside the first step
    throws = rng.normal(2.0, 1.0, size=n)
    offsets = np.where(crossed, throws, 0.0)
    for a, delta in enumerate((-0.5, -0.25, 0.0, 0.25, 0.5)):
        inside = np.abs(delta - trend_step - offsets) <= half
        mc = 2.0 * inside.mean() - 0.0625
        assert exact[a] == pytest.approx(mc, abs=0.01)


def test_sidetrack_expected_reward_when_outside():
    params = FaultedTrendParams(faults=())
    real = sample_realization_env2(params, np.random.default_rng(0))
    state = env2_reset(params, real, CostParams(), 4.0)
    while real.inside(state.stage, state.tvd):
        state, _ = step_env2(state, 2)
    rewards = expected_step_rewards_env2(state, init_fault_belief(params))
    # Level run from the mid-line always lands inside a fault-free trend.
    assert rewards[5] == pytest.approx(4.0 - 0.0625 - 2.567)
