"""Stochastic reservoir generators: shapes, determinism, and distributions."""

from __future__ import annotations

import dataclasses

import numpy as np
import pytest

from steerbench.geomodel import (
    FaultSpec,
    ForwardFnParams1,
    FaultedTrendParams,
    default_faulted_params,
    default_layered_params,
    sample_realization_env1,
    sample_realization_env2,
)


# ---------------------------------------------------------------- layered ---

def test_layered_shapes_and_ranges():
    params = default_layered_params()
    real = sample_realization_env1(params, np.random.default_rng(0))
    n = params.n_points
    assert real.top.shape == (n + 1,)
    assert real.thickness.shape == (n + 1,)
    assert np.all(real.thickness >= params.thickness_min)
    assert np.all(real.bottom > real.top)
    assert np.all(real.hq_bottom <= real.bottom)


def test_layered_determinism():
    params = default_layered_params()
    a = sample_realization_env1(params, np.random.default_rng(123))
    b = sample_realization_env1(params, np.random.default_rng(123))
    np.testing.assert_array_equal(a.top, b.top)
    np.testing.assert_array_equal(a.thickness, b.thickness)


def test_layered_zero_variance_is_flat():
    params = dataclasses.replace(
        default_layered_params(), boundary_step_sd=0.0, thickness_step_sd=0.0
    )
    real = sample_realization_env1(params, np.random.default_rng(5))
    np.testing.assert_allclose(real.top, params.mean_top_depth)
    np.testing.assert_allclose(real.thickness, params.thickness_mean)


def test_layered_membership_is_boundary_inclusive():
    params = dataclasses.replace(
        default_layered_params(), boundary_step_sd=0.0, thickness_step_sd=0.0
    )
    real = sample_realization_env1(params, np.random.default_rng(5))
    top = real.top[3]
    bottom = real.bottom[3]
    hq_bottom = real.hq_bottom[3]
    assert real.inside(3, top) and real.inside(3, bottom)
    assert not real.inside(3, top - 1e-9)
    assert not real.inside(3, bottom + 1e-9)
    assert real.in_hq(3, hq_bottom)
    assert not real.in_hq(3, hq_bottom + 1e-9)


def test_layered_permeability_zones():
    params = dataclasses.replace(
        default_layered_params(perm_low=100.0),
        boundary_step_sd=0.0,
        thickness_step_sd=0.0,
    )
    real = sample_realization_env1(params, np.random.default_rng(5))
    top = params.mean_top_depth
    h = params.thickness_mean
    hq = params.hq_fraction * h
    assert real.permeability(0, top + 0.5 * hq) == params.perm_high
    assert real.permeability(0, top + hq + 0.1) == 100.0
    assert real.permeability(0, top - 1.0) == 0.0
    assert real.permeability(0, top + h + 1.0) == 0.0


def test_layered_step_scale_matches_configuration():
    params = dataclasses.replace(default_layered_params(), smoothing_window=1)
    rng = np.random.default_rng(2024)
    steps = []
    for _ in range(200):
        real = sample_realization_env1(params, rng)
        steps.append(np.diff(real.top))
    sd = np.std(np.concatenate(steps))
    assert sd == pytest.approx(params.boundary_step_sd, rel=0.05)


def test_layered_smoothing_reduces_roughness():
    base = dataclasses.replace(default_layered_params(), smoothing_window=1)
    smooth = dataclasses.replace(default_layered_params(), smoothing_window=9)
    rough_sd = np.std(
        np.diff(sample_realization_env1(base, np.random.default_rng(1)).top)
    )
    smooth_sd = np.std(
        np.diff(sample_realization_env1(smooth, np.random.default_rng(1)).top)
    )
    assert smooth_sd < rough_sd


# ---------------------------------------------------------------- faulted ---

def test_faulted_shapes():
    params = default_faulted_params()
    real = sample_realization_env2(params, np.random.default_rng(0))
    n = params.n_points
    assert real.upper.shape == (n,)
    assert real.xs.shape == (n,)
    assert real.lower[0] - real.upper[0] == params.thickness
    assert len(real.fault_locations) == len(params.faults)


def test_faulted_determinism():
    params = default_faulted_params()
    a = sample_realization_env2(params, np.random.default_rng(9))
    b = sample_realization_env2(params, np.random.default_rng(9))
    np.testing.assert_array_equal(a.upper, b.upper)
    assert a.fault_locations == b.fault_locations
    assert a.fault_displacements == b.fault_displacements


def test_fault_locations_come_from_candidates():
    params = default_faulted_params()
    rng = np.random.default_rng(77)
    for _ in range(50):
        real = sample_realization_env2(params, rng)
        for spec, loc in zip(params.faults, real.fault_locations):
            assert loc in spec.candidates


def test_fault_location_frequencies_are_uniform():
    params = default_faulted_params()
    rng = np.random.default_rng(3)
    counts = {c: 0 for c in params.faults[0].candidates}
    n = 6000
    for _ in range(n):
        real = sample_realization_env2(params, rng)
        counts[real.fault_locations[0]] += 1
    for c, k in counts.items():
        assert k / n == pytest.approx(1.0 / 3.0, abs=0.03)


def test_fault_displacement_moments():
    params = default_faulted_params()
    rng = np.random.default_rng(4)
    draws = np.array(
        [sample_realization_env2(params, rng).fault_displacements[0] for _ in range(4000)]
    )
    spec = params.faults[0]
    assert np.mean(draws) == pytest.approx(spec.disp_mean, abs=0.08)
    assert np.std(draws) == pytest.approx(spec.disp_sd, rel=0.08)


def test_fault_offsets_accumulate_exactly():
    """upper - dipping trend must equal the sum of displacements already crossed."""
    params = default_faulted_params()
    real = sample_realization_env2(params, np.random.default_rng(11))
    for i, x in enumerate(real.xs):
        expect = sum(
            d for loc, d in zip(real.fault_locations, real.fault_displacements) if x >= loc
        )
        assert real.upper[i] - real.base_upper[i] == pytest.approx(expect, abs=1e-12)


def test_single_candidate_zero_sd_fault_is_deterministic():
    fault = FaultSpec(candidates=(300.0,), disp_mean=2.0, disp_sd=0.0)
    params = FaultedTrendParams(faults=(fault,))
    real = sample_realization_env2(params, np.random.default_rng(0))
    assert real.fault_locations == (300,)
    assert real.fault_displacements[0] == pytest.approx(2.0)
    i = list(real.xs).index(300)
    assert real.upper[i] - real.base_upper[i] == pytest.approx(2.0)
    assert real.upper[i - 1] - real.base_upper[i - 1] == 0.0


def test_mid_is_centered():
    params = default_faulted_params()
    real = sample_realization_env2(params, np.random.default_rng(2))
    np.testing.assert_allclose(real.mid, 0.5 * (real.upper + real.lower))
