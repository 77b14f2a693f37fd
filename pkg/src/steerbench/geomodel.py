"""Geological forward models for the two steering environments.

Two priors are implemented:

* a layered reservoir whose top boundary and thickness follow smoothed
  Gaussian random walks, with a high-permeability streak in the upper part
  of the reservoir (:func:`sample_realization_env1`), and
* a faulted reservoir whose upper boundary follows a dipping linear trend
  offset by a small number of faults with uncertain location and throw
  (:func:`sample_realization_env2`).

All sampling goes through an explicit ``numpy.random.Generator`` so a given
seed always reproduces the same geology. Depths are true vertical depth in
meters, increasing downward.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "ForwardFnParams1",
    "GeoRealization1",
    "FaultSpec",
    "FaultedTrendParams",
    "GeoRealization2",
    "sample_realization_env1",
    "sample_realization_env2",
    "default_layered_params",
    "default_faulted_params",
]


@dataclass
class ForwardFnParams1:
    """Prior parameters for the layered reservoir.

    ``n_points`` is the number of evaluated decision points; boundary arrays
    cover ``n_points + 1`` grid nodes so the landing node after the last
    stage still has geology under it.
    """

    n_points: int = 100
    dx: float = 10.0
    mean_top_depth: float = 1000.0
    boundary_step_sd: float = 1.0
    smoothing_window: int = 5
    thickness_mean: float = 25.0
    thickness_step_sd: float = 0.3
    thickness_min: float = 10.0
    hq_fraction: float = 0.4
    perm_high: float = 200.0
    perm_low: float = 100.0


@dataclass
class GeoRealization1:
    """One sampled layered reservoir: boundary arrays plus zone properties."""

    top: np.ndarray
    thickness: np.ndarray
    perm_high: float
    perm_low: float
    hq_fraction: float

    @property
    def bottom(self) -> np.ndarray:
        return self.top + self.thickness

    @property
    def hq_bottom(self) -> np.ndarray:
        """Lower boundary of the high-permeability streak."""
        return self.top + self.hq_fraction * self.thickness

    def inside(self, idx: int, tvd: float) -> bool:
        return self.top[idx] <= tvd <= self.top[idx] + self.thickness[idx]

    def in_hq(self, idx: int, tvd: float) -> bool:
        # Membership is inclusive at both edges of the streak.
        return self.top[idx] <= tvd <= self.hq_bottom[idx]

    def permeability(self, idx: int, tvd: float) -> float:
        """Permeability seen by the bit at grid node ``idx``, 0 outside."""
        if not self.inside(idx, tvd):
            return 0.0
        if tvd <= self.hq_bottom[idx]:
            return self.perm_high
        return self.perm_low


@dataclass(frozen=True)
class FaultSpec:
    """Prior for a single fault: equally likely candidate positions along the
    lateral and a Gaussian throw (positive = downthrown ahead of the fault)."""

    candidates: tuple[float, ...]
    disp_mean: float
    disp_sd: float

    @property
    def zone_start(self) -> float:
        return min(self.candidates)

    @property
    def zone_end(self) -> float:
        return max(self.candidates)


@dataclass
class FaultedTrendParams:
    """Prior parameters for the faulted reservoir."""

    n_points: int = 30
    spacing: float = 30.0
    top_start: float = 1000.0
    dip_per_step: float = 0.5
    thickness: float = 5.0
    faults: tuple[FaultSpec, ...] = ()

    @property
    def xs(self) -> np.ndarray:
        return self.spacing * np.arange(self.n_points)

    @property
    def base_upper(self) -> np.ndarray:
        """Fault-free upper boundary (the dipping trend)."""
        return self.top_start + self.dip_per_step * np.arange(self.n_points)


@dataclass
class GeoRealization2:
    """One sampled faulted reservoir."""

    upper: np.ndarray
    base_upper: np.ndarray
    spacing: float
    thickness: float
    fault_locations: tuple[float, ...]
    fault_displacements: tuple[float, ...]

    @property
    def lower(self) -> np.ndarray:
        return self.upper + self.thickness

    @property
    def mid(self) -> np.ndarray:
        return self.upper + 0.5 * self.thickness

    @property
    def xs(self) -> np.ndarray:
        return self.spacing * np.arange(len(self.upper))

    def inside(self, idx: int, tvd: float) -> bool:
        return self.upper[idx] <= tvd <= self.upper[idx] + self.thickness


def _smoothed_walk(n_steps: int, step_sd: float, window: int, rng: np.random.Generator) -> np.ndarray:
    """Zero-mean Gaussian random walk over ``n_steps + 1`` nodes, smoothed with
    an edge-normalized moving average.

    Edge normalization divides by the actual kernel mass at each node, so a
    zero-variance walk stays exactly flat instead of sagging at the ends.
    """
    steps = rng.normal(0.0, step_sd, size=n_steps)
    walk = np.concatenate([[0.0], np.cumsum(steps)])
    if window > 1:
        kernel = np.ones(window)
        mass = np.convolve(np.ones(walk.size), kernel, mode="same")
        walk = np.convolve(walk, kernel, mode="same") / mass
    return walk


def sample_realization_env1(params: ForwardFnParams1, rng: np.random.Generator) -> GeoRealization1:
    """Draw one layered reservoir.

    Draw order is fixed (top walk, then thickness walk) so a seeded generator
    reproduces the realization bit for bit. The thickness floor is applied
    after smoothing.
    """
    top = params.mean_top_depth + _smoothed_walk(
        params.n_points, params.boundary_step_sd, params.smoothing_window, rng
    )
    thickness = params.thickness_mean + _smoothed_walk(
        params.n_points, params.thickness_step_sd, params.smoothing_window, rng
    )
    thickness = np.maximum(thickness, params.thickness_min)
    return GeoRealization1(
        top=top,
        thickness=thickness,
        perm_high=params.perm_high,
        perm_low=params.perm_low,
        hq_fraction=params.hq_fraction,
    )


def sample_realization_env2(params: FaultedTrendParams, rng: np.random.Generator) -> GeoRealization2:
    """Draw one faulted reservoir.

    Each fault draws a location (uniform over its candidates) and then a
    throw, in the order the faults are listed. A fault at location L shifts
    every node with x >= L down by its throw.
    """
    xs = params.xs
    upper = params.base_upper.astype(float).copy()
    locations = []
    displacements = []
    for fault in params.faults:
        loc = float(fault.candidates[rng.integers(len(fault.candidates))])
        disp = float(rng.normal(fault.disp_mean, fault.disp_sd))
        upper[xs >= loc] += disp
        locations.append(loc)
        displacements.append(disp)
    return GeoRealization2(
        upper=upper,
        base_upper=params.base_upper,
        spacing=params.spacing,
        thickness=params.thickness,
        fault_locations=tuple(locations),
        fault_displacements=tuple(displacements),
    )


def default_layered_params(perm_low: float = 100.0) -> ForwardFnParams1:
    return ForwardFnParams1(perm_low=perm_low)


def default_faulted_params() -> FaultedTrendParams:
    """Three-fault prior: the first fault is 3 m +/- 1 m at one of
    {120, 150, 180} m; the other two are illustrative defaults of the same
    order, placed in disjoint zones further along the lateral."""
    return FaultedTrendParams(
        faults=(
            FaultSpec(candidates=(120.0, 150.0, 180.0), disp_mean=3.0, disp_sd=1.0),
            FaultSpec(candidates=(360.0, 390.0, 420.0), disp_mean=2.0, disp_sd=1.0),
            FaultSpec(candidates=(600.0, 660.0, 720.0), disp_mean=4.0, disp_sd=1.5),
        )
    )
