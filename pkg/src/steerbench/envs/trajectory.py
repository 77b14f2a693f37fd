"""Minimum-curvature well path stepping.

A steering decision changes hole inclination by a fixed increment over one
stage. The stage is divided into equal horizontal sub-steps; inclination
ramps linearly across them, and each sub-step is a constant-curvature arc.
For a circular arc that runs a horizontal distance dx while inclination (as
measured from horizontal here) turns from A to B, the exact TVD increment is

    dz = dx * (cos A - cos B) / (sin B - sin A) = dx * tan((A + B) / 2)

so the midpoint-tangent rule below is closed-form exact per sub-arc, not an
approximation. Inclination 0 drills horizontally; positive inclination
builds depth.
"""

from __future__ import annotations

import math

import numpy as np

__all__ = ["arc_tvd_increment", "min_curvature_segment"]


def arc_tvd_increment(inc_a_deg: float, inc_b_deg: float, dx: float) -> float:
    """Exact TVD gained by one constant-curvature sub-arc (degrees in)."""
    mid = math.radians(0.5 * (inc_a_deg + inc_b_deg))
    return dx * math.tan(mid)


def min_curvature_segment(
    tvd: float,
    inclination_deg: float,
    delta_deg: float,
    dx: float,
    n_sub: int,
) -> tuple[np.ndarray, float]:
    """Drill one stage of ``n_sub`` horizontal sub-steps of length ``dx``.

    Inclination ramps linearly from ``inclination_deg`` to
    ``inclination_deg + delta_deg`` across the sub-steps. Returns the TVD at
    each sub-step end (array of length ``n_sub``) and the final inclination.
    """
    incs = inclination_deg + delta_deg * np.arange(n_sub + 1) / n_sub
    mids = np.radians(0.5 * (incs[:-1] + incs[1:]))
    tvds = tvd + np.cumsum(dx * np.tan(mids))
    return tvds, float(incs[-1])
