"""Point-wise reward polynomials shared by the environments.

Both rewards are cubic/quadratic fits that peak when the bit is well placed
and go negative (or to zero) as placement degrades:

* ``reward_r1`` scores the bit's position between the reservoir boundaries
  through the signed normalized margin x = min(DTUB, DTLB) / h, where DTUB
  and DTLB are the distances to the upper and lower boundary. Inside the
  reservoir x is in [0, 0.5] and the reward peaks near the mid-line; outside
  the nearest margin is negative and the cubic turns sharply negative.
* ``reward_r2`` scores the permeability y of the rock at the bit and is zero
  outside the reservoir (where y = 0).
"""

from __future__ import annotations

import numpy as np

__all__ = ["signed_margin", "reward_r1", "reward_r2"]


def signed_margin(tvd, top, bottom, out=None):
    """Signed normalized distance to the nearest boundary.

    Positive inside the reservoir (at most 0.5 on the mid-line), negative
    outside. Accepts scalars or broadcastable arrays.
    """
    h = np.subtract(bottom, top)
    dtub = np.subtract(tvd, top)
    dtlb = np.subtract(bottom, tvd)
    return np.minimum(dtub, dtlb) / h


def reward_r1(x):
    """Boundary-placement reward 14.654 x^3 - 17.778 x^2 + 7.2252 x."""
    x = np.asarray(x, dtype=float)
    value = ((14.654 * x - 17.778) * x + 7.2252) * x
    if value.ndim == 0:
        return float(value)
    return value


def reward_r2(y):
    """Permeability reward -2e-5 y^2 + 0.009 y, zero at y = 0.

    Evaluated as y * (900 - 2y) / 1e5: same polynomial, but the peak value
    at y = 200 comes out as exactly 1.0 in floating point (the coefficient
    form is off by one ulp there).
    """
    y = np.asarray(y, dtype=float)
    value = y * (900.0 - 2.0 * y) / 100000.0
    if value.ndim == 0:
        return float(value)
    return value
