"""Discretized stochastic dynamic programming for the faulted environment.

The solver works on an abstracted MDP whose state is (stage, depth bin),
where the bin holds the bit's signed offset from the local reservoir
mid-line. That offset is exactly observable (the at-bit sensor pins the
boundaries at the current node), and together with the stage it captures
everything the transition and reward depend on: fault crossings enter as a
per-stage mixture over the prior candidate locations. Backward induction
runs from the terminal stage with Monte Carlo transition sampling per
(stage, action), shared across bins.

Value ties prefer the gentlest steering move; the sidetrack ranks last.
The result is a plain stage-by-bin action table that can be saved as text
and cached on disk keyed by a digest of everything that affects the solve.
"""

from __future__ import annotations

import hashlib
import json
import logging
import os
from dataclasses import dataclass

import numpy as np

from ..envs.env2 import ACTIONS_ENV2, SIDETRACK, CostParams, Env2State
from ..geomodel import FaultedTrendParams

__all__ = ["DsdpPolicy", "dsdp_solve", "dsdp_act", "save_policy", "load_policy", "solve_cached"]

log = logging.getLogger(__name__)


@dataclass
class DsdpPolicy:
    n_stages: int
    bin_width: float
    span: float
    bin_centers: np.ndarray
    actions: np.ndarray         # (n_stages, n_bins) best action index
    values: np.ndarray          # (n_stages, n_bins) value-to-go estimate
    steer_fallback: np.ndarray  # (n_stages, n_bins) best steering-only action
    meta: dict

    def snap(self, rho: float) -> int:
        i = int(round((rho + self.span) / self.bin_width))
        return min(max(i, 0), len(self.bin_centers) - 1)


_TIE_MAGNITUDE = [abs(d) for d in ACTIONS_ENV2] + [float("inf")]


def _pick(q_row: np.ndarray) -> int:
    best = 0
    best_key = (-q_row[0], _TIE_MAGNITUDE[0], 0)
    for a in range(1, len(q_row)):
        key = (-q_row[a], _TIE_MAGNITUDE[a], a)
        if key < best_key:
            best = a
            best_key = key
    return best


def dsdp_solve(
    params: FaultedTrendParams,
    costs: CostParams,
    v_prod: float,
    rng: np.random.Generator,
    bin_width: float = 0.25,
    span: float = 8.0,
    mc: int = 500,
) -> DsdpPolicy:
    """Backward induction over (stage, depth-offset bin)."""
    n_stages = params.n_points - 1
    n_bins = int(round(2 * span / bin_width)) + 1
    centers = -span + bin_width * np.arange(n_bins)
    half = 0.5 * params.thickness
    base = params.base_upper
    xs = params.xs

    def snap_idx(rho):
        return np.clip(np.rint((rho + span) / bin_width).astype(int), 0, n_bins - 1)

    actions = np.zeros((n_stages, n_bins), dtype=np.int8)
    values = np.zeros((n_stages, n_bins))
    fallback = np.zeros((n_stages, n_bins), dtype=np.int8)
    v_next = np.zeros(n_bins)

    for j in range(n_stages - 1, -1, -1):
        # Mid-line shift over this step: trend dip plus any fault throw. The
        # crossing probability is the prior mass of candidates in the step.
        shift = np.full(mc, base[j + 1] - base[j])
        for fault in params.faults:
            hits = sum(1 for c in fault.candidates if xs[j] < c <= xs[j + 1])
            if not hits:
                continue
            p_cross = hits / len(fault.candidates)
            crossed = rng.random(mc) < p_cross
            throws = rng.normal(fault.disp_mean, fault.disp_sd, size=mc)
            shift = shift + crossed * throws

        q = np.empty((SIDETRACK + 1, n_bins))
        for a, delta in enumerate(ACTIONS_ENV2):
            rho_next = centers[:, None] + delta - shift[None, :]
            reward = v_prod * (np.abs(rho_next) <= half) - costs.drill
            q[a] = (reward + v_next[snap_idx(rho_next)]).mean(axis=1)
        rho_next_st = -shift
        reward_st = v_prod * (np.abs(rho_next_st) <= half) - costs.drill - costs.sidetrack
        q_st = float((reward_st + v_next[snap_idx(rho_next_st)]).mean())
        outside = np.abs(centers) > half
        q[SIDETRACK] = np.where(outside, q_st, -np.inf)

        for b in range(n_bins):
            best = _pick(q[:, b])
            actions[j, b] = best
            values[j, b] = q[best, b]
            fallback[j, b] = _pick(q[:SIDETRACK, b])
        v_next = values[j]

    meta = {
        "bin_width": bin_width,
        "span": span,
        "mc": mc,
        "v_prod": v_prod,
        "n_stages": n_stages,
        "thickness": params.thickness,
        "drill_cost": costs.drill,
        "sidetrack_cost": costs.sidetrack,
    }
    return DsdpPolicy(
        n_stages=n_stages,
        bin_width=bin_width,
        span=span,
        bin_centers=centers,
        actions=actions,
        values=values,
        steer_fallback=fallback,
        meta=meta,
    )


def dsdp_act(policy: DsdpPolicy, state: Env2State) -> int:
    """Look up the tabled action for the bit's current mid-line offset.

    Falls back to the best steering move if bin snapping ever suggests a
    sidetrack while the bit is actually inside (cannot happen when the half
    thickness lies on a bin center, but other geometries could).
    """
    j = state.stage
    rho = state.tvd - float(state.real.mid[j])
    b = policy.snap(rho)
    action = int(policy.actions[j, b])
    if action == SIDETRACK and state.real.inside(j, state.tvd):
        action = int(policy.steer_fallback[j, b])
    return action


def save_policy(policy: DsdpPolicy, path: str) -> None:
    """Plain-text stage-by-bin table, one row per (stage, bin)."""
    lines = ["# dsdp policy v1"]
    lines.append("# meta " + json.dumps(policy.meta, sort_keys=True))
    lines.append("# stage bin_index bin_center action value steering_fallback")
    for j in range(policy.n_stages):
        for b, center in enumerate(policy.bin_centers):
            lines.append(
                f"{j} {b} {center:.4f} {policy.actions[j, b]} "
                f"{policy.values[j, b]:.12g} {policy.steer_fallback[j, b]}"
            )
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def load_policy(path: str) -> DsdpPolicy:
    with open(path) as fh:
        lines = fh.read().splitlines()
    if not lines or lines[0] != "# dsdp policy v1":
        raise ValueError(f"{path} is not a policy table")
    meta = json.loads(lines[1].removeprefix("# meta "))
    rows = [ln.split() for ln in lines if ln and not ln.startswith("#")]
    n_stages = meta["n_stages"]
    bin_width = meta["bin_width"]
    span = meta["span"]
    n_bins = len(rows) // n_stages
    centers = -span + bin_width * np.arange(n_bins)
    actions = np.zeros((n_stages, n_bins), dtype=np.int8)
    values = np.zeros((n_stages, n_bins))
    fallback = np.zeros((n_stages, n_bins), dtype=np.int8)
    for row in rows:
        j, b = int(row[0]), int(row[1])
        actions[j, b] = int(row[3])
        values[j, b] = float(row[4])
        fallback[j, b] = int(row[5])
    return DsdpPolicy(
        n_stages=n_stages,
        bin_width=bin_width,
        span=span,
        bin_centers=centers,
        actions=actions,
        values=values,
        steer_fallback=fallback,
        meta=meta,
    )


def solve_cached(
    params: FaultedTrendParams,
    costs: CostParams,
    v_prod: float,
    cache_dir: str,
    seed: int = 7,
    bin_width: float = 0.25,
    span: float = 8.0,
    mc: int = 500,
) -> DsdpPolicy:
    """Solve, or load a previous solve with an identical fingerprint."""
    fingerprint = {
        "n_points": params.n_points,
        "spacing": params.spacing,
        "top_start": params.top_start,
        "dip_per_step": params.dip_per_step,
        "thickness": params.thickness,
        "faults": [[list(f.candidates), f.disp_mean, f.disp_sd] for f in params.faults],
        "drill": costs.drill,
        "sidetrack": costs.sidetrack,
        "v_prod": v_prod,
        "bin_width": bin_width,
        "span": span,
        "mc": mc,
        "seed": seed,
    }
    digest = hashlib.sha256(json.dumps(fingerprint, sort_keys=True).encode()).hexdigest()[:16]
    path = os.path.join(cache_dir, f"dsdp_{digest}.txt")
    if os.path.exists(path):
        log.debug("loading cached policy %s", path)
        return load_policy(path)
    rng = np.random.default_rng(np.random.SeedSequence((seed, 0xD5D9)))
    policy = dsdp_solve(params, costs, v_prod, rng, bin_width=bin_width, span=span, mc=mc)
    os.makedirs(cache_dir, exist_ok=True)
    save_policy(policy, path)
    log.info("solved and cached policy %s (v=%g)", path, v_prod)
    return policy
