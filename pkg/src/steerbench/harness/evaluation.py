"""Paired evaluation over a common bank of realizations.

Every policy is scored on the same geology: evaluation episode e draws its
realization from SeedSequence((eval_seed, e)) regardless of agent, so
differences in the report are differences between policies, not luck of the
draw. Learned agents are evaluated once per training seed and summarized by
the median of the per-seed mean rewards, which keeps one diverged seed from
hiding (or inventing) a working method. Analytic agents report plain means.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..envs.metrics import EpisodeResult, episode_metrics
from .config import ExperimentConfig
from .training import env_step, start_episode

__all__ = ["EvalReport", "evaluate_policy", "rl_robust", "scenario_label", "report_row", "report_dict"]


def evaluate_policy(
    config: ExperimentConfig, policy_fn, n_episodes: int, eval_seed: int
) -> list[EpisodeResult]:
    """Roll out ``policy_fn(state, rng) -> action`` on the shared eval bank."""
    results = []
    for e in range(n_episodes):
        geo_rng = np.random.default_rng(np.random.SeedSequence((eval_seed, e)))
        policy_rng = np.random.default_rng(np.random.SeedSequence((eval_seed, e, 1)))
        state = start_episode(config, geo_rng)
        while not state.done:
            action = policy_fn(state, policy_rng)
            state, _ = env_step(config, state, action)
        results.append(episode_metrics(state))
    return results


def rl_robust(per_seed_means: dict[int, float]) -> float:
    """Median over the per-seed mean rewards."""
    return float(np.median(list(per_seed_means.values())))


def scenario_label(config: ExperimentConfig) -> str:
    if config.env == "env1":
        return f"w1={config.w1:g},w2={config.w2:g},perm_low={config.layered.perm_low:g}"
    if config.v_prod is None:
        return f"v=uniform[{config.v_min:g},{config.v_max:g}]"
    return f"v={config.v_prod:g}"


@dataclass
class EvalReport:
    env: str
    agent: str
    scenario: str
    eval_seed: int
    n_episodes: int
    seeds: list[int]
    per_seed_mean_reward: dict[int, float]
    robust_reward: float | None
    mean_reward: float
    mean_contact_pct: float
    mean_hq_pct: float | None = None
    mean_cost: float | None = None
    mean_value: float | None = None
    mean_sidetracks: float | None = None
    episodes: list[dict] = field(default_factory=list)

    @classmethod
    def from_episodes(
        cls,
        config: ExperimentConfig,
        per_seed: dict[int, list[EpisodeResult]],
    ) -> "EvalReport":
        """Summarize evaluation episodes; analytic agents pass seed key -1."""
        seeds = sorted(k for k in per_seed if k >= 0)
        pooled: list[tuple[int, EpisodeResult]] = []
        for seed, eps in sorted(per_seed.items()):
            pooled.extend((seed, r) for r in eps)
        rewards = np.array([r.total_reward for _, r in pooled])
        per_seed_means = {
            seed: float(np.mean([r.total_reward for r in eps])) for seed, eps in per_seed.items()
        }
        if seeds:
            robust = rl_robust({s: per_seed_means[s] for s in seeds})
            mean_reward = robust
        else:
            robust = None
            mean_reward = float(rewards.mean())
        env1 = config.env == "env1"
        episodes = []
        for seed, eps in sorted(per_seed.items()):
            for i, r in enumerate(eps):
                row = {
                    "seed": seed,
                    "episode": i,
                    "reward": r.total_reward,
                    "contact_pct": r.contact_pct,
                }
                if env1:
                    row["hq_pct"] = r.hq_pct
                else:
                    row["cost"] = r.cost
                    row["value"] = r.value
                    row["n_sidetracks"] = r.n_sidetracks
                episodes.append(row)
        return cls(
            env=config.env,
            agent=config.agent,
            scenario=scenario_label(config),
            eval_seed=config.eval_seed,
            n_episodes=len(next(iter(per_seed.values()))),
            seeds=seeds,
            per_seed_mean_reward=per_seed_means,
            robust_reward=robust,
            mean_reward=mean_reward,
            mean_contact_pct=float(np.mean([r.contact_pct for _, r in pooled])),
            mean_hq_pct=(
                float(np.mean([r.hq_pct for _, r in pooled])) if env1 else None
            ),
            mean_cost=(None if env1 else float(np.mean([r.cost for _, r in pooled]))),
            mean_value=(None if env1 else float(np.mean([r.value for _, r in pooled]))),
            mean_sidetracks=(
                None if env1 else float(np.mean([r.n_sidetracks for _, r in pooled]))
            ),
            episodes=episodes,
        )


def report_row(report: EvalReport) -> dict:
    """Flatten for the CSV table."""
    return {
        "env": report.env,
        "agent": report.agent,
        "scenario": report.scenario,
        "n_seeds": len(report.seeds),
        "n_episodes": report.n_episodes,
        "mean_reward": report.mean_reward,
        "robust_reward": report.robust_reward,
        "mean_contact_pct": report.mean_contact_pct,
        "mean_hq_pct": report.mean_hq_pct,
        "mean_cost": report.mean_cost,
        "mean_value": report.mean_value,
        "mean_sidetracks": report.mean_sidetracks,
    }


def report_dict(report: EvalReport) -> dict:
    """Full JSON form, per-episode records included."""
    return {
        "env": report.env,
        "agent": report.agent,
        "scenario": report.scenario,
        "eval_seed": report.eval_seed,
        "n_episodes": report.n_episodes,
        "seeds": report.seeds,
        "per_seed_mean_reward": {str(k): v for k, v in report.per_seed_mean_reward.items()},
        "robust_reward": report.robust_reward,
        "mean_reward": report.mean_reward,
        "mean_contact_pct": report.mean_contact_pct,
        "mean_hq_pct": report.mean_hq_pct,
        "mean_cost": report.mean_cost,
        "mean_value": report.mean_value,
        "mean_sidetracks": report.mean_sidetracks,
        "episodes": report.episodes,
    }
