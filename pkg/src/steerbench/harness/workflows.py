"""End-to-end runs: multi-seed training with checkpoints, evaluation of any
agent from its artifacts, and side-by-side comparisons."""

from __future__ import annotations

import logging
import os
import time
from dataclasses import dataclass

import numpy as np

from ..agents.dqn import dqn_select_action
from ..agents.dsdp import dsdp_act, solve_cached
from ..agents.greedy import greedy_select
from ..agents.qtable import QTable, discretize_state, table_greedy_action
from ..neural import QNetwork
from .config import ExperimentConfig, ConfigError, config_digest, config_from_dict, config_to_dict
from .evaluation import EvalReport, evaluate_policy
from .reporting import read_blob, write_blob, write_curves_csv, write_timing
from .training import TrainResult, legal_mask, observation_for, train_agent

__all__ = [
    "LoadedAgent",
    "checkpoint_path",
    "save_checkpoint",
    "load_checkpoint",
    "policy_for",
    "train_multi_seed",
    "evaluate_agent",
    "compare_agents",
]

log = logging.getLogger(__name__)


def checkpoint_path(out_dir: str, seed: int) -> str:
    return os.path.join(out_dir, f"checkpoint_{seed}.bin")


def save_checkpoint(path: str, result: TrainResult, config: ExperimentConfig) -> None:
    meta = {
        "schema_version": 1,
        "env": config.env,
        "agent": config.agent,
        "seed": result.seed,
        "episodes": config.episodes,
        "digest": config_digest(config),
        "config": config_to_dict(config),
    }
    if result.dqn is not None:
        net = result.dqn.online
        meta["kind"] = "dqn"
        meta["sizes"] = list(net.sizes)
        arrays = []
        for w, b in zip(net.weights, net.biases):
            arrays.extend([w, b])
    elif result.table is not None:
        meta["kind"] = "qlearn"
        keys = sorted(result.table._q)
        meta["key_len"] = len(keys[0]) if keys else 0
        key_arr = np.array(keys, dtype=np.int64).reshape(len(keys), -1)
        val_arr = np.array([result.table._q[k] for k in keys])
        arrays = [key_arr, val_arr]
    else:
        raise ValueError("nothing to checkpoint")
    write_blob(path, meta, arrays)


@dataclass
class LoadedAgent:
    meta: dict
    config: ExperimentConfig
    net: QNetwork | None = None
    table: QTable | None = None


def load_checkpoint(path: str) -> LoadedAgent:
    meta, arrays = read_blob(path)
    config = config_from_dict(meta["config"])
    if meta["kind"] == "dqn":
        sizes = tuple(meta["sizes"])
        if len(arrays) != 2 * (len(sizes) - 1):
            raise ValueError("checkpoint array count does not match its layer sizes")
        weights = [arrays[2 * i] for i in range(len(sizes) - 1)]
        biases = [arrays[2 * i + 1] for i in range(len(sizes) - 1)]
        for fan_in, fan_out, w, b in zip(sizes[:-1], sizes[1:], weights, biases):
            if w.shape != (fan_out, fan_in) or b.shape != (fan_out,):
                raise ValueError("checkpoint layer shapes do not match declared sizes")
        net = QNetwork(sizes=sizes, weights=weights, biases=biases)
        return LoadedAgent(meta=meta, config=config, net=net)
    if meta["kind"] == "qlearn":
        key_arr, val_arr = arrays
        table = QTable(val_arr.shape[1] if len(val_arr) else 1)
        for row, values in zip(key_arr, val_arr):
            table._q[tuple(int(v) for v in row)] = np.array(values)
        return LoadedAgent(meta=meta, config=config, table=table)
    raise ValueError(f"unknown checkpoint kind: {meta['kind']!r}")


def policy_for(
    config: ExperimentConfig,
    *,
    net: QNetwork | None = None,
    table: QTable | None = None,
    cache_dir: str | None = None,
):
    """Build ``policy_fn(state, rng) -> action`` for the configured agent."""
    agent = config.agent
    if agent == "greedy":
        mc = config.greedy_mc

        def policy(state, rng):
            return greedy_select(state, rng, mc)

        return policy
    if agent == "dsdp":
        if config.env != "env2":
            raise ConfigError("the dsdp agent supports the faulted environment only")
        if config.v_prod is None:
            raise ConfigError("dsdp needs a fixed v_prod (one solve per value)")
        cache = cache_dir or os.path.join(config.out, "dsdp_cache")
        dp = solve_cached(
            config.faulted,
            config.costs,
            config.v_prod,
            cache,
            seed=config.dsdp_seed,
            bin_width=config.dsdp_bin_width,
            span=config.dsdp_span,
            mc=config.dsdp_mc,
        )

        def policy(state, rng):
            return dsdp_act(dp, state)

        return policy
    if agent in ("dqn-sensor", "dqn-posterior"):
        if net is None:
            raise ValueError("dqn evaluation needs a network")

        def policy(state, rng):
            obs = observation_for(config, state)
            mask = legal_mask(config, state)
            return dqn_select_action(net, obs, 0.0, mask, rng)

        return policy
    if agent == "qlearn":
        if table is None:
            raise ValueError("qlearn evaluation needs a table")

        def policy(state, rng):
            return table_greedy_action(table, discretize_state(state), legal_mask(config, state))

        return policy
    raise ConfigError(f"unknown agent type: {agent!r}")


def train_multi_seed(config: ExperimentConfig) -> dict[int, TrainResult]:
    """Train every seed, writing checkpoint_<seed>.bin, curves.csv, and the
    wall-clock sidecar under the output directory."""
    os.makedirs(config.out, exist_ok=True)
    results: dict[int, TrainResult] = {}
    timings: dict[str, float] = {}
    for seed in config.seed_list:
        t0 = time.perf_counter()
        result = train_agent(config, seed)
        elapsed = time.perf_counter() - t0
        timings[f"train_seed_{seed}_s"] = elapsed
        results[seed] = result
        save_checkpoint(checkpoint_path(config.out, seed), result, config)
        log.info("trained seed %d in %.1fs", seed, elapsed)
    write_curves_csv(os.path.join(config.out, "curves.csv"), {s: r.curve for s, r in results.items()})
    write_timing(os.path.join(config.out, "timing.json"), timings)
    return results


def evaluate_agent(
    config: ExperimentConfig,
    *,
    results: dict[int, TrainResult] | None = None,
    checkpoint_dir: str | None = None,
    cache_dir: str | None = None,
) -> EvalReport:
    """Evaluate the configured agent on the shared realization bank.

    Learned agents come either from in-memory training results or from
    checkpoints under ``checkpoint_dir`` (default: the config's output dir).
    """
    agent = config.agent
    if agent in ("greedy", "dsdp"):
        policy = policy_for(config, cache_dir=cache_dir)
        episodes = evaluate_policy(config, policy, config.eval_n, config.eval_seed)
        return EvalReport.from_episodes(config, {-1: episodes})
    per_seed = {}
    for seed in config.seed_list:
        if results is not None and seed in results:
            result = results[seed]
            net = result.dqn.online if result.dqn is not None else None
            table = result.table
        else:
            path = checkpoint_path(checkpoint_dir or config.out, seed)
            loaded = load_checkpoint(path)
            net = loaded.net
            table = loaded.table
        policy = policy_for(config, net=net, table=table)
        per_seed[seed] = evaluate_policy(config, policy, config.eval_n, config.eval_seed)
        log.info(
            "evaluated %s seed %d: mean reward %.3f",
            agent, seed, float(np.mean([r.total_reward for r in per_seed[seed]])),
        )
    return EvalReport.from_episodes(config, per_seed)


def compare_agents(
    config: ExperimentConfig,
    agents: list[str],
    checkpoint_dirs: dict[str, str] | None = None,
    cache_dir: str | None = None,
) -> list[EvalReport]:
    """Evaluate several agents under one scenario, paired on realizations."""
    from dataclasses import replace

    reports = []
    for name in agents:
        cfg = replace(config, agent=name)
        ckpt = (checkpoint_dirs or {}).get(name)
        reports.append(
            evaluate_agent(cfg, checkpoint_dir=ckpt, cache_dir=cache_dir)
        )
    return reports
