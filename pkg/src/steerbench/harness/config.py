"""Experiment configuration: defaults, INI loading, and digests.

Config files use four INI sections (geomodel, env, agent, harness). Keys
are validated strictly: an unknown section or key raises instead of being
silently ignored, since a typo like "episdoes" would otherwise waste a
training run. Which geomodel keys are accepted depends on the chosen
environment.
"""

from __future__ import annotations

import configparser
import hashlib
import json
from dataclasses import asdict, dataclass, field, fields, replace

from ..envs.env2 import CostParams
from ..geomodel import (
    FaultedTrendParams,
    FaultSpec,
    ForwardFnParams1,
    default_faulted_params,
    default_layered_params,
)

__all__ = [
    "ConfigError",
    "ExperimentConfig",
    "load_config",
    "config_to_dict",
    "config_from_dict",
    "config_digest",
]

AGENTS = ("greedy", "dsdp", "qlearn", "dqn-sensor", "dqn-posterior")


class ConfigError(ValueError):
    pass


@dataclass
class ExperimentConfig:
    env: str = "env2"
    agent: str = "dqn-sensor"
    layered: ForwardFnParams1 = field(default_factory=default_layered_params)
    faulted: FaultedTrendParams = field(default_factory=default_faulted_params)
    # layered-environment scenario reported by evaluation
    w1: float = 0.67
    w2: float = 0.33
    # Training in the layered environment draws one (w1, w2, perm_low)
    # triple per episode from this pool, so a single agent learns every
    # weighting; w1/w2 above only select which scenario an evaluation
    # reports on.
    train_scenarios: tuple[tuple[float, float, float], ...] = (
        (0.67, 0.33, 100.0),
        (0.41, 0.59, 20.0),
    )
    # faulted-environment scenario
    costs: CostParams = field(default_factory=CostParams)
    v_prod: float | None = None   # None = draw per episode from [v_min, v_max]
    v_min: float = 0.5
    v_max: float = 4.0
    # learner hyperparameters
    lr: float = 1e-3
    reward_scale: float = 1.0   # divides rewards inside TD targets only
    optimizer: str = "adam"
    reward_clip: float = 0.0  # 0 disables; otherwise clip scaled TD rewards to +-clip
    batch_size: int = 64
    updates_per_step: int = 1
    buffer_capacity: int = 50_000
    target_sync_every: int = 500
    eps_start: float = 1.0
    eps_end: float = 0.05
    eps_fraction: float = 0.8
    warmup: int = 1000
    gamma: float = 1.0
    hidden1: int = 128
    hidden2: int = 64
    # analytic agents
    greedy_mc: int = 100
    dsdp_bin_width: float = 0.25
    dsdp_span: float = 8.0
    dsdp_mc: int = 500
    dsdp_seed: int = 7
    # harness
    seeds: int = 5
    base_seed: int = 0
    episodes: int = 3000
    eval_n: int = 1000
    eval_seed: int = 20240
    out: str = "runs/out"

    @property
    def seed_list(self) -> list[int]:
        return [self.base_seed + k for k in range(self.seeds)]


def _parse_bool(raw: str) -> bool:
    low = raw.strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"not a boolean: {raw!r}")


def _parse_candidates(raw: str) -> tuple[float, ...]:
    try:
        return tuple(float(tok) for tok in raw.split(","))
    except ValueError as exc:
        raise ConfigError(f"bad candidate list: {raw!r}") from exc


def _parse_scenarios(raw: str) -> tuple[tuple[float, float, float], ...]:
    """Parse "w1:w2:perm_low, w1:w2:perm_low, ..." into triples."""
    out = []
    for tok in raw.split(","):
        parts = tok.split(":")
        if len(parts) != 3:
            raise ConfigError(f"scenario must be w1:w2:perm_low, got {tok.strip()!r}")
        try:
            out.append(tuple(float(p) for p in parts))
        except ValueError as exc:
            raise ConfigError(f"bad scenario triple: {tok.strip()!r}") from exc
    return tuple(out)


_GEO1_KEYS = {
    "n_points": int,
    "dx": float,
    "mean_top_depth": float,
    "boundary_step_sd": float,
    "smoothing_window": int,
    "thickness_mean": float,
    "thickness_step_sd": float,
    "thickness_min": float,
    "hq_fraction": float,
    "perm_high": float,
    "perm_low": float,
}
_GEO2_KEYS = {
    "n_points": int,
    "spacing": float,
    "top_start": float,
    "dip_per_step": float,
    "thickness": float,
}
_ENV_KEYS = {
    "env": str,
    "w1": float,
    "w2": float,
    "train_scenarios": str,  # comma list of w1:w2:perm_low triples
    "v_prod": str,  # a number or "uniform"
    "v_min": float,
    "v_max": float,
    "drill_cost": float,
    "sidetrack_cost": float,
}
_AGENT_KEYS = {
    "type": str,
    "lr": float,
    "reward_scale": float,
    "reward_clip": float,
    "optimizer": str,
    "batch_size": int,
    "updates_per_step": int,
    "buffer_capacity": int,
    "target_sync_every": int,
    "eps_start": float,
    "eps_end": float,
    "eps_fraction": float,
    "warmup": int,
    "gamma": float,
    "hidden1": int,
    "hidden2": int,
    "greedy_mc": int,
    "dsdp_bin_width": float,
    "dsdp_span": float,
    "dsdp_mc": int,
    "dsdp_seed": int,
}
_HARNESS_KEYS = {
    "seeds": int,
    "base_seed": int,
    "episodes": int,
    "eval_n": int,
    "eval_seed": int,
    "out": str,
}


def _fault_key(key: str):
    """Match fault<N>_candidates / _disp_mean / _disp_sd; N is 1-based."""
    if not key.startswith("fault"):
        return None
    for suffix in ("_candidates", "_disp_mean", "_disp_sd"):
        if key.endswith(suffix):
            num = key[len("fault"):-len(suffix)]
            if num.isdigit() and int(num) >= 1:
                return int(num) - 1, suffix[1:]
    return None


def _apply_geomodel(config: ExperimentConfig, items: dict) -> ExperimentConfig:
    if config.env == "env1":
        known = _GEO1_KEYS
        target = "layered"
    else:
        known = _GEO2_KEYS
        target = "faulted"
    params = getattr(config, target)
    fault_edits: dict[int, dict] = {}
    for key, raw in items.items():
        if config.env == "env2":
            fk = _fault_key(key)
            if fk is not None:
                idx, what = fk
                fault_edits.setdefault(idx, {})[what] = raw
                continue
        if key not in known:
            raise ConfigError(f"unknown [geomodel] key for {config.env}: {key!r}")
        params = replace(params, **{key: known[key](raw)})
    if fault_edits:
        faults = list(params.faults)
        for idx in sorted(fault_edits):
            if idx > len(faults):
                raise ConfigError(f"fault{idx + 1} listed before fault{idx}")
            edits = fault_edits[idx]
            base = faults[idx] if idx < len(faults) else FaultSpec((), 0.0, 1.0)
            spec = FaultSpec(
                candidates=_parse_candidates(edits["candidates"]) if "candidates" in edits else base.candidates,
                disp_mean=float(edits["disp_mean"]) if "disp_mean" in edits else base.disp_mean,
                disp_sd=float(edits["disp_sd"]) if "disp_sd" in edits else base.disp_sd,
            )
            if idx < len(faults):
                faults[idx] = spec
            else:
                faults.append(spec)
        params = replace(params, faults=tuple(faults))
    return replace(config, **{target: params})


def _apply_env(config: ExperimentConfig, items: dict) -> ExperimentConfig:
    updates = {}
    costs = config.costs
    for key, raw in items.items():
        if key not in _ENV_KEYS:
            raise ConfigError(f"unknown [env] key: {key!r}")
        if key == "env":
            if raw not in ("env1", "env2"):
                raise ConfigError(f"env must be env1 or env2, got {raw!r}")
            updates["env"] = raw
        elif key == "v_prod":
            updates["v_prod"] = None if raw.strip().lower() == "uniform" else float(raw)
        elif key == "train_scenarios":
            updates["train_scenarios"] = _parse_scenarios(raw)
        elif key == "drill_cost":
            costs = replace(costs, drill=float(raw))
        elif key == "sidetrack_cost":
            costs = replace(costs, sidetrack=float(raw))
        else:
            updates[key] = _ENV_KEYS[key](raw)
    return replace(config, costs=costs, **updates)


def _apply_agent(config: ExperimentConfig, items: dict) -> ExperimentConfig:
    updates = {}
    for key, raw in items.items():
        if key not in _AGENT_KEYS:
            raise ConfigError(f"unknown [agent] key: {key!r}")
        if key == "type":
            if raw not in AGENTS:
                raise ConfigError(f"unknown agent type: {raw!r}")
            updates["agent"] = raw
        else:
            updates[key] = _AGENT_KEYS[key](raw)
    return replace(config, **updates)


def _apply_harness(config: ExperimentConfig, items: dict) -> ExperimentConfig:
    updates = {}
    for key, raw in items.items():
        if key not in _HARNESS_KEYS:
            raise ConfigError(f"unknown [harness] key: {key!r}")
        updates[key] = _HARNESS_KEYS[key](raw)
    return replace(config, **updates)


def load_config(path: str | None = None, overrides: dict | None = None) -> ExperimentConfig:
    """Build a config from defaults, an optional INI file, and overrides
    (typically command-line flags), in that order of precedence."""
    config = ExperimentConfig()
    sections: dict[str, dict] = {}
    if path is not None:
        parser = configparser.ConfigParser()
        read = parser.read(path)
        if not read:
            raise ConfigError(f"cannot read config file: {path}")
        for section in parser.sections():
            if section not in ("geomodel", "env", "agent", "harness"):
                raise ConfigError(f"unknown config section: [{section}]")
            sections[section] = dict(parser.items(section))
    # The env selector must win before geomodel keys are interpreted.
    env_items = sections.get("env", {})
    overrides = dict(overrides or {})
    if "env" in overrides and overrides["env"] is not None:
        env_items = {**env_items, "env": overrides.pop("env")}
    config = _apply_env(config, env_items)
    if "geomodel" in sections:
        config = _apply_geomodel(config, sections["geomodel"])
    if "agent" in sections:
        config = _apply_agent(config, sections["agent"])
    if "harness" in sections:
        config = _apply_harness(config, sections["harness"])
    for key, value in overrides.items():
        if value is None:
            continue
        if key == "agent":
            if value not in AGENTS:
                raise ConfigError(f"unknown agent type: {value!r}")
            config = replace(config, agent=value)
        elif key == "v_prod":
            config = replace(config, v_prod=None if value == "uniform" else float(value))
        elif key == "perm_low":
            config = replace(config, layered=replace(config.layered, perm_low=float(value)))
        elif hasattr(config, key):
            config = replace(config, **{key: value})
        else:
            raise ConfigError(f"unknown override: {key!r}")
    _validate(config)
    return config


def _validate(config: ExperimentConfig) -> None:
    if config.env not in ("env1", "env2"):
        raise ConfigError(f"env must be env1 or env2, got {config.env!r}")
    if config.agent not in AGENTS:
        raise ConfigError(f"unknown agent type: {config.agent!r}")
    if config.env == "env1" and config.layered.n_points % 10 != 0:
        raise ConfigError("layered n_points must be a multiple of the 10 nodes per stage")
    if config.seeds < 1 or config.episodes < 1 or config.eval_n < 1:
        raise ConfigError("seeds, episodes, and eval_n must be positive")
    if not 0.0 <= config.eps_end <= config.eps_start <= 1.0:
        raise ConfigError("epsilon schedule must satisfy 0 <= eps_end <= eps_start <= 1")
    if not config.train_scenarios:
        raise ConfigError("train_scenarios must list at least one w1:w2:perm_low triple")
    for w1, w2, perm_low in config.train_scenarios:
        if w1 < 0.0 or w2 < 0.0 or abs(w1 + w2 - 1.0) > 1e-9:
            raise ConfigError(f"scenario weights must be nonnegative and sum to 1: {w1}:{w2}")
        if perm_low <= 0.0:
            raise ConfigError(f"scenario perm_low must be positive: {perm_low}")


def config_to_dict(config: ExperimentConfig) -> dict:
    data = asdict(config)
    data["faulted"]["faults"] = [
        {"candidates": list(f.candidates), "disp_mean": f.disp_mean, "disp_sd": f.disp_sd}
        for f in config.faulted.faults
    ]
    return data


def config_from_dict(data: dict) -> ExperimentConfig:
    data = dict(data)
    layered = ForwardFnParams1(**data.pop("layered"))
    faulted_raw = dict(data.pop("faulted"))
    faulted_raw["faults"] = tuple(
        FaultSpec(tuple(f["candidates"]), f["disp_mean"], f["disp_sd"])
        for f in faulted_raw["faults"]
    )
    faulted = FaultedTrendParams(**faulted_raw)
    costs = CostParams(**data.pop("costs"))
    if "train_scenarios" in data:
        data["train_scenarios"] = tuple(
            tuple(float(x) for x in triple) for triple in data["train_scenarios"]
        )
    known = {f.name for f in fields(ExperimentConfig)}
    unknown = set(data) - known
    if unknown:
        raise ConfigError(f"unknown config fields: {sorted(unknown)}")
    return ExperimentConfig(layered=layered, faulted=faulted, costs=costs, **data)


def config_digest(config: ExperimentConfig) -> str:
    """Digest of everything that affects results (the output path does not)."""
    data = config_to_dict(config)
    data.pop("out")
    return hashlib.sha256(json.dumps(data, sort_keys=True).encode()).hexdigest()[:16]
