"""Real-time decision-support service.

Wraps trained checkpoints behind a small HTTP API: load a checkpoint, sample
geology, ask for the next steering decision given an observation, or roll a
whole episode. Per-decision inference is a single dense forward pass, fast
enough for at-bit use; the batch experiment workbench stays in the CLI.
"""

from __future__ import annotations

import os
import time
from dataclasses import replace

import numpy as np
from fastapi import FastAPI, HTTPException

from . import __version__
from .envs.metrics import episode_metrics
from .geomodel import (
    default_faulted_params,
    default_layered_params,
    sample_realization_env1,
    sample_realization_env2,
)
from .harness.training import env_step, start_episode
from .harness.workflows import LoadedAgent, load_checkpoint, policy_for
from .neural import forward
from .schemas import (
    AgentInfo,
    AgentListResponse,
    DecideRequest,
    DecideResponse,
    HealthResponse,
    LoadRequest,
    LoadResponse,
    RolloutRequest,
    RolloutResponse,
    SampleRequest,
    SampleResponse,
)

__all__ = ["create_app"]


def _info(name: str, loaded: LoadedAgent) -> AgentInfo:
    meta = loaded.meta
    return AgentInfo(
        name=name,
        env=meta["env"],
        agent=meta["agent"],
        seed=meta["seed"],
        episodes=meta["episodes"],
        digest=meta["digest"],
    )


def create_app(checkpoint_dir: str | None = None) -> FastAPI:
    """Build the service; checkpoints under ``checkpoint_dir`` preload."""
    app = FastAPI(title="steerbench decision service", version=__version__)
    agents: dict[str, LoadedAgent] = {}

    if checkpoint_dir and os.path.isdir(checkpoint_dir):
        for fname in sorted(os.listdir(checkpoint_dir)):
            if fname.endswith(".bin"):
                try:
                    agents[fname[:-4]] = load_checkpoint(os.path.join(checkpoint_dir, fname))
                except (ValueError, KeyError):
                    continue

    @app.get("/health", response_model=HealthResponse)
    def health() -> HealthResponse:
        return HealthResponse(status="ok", version=__version__, loaded_agents=sorted(agents))

    @app.get("/agents", response_model=AgentListResponse)
    def list_agents() -> AgentListResponse:
        return AgentListResponse(agents=[_info(name, a) for name, a in sorted(agents.items())])

    @app.post("/agents/load", response_model=LoadResponse)
    def load_agent(req: LoadRequest) -> LoadResponse:
        if not os.path.exists(req.path):
            raise HTTPException(status_code=404, detail=f"no such checkpoint: {req.path}")
        try:
            loaded = load_checkpoint(req.path)
        except (ValueError, KeyError) as exc:
            raise HTTPException(status_code=400, detail=f"bad checkpoint: {exc}")
        name = req.name or os.path.splitext(os.path.basename(req.path))[0]
        agents[name] = loaded
        return LoadResponse(info=_info(name, loaded))

    def _get(name: str) -> LoadedAgent:
        if name not in agents:
            raise HTTPException(status_code=404, detail=f"agent not loaded: {name}")
        return agents[name]

    @app.post("/decide", response_model=DecideResponse)
    def decide(req: DecideRequest) -> DecideResponse:
        loaded = _get(req.name)
        if loaded.net is None:
            raise HTTPException(status_code=400, detail="decide requires a network checkpoint")
        obs = np.asarray(req.observation, dtype=float)
        if obs.shape != (loaded.net.sizes[0],):
            raise HTTPException(
                status_code=422,
                detail=f"observation must have {loaded.net.sizes[0]} values, got {len(req.observation)}",
            )
        n_actions = loaded.net.sizes[-1]
        if req.legal is None:
            mask = np.ones(n_actions, dtype=bool)
        elif len(req.legal) == n_actions:
            mask = np.asarray(req.legal, dtype=bool)
        else:
            raise HTTPException(status_code=422, detail=f"legal mask must have {n_actions} entries")
        t0 = time.perf_counter()
        q = forward(loaded.net, obs)
        action = int(np.argmax(np.where(mask, q, -np.inf)))
        elapsed = 1000.0 * (time.perf_counter() - t0)
        return DecideResponse(action=action, q_values=[float(v) for v in q], elapsed_ms=elapsed)

    @app.post("/rollout", response_model=RolloutResponse)
    def rollout(req: RolloutRequest) -> RolloutResponse:
        loaded = _get(req.name)
        config = loaded.config
        if req.v_prod is not None:
            config = replace(config, v_prod=req.v_prod)
        if req.w1 is not None:
            config = replace(config, w1=req.w1)
        if req.w2 is not None:
            config = replace(config, w2=req.w2)
        policy = policy_for(config, net=loaded.net, table=loaded.table)
        t0 = time.perf_counter()
        rng = np.random.default_rng(np.random.SeedSequence((config.eval_seed, req.realization_seed)))
        policy_rng = np.random.default_rng(
            np.random.SeedSequence((config.eval_seed, req.realization_seed, 1))
        )
        state = start_episode(config, rng)
        actions = []
        while not state.done:
            action = policy(state, policy_rng)
            actions.append(int(action))
            state, _ = env_step(config, state, action)
        m = episode_metrics(state)
        elapsed = 1000.0 * (time.perf_counter() - t0)
        return RolloutResponse(
            total_reward=m.total_reward,
            contact_pct=m.contact_pct,
            hq_pct=m.hq_pct,
            cost=m.cost,
            value=m.value,
            n_sidetracks=m.n_sidetracks,
            actions=actions,
            trajectory=[float(z) for z in state.tvds],
            elapsed_ms=elapsed,
        )

    @app.post("/realizations/sample", response_model=SampleResponse)
    def sample(req: SampleRequest) -> SampleResponse:
        rng = np.random.default_rng(np.random.SeedSequence((req.seed,)))
        if req.env == "env1":
            real = sample_realization_env1(default_layered_params(), rng)
            return SampleResponse(
                env="env1",
                top=[float(v) for v in real.top],
                bottom=[float(v) for v in real.bottom],
            )
        if req.env == "env2":
            real = sample_realization_env2(default_faulted_params(), rng)
            return SampleResponse(
                env="env2",
                top=[float(v) for v in real.upper],
                bottom=[float(v) for v in real.lower],
                fault_locations=list(real.fault_locations),
                fault_displacements=list(real.fault_displacements),
            )
        raise HTTPException(status_code=422, detail="env must be env1 or env2")

    return app
