"""Request/response models for the decision-support service."""

from __future__ import annotations

from pydantic import BaseModel, Field


class HealthResponse(BaseModel):
    status: str
    version: str
    loaded_agents: list[str]


class LoadRequest(BaseModel):
    path: str = Field(description="Path to a checkpoint file on the server")
    name: str | None = Field(default=None, description="Handle to register; defaults to the filename")


class AgentInfo(BaseModel):
    name: str
    env: str
    agent: str
    seed: int
    episodes: int
    digest: str


class LoadResponse(BaseModel):
    info: AgentInfo


class AgentListResponse(BaseModel):
    agents: list[AgentInfo]


class DecideRequest(BaseModel):
    name: str
    observation: list[float]
    legal: list[bool] | None = Field(
        default=None, description="Legal-action mask; all actions legal when omitted"
    )


class DecideResponse(BaseModel):
    action: int
    q_values: list[float]
    elapsed_ms: float


class RolloutRequest(BaseModel):
    name: str
    realization_seed: int = 0
    v_prod: float | None = Field(default=None, description="Faulted-environment production value")
    w1: float | None = None
    w2: float | None = None


class RolloutResponse(BaseModel):
    total_reward: float
    contact_pct: float
    hq_pct: float | None
    cost: float | None
    value: float | None
    n_sidetracks: int | None
    actions: list[int]
    trajectory: list[float]
    elapsed_ms: float


class SampleRequest(BaseModel):
    env: str
    seed: int = 0


class SampleResponse(BaseModel):
    env: str
    top: list[float]
    bottom: list[float]
    fault_locations: list[float] | None = None
    fault_displacements: list[float] | None = None
