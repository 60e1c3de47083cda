"""Pydantic request/response models for the HTTP service.

Traces travel as the same comma-separated text used by the trace files,
so clients and files stay interchangeable.
"""

from __future__ import annotations

from typing import Optional

from pydantic import BaseModel, Field


class HealthResponse(BaseModel):
    status: str
    version: str


class TrainRequest(BaseModel):
    traces: list[str] = Field(min_length=2,
                              description="accel traces in t_ms,ax,ay,az text")
    n: int = 100
    axis_rule: str = "mean"


class TemplateInfo(BaseModel):
    template_id: str
    n: int
    axis_rule: str
    threshold: float
    created_from: int


class PolicyRequest(BaseModel):
    service: str
    kind: str
    template_id: Optional[str] = None
    capture_window_ms: int = 2000


class PolicyInfo(BaseModel):
    service: str
    kind: str
    template_id: Optional[str]
    capture_window_ms: int


class DatabaseInfo(BaseModel):
    version: int
    policies: list[PolicyInfo]
    templates: list[TemplateInfo]


class MatchRequest(BaseModel):
    template_id: str
    trace: str


class MatchResponse(BaseModel):
    score: float
    matched: bool


class ProxChangeRequest(BaseModel):
    t: int = Field(ge=0)


class UnlockWindowInfo(BaseModel):
    start: int
    end: int


class ProxChangeResponse(BaseModel):
    unlock: Optional[UnlockWindowInfo] = None


class UnlockedResponse(BaseModel):
    unlocked: bool


class CheckRequest(BaseModel):
    app_id: str
    service: str
    t: int = Field(ge=0)
    accel_trace: Optional[str] = None
    wait_forward_ms: int = 0


class DecisionResponse(BaseModel):
    outcome: str
    reason: str
    score: Optional[float] = None
