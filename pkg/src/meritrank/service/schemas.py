"""Pydantic request models for the HTTP gateway."""

from __future__ import annotations

from typing import Any, Literal

from pydantic import BaseModel, Field


class ResourceCreate(BaseModel):
    kind: Literal["person", "unit", "organization"]
    display_name: str
    member_of: str | None = None
    id: str | None = None


class AchievementCreate(BaseModel):
    category: str
    attributes: dict[str, Any] = Field(default_factory=dict)
    year: int
    evidence_uri: str | None = None


class VerificationUpdate(BaseModel):
    status: str
    actor: str
    evidence_uri: str | None = None


class ValueSystemCreate(BaseModel):
    owner: str
    weights: dict[str, float]
    label: str = ""
    id: str | None = None


class AggregateRequest(BaseModel):
    method: Literal["mean", "median", "leader"]
    psv_ids: list[str]
    leader: str | None = None
    label: str = ""
    id: str | None = None


class IndicatorCreate(BaseModel):
    id: str
    label: str
    category: str
    attribute: str
    aggregation: Literal["sum", "count", "max"] = "sum"
    status_floor: Literal["reported", "verified"] = "reported"


class QueryRequest(BaseModel):
    text: str
    caller: str | None = None
    value_system: str | None = None


class DecisionOption(BaseModel):
    id: str
    resources: list[str]


class DecisionRequest(BaseModel):
    text: str
    options: list[DecisionOption]
    caller: str | None = None
    value_system: str | None = None


class AchievementPayload(BaseModel):
    owner: str
    category: str
    attributes: dict[str, Any] = Field(default_factory=dict)
    year: int
    evidence_uri: str | None = None


class LeagueInitRequest(BaseModel):
    sizes: list[int]
    seed_vs: str
    exchange_count: int = 3
    members: list[str] | None = None


class EpochRequest(BaseModel):
    achievements: list[AchievementPayload] = Field(default_factory=list)


class SimulateRequest(BaseModel):
    epochs: int
    seed: int
    increments: dict[str, tuple[int, int]] = Field(default_factory=dict)
    year: int = 2000
