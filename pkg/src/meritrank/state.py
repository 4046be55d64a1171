"""Complete platform state: resource graph, value systems, league."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

from .domain import ResourceGraph, SchemaRegistry, starter_schema
from .league import LeagueState
from .values import ValueSystem


@dataclass
class PlatformState:
    graph: ResourceGraph
    value_systems: dict[str, ValueSystem] = field(default_factory=dict)
    league: LeagueState | None = None

    @classmethod
    def fresh(cls) -> "PlatformState":
        return cls(graph=ResourceGraph(schema=starter_schema()))

    def to_doc(self) -> dict[str, Any]:
        return {
            "schema": self.graph.schema.to_doc(),
            "resources": {r.id: r.to_doc() for r in self.graph.resources.values()},
            "achievements": {
                a.id: a.to_doc() for a in self.graph.achievements.values()
            },
            "indicators": {i.id: i.to_doc() for i in self.graph.indicators.values()},
            "value_systems": {
                v.id: v.to_state_doc() for v in self.value_systems.values()
            },
            "league": self.league.to_doc() if self.league else None,
        }

    @classmethod
    def from_doc(cls, doc: dict[str, Any]) -> "PlatformState":
        from .domain import Achievement, Indicator, Resource

        graph = ResourceGraph(schema=SchemaRegistry.from_doc(doc["schema"]))
        graph.resources = {
            key: Resource.from_doc(value) for key, value in doc["resources"].items()
        }
        graph.achievements = {
            key: Achievement.from_doc(value)
            for key, value in doc["achievements"].items()
        }
        graph.indicators = {
            key: Indicator.from_doc(value) for key, value in doc["indicators"].items()
        }
        graph.rebuild_indexes()
        value_systems = {
            key: ValueSystem.from_doc(value)
            for key, value in doc["value_systems"].items()
        }
        league = LeagueState.from_doc(doc["league"]) if doc.get("league") else None
        return cls(graph=graph, value_systems=value_systems, league=league)


def integrity_problems(state: PlatformState) -> list[str]:
    """Referential integrity across the whole state; empty list means sound."""
    problems = state.graph.integrity_problems()
    for vs in state.value_systems.values():
        for indicator_id in vs.weights:
            if indicator_id not in state.graph.indicators:
                problems.append(
                    f"value system {vs.id} references unknown indicator {indicator_id}"
                )
        if vs.owner != "collective" and vs.owner not in state.graph.resources:
            problems.append(f"value system {vs.id} has dangling owner {vs.owner}")
    for resource in state.graph.resources.values():
        if resource.psv is not None and resource.psv not in state.value_systems:
            problems.append(
                f"resource {resource.id} points at unknown value system {resource.psv}"
            )
    league = state.league
    if league is not None:
        members = league.all_members()
        if len(set(members)) != len(members):
            problems.append("league members overlap between leagues")
        for member in members:
            resource = state.graph.resources.get(member)
            if resource is None or resource.kind != "person":
                problems.append(f"league member {member} is not a registered person")
        for name, expected in zip(("senior", "middle", "junior"), league.config.sizes):
            if len(league.leagues[name]) != expected:
                problems.append(
                    f"league {name} has {len(league.leagues[name])} members, "
                    f"config says {expected}"
                )
            if league.leagues[name] and league.leaders.get(name) != league.leagues[name][0]:
                problems.append(f"leader of {name} is not its top-ranked member")
            if league.leader_psvs.get(name) not in state.value_systems:
                problems.append(f"league {name} leader value system is unresolved")
        if league.seed_vs not in state.value_systems:
            problems.append("league seed value system is unresolved")
    return problems
