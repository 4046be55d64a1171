"""Scoring and ranking: raw indicator values + a value system -> ordered list.

The pipeline is fixed and fully deterministic:

1. extract each indicator's raw values for the whole population,
2. min-max normalize per indicator relative to that population
   (a non-discriminating indicator, max == min, contributes 0 to everyone),
3. score = sum of normalized_weight * normalized_value, accumulated in
   ascending indicator-id order (the order is part of the contract: equal
   inputs must produce byte-identical results),
4. order entries by descending score, ties broken by ascending resource id.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Mapping

from .canon import digest_hex
from .domain import RESOURCE_KINDS, ResourceGraph
from .errors import (
    InvalidPopulation,
    NonFiniteInput,
    PopulationMismatch,
    ResourceNotInPopulation,
)
from .values import ValueSystem, normalized_weights


@dataclass(frozen=True)
class Population:
    """Homogeneous group of resources plus the evaluation context."""

    ids: tuple[str, ...]
    kind: str
    as_of_year: int | None = None
    floor_overrides: Mapping[str, str] = field(default_factory=dict)

    def __post_init__(self):
        if not self.ids:
            raise InvalidPopulation("population must not be empty")
        if len(set(self.ids)) != len(self.ids):
            raise InvalidPopulation("population contains duplicate ids")
        if self.kind not in RESOURCE_KINDS:
            raise InvalidPopulation(f"unknown population kind {self.kind!r}")
        object.__setattr__(self, "ids", tuple(self.ids))

    def context_hash(self) -> str:
        return digest_hex(
            {
                "ids": list(self.ids),
                "kind": self.kind,
                "as_of_year": self.as_of_year,
                "floors": dict(self.floor_overrides),
            }
        )


@dataclass
class ScoredEntry:
    resource: str
    score: float
    per_indicator: dict[str, dict[str, float]]  # raw/normalized/weight/contribution

    def to_doc(self) -> dict[str, Any]:
        return {
            "resource": self.resource,
            "score": self.score,
            "per_indicator": {k: dict(v) for k, v in self.per_indicator.items()},
        }


@dataclass
class RankingList:
    value_system: str
    population: Population
    entries: list[ScoredEntry]  # in rank order
    created_at: str = ""  # informational; never serialized (results must be stable)

    def order(self) -> list[str]:
        return [e.resource for e in self.entries]

    def to_doc(self) -> dict[str, Any]:
        return {
            "value_system": self.value_system,
            "population": {
                "ids": list(self.population.ids),
                "hash": self.population.context_hash(),
            },
            "entries": [
                {**entry.to_doc(), "rank": i + 1}
                for i, entry in enumerate(self.entries)
            ],
        }


def empty_ranking(value_system: str) -> dict[str, Any]:
    """Wire form for a rank request that matched nothing."""
    empty_context = {"ids": [], "kind": None, "as_of_year": None, "floors": {}}
    return {
        "value_system": value_system,
        "population": {"ids": [], "hash": digest_hex(empty_context)},
        "entries": [],
    }


def normalize_indicator(raw_values: list[float]) -> list[float]:
    """Min-max normalization onto [0, 1]; degenerate vectors map to all 0."""
    if not raw_values:
        raise InvalidPopulation("cannot normalize an empty vector")
    for value in raw_values:
        if not math.isfinite(value):
            raise NonFiniteInput(f"raw indicator value {value!r} is not finite")
    lo, hi = min(raw_values), max(raw_values)
    if hi == lo:
        return [0.0 for _ in raw_values]
    span = hi - lo
    return [(value - lo) / span for value in raw_values]


def score_population(
    graph: ResourceGraph, population: Population, vs: ValueSystem
) -> list[ScoredEntry]:
    """Score every population member under the value system (unordered)."""
    for resource_id in population.ids:
        resource = graph.resource(resource_id)
        if resource.kind != population.kind:
            raise InvalidPopulation(
                f"resource {resource_id!r} is a {resource.kind}, "
                f"population is of kind {population.kind}"
            )
    weights = normalized_weights(vs)
    indicator_ids = sorted(weights)
    raw: dict[str, list[float]] = {}
    norm: dict[str, list[float]] = {}
    for indicator_id in indicator_ids:
        raw[indicator_id] = [
            graph.raw_indicator_value(
                resource_id,
                indicator_id,
                as_of_year=population.as_of_year,
                floor_override=population.floor_overrides.get(indicator_id),
            )
            for resource_id in population.ids
        ]
        norm[indicator_id] = normalize_indicator(raw[indicator_id])
    entries = []
    for i, resource_id in enumerate(population.ids):
        per_indicator = {}
        total = 0.0
        for indicator_id in indicator_ids:
            weight = weights[indicator_id]
            contribution = weight * norm[indicator_id][i]
            per_indicator[indicator_id] = {
                "raw": raw[indicator_id][i],
                "normalized": norm[indicator_id][i],
                "weight": weight,
                "contribution": contribution,
            }
            total += contribution
        entries.append(
            ScoredEntry(resource=resource_id, score=total, per_indicator=per_indicator)
        )
    return entries


def score(
    graph: ResourceGraph, resource_id: str, vs: ValueSystem, population: Population
) -> ScoredEntry:
    if resource_id not in population.ids:
        raise ResourceNotInPopulation(
            f"resource {resource_id!r} is not part of the evaluated population"
        )
    entries = score_population(graph, population, vs)
    return next(e for e in entries if e.resource == resource_id)


def rank(
    graph: ResourceGraph,
    population: Population,
    vs: ValueSystem,
    created_at: str = "",
) -> RankingList:
    entries = score_population(graph, population, vs)
    entries.sort(key=lambda e: (-e.score, e.resource))
    return RankingList(
        value_system=vs.id,
        population=population,
        entries=entries,
        created_at=created_at,
    )


def assessment_report(
    graph: ResourceGraph, resource_id: str, vs: ValueSystem, population: Population
) -> dict[str, Any]:
    """Rank-aware breakdown for one resource.

    An indicator is flagged as undervalued when the resource tops the raw
    values for it but the value system grants it less than uniform weight.
    """
    ranking = rank(graph, population, vs)
    position = ranking.order().index(resource_id) + 1 if resource_id in ranking.order() else None
    if position is None:
        raise ResourceNotInPopulation(
            f"resource {resource_id!r} is not part of the evaluated population"
        )
    entry = ranking.entries[position - 1]
    n = len(ranking.entries)
    below = sum(1 for other in ranking.entries if other.score < entry.score)
    percentile = 100.0 * below / n
    indicator_ids = sorted(entry.per_indicator)
    strongest = max(indicator_ids, key=lambda k: (entry.per_indicator[k]["contribution"], k))
    weakest = min(indicator_ids, key=lambda k: (entry.per_indicator[k]["contribution"], k))
    uniform = 1.0 / len(indicator_ids)
    undervalued = []
    for indicator_id in indicator_ids:
        detail = entry.per_indicator[indicator_id]
        raw_rank = 1 + sum(
            1
            for other in ranking.entries
            if other.resource != resource_id
            and other.per_indicator[indicator_id]["raw"] > detail["raw"]
        )
        detail["raw_rank"] = raw_rank
        if raw_rank == 1 and detail["weight"] < uniform and detail["raw"] > 0:
            undervalued.append(indicator_id)
    return {
        "resource": resource_id,
        "value_system": vs.id,
        "score": entry.score,
        "rank": position,
        "percentile": percentile,
        "population": {
            "ids": list(population.ids),
            "hash": population.context_hash(),
            "size": n,
        },
        "per_indicator": entry.per_indicator,
        "strongest": strongest,
        "weakest": weakest,
        "undervalued": undervalued,
    }


def compare_rankings(list_a: RankingList, list_b: RankingList) -> dict[str, Any]:
    """Per-resource rank deltas and the Kendall tau distance between orders."""
    order_a = list_a.order()
    order_b = list_b.order()
    if set(order_a) != set(order_b):
        raise PopulationMismatch("rankings cover different populations")
    if list_a.population.context_hash() != list_b.population.context_hash():
        raise PopulationMismatch("rankings were evaluated in different contexts")
    rank_a = {r: i + 1 for i, r in enumerate(order_a)}
    rank_b = {r: i + 1 for i, r in enumerate(order_b)}
    deltas = {r: rank_a[r] - rank_b[r] for r in sorted(rank_a)}
    ids = sorted(rank_a)
    discordant = 0
    for i in range(len(ids)):
        for j in range(i + 1, len(ids)):
            x, y = ids[i], ids[j]
            if (rank_a[x] - rank_a[y]) * (rank_b[x] - rank_b[y]) < 0:
                discordant += 1
    return {
        "value_system_a": list_a.value_system,
        "value_system_b": list_b.value_system,
        "population": {
            "ids": list(list_a.population.ids),
            "hash": list_a.population.context_hash(),
        },
        "deltas": deltas,
        "kendall_tau_distance": discordant,
    }
