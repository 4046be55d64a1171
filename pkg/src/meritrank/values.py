"""Personal and collective value systems.

A value system is an immutable set of non-negative importance weights over
indicators. Weights are stored exactly as given and normalized at use, so
users can think in relative importance on any scale. Collective systems are
built by aggregating personal ones (mean, median or leader copy).
"""

from __future__ import annotations

import math
import statistics
from dataclasses import dataclass, field
from typing import Any, Iterable, Mapping

from .domain import validate_identifier
from .errors import (
    AllZeroWeights,
    EmptyInput,
    LeaderHasNoPsv,
    NegativeWeight,
    NonFiniteInput,
    UnknownIndicator,
)

COLLECTIVE_OWNER = "collective"

AGGREGATION_METHODS = ("mean", "median", "leader")


@dataclass(frozen=True)
class ValueSystem:
    id: str
    owner: str  # resource id, or "collective"
    weights: dict[str, float] = field(default_factory=dict)
    label: str = ""
    created_at: str = ""

    def to_psv_doc(self) -> dict[str, Any]:
        """Wire/file form. Field names are a published contract."""
        return {
            "id": self.id,
            "owner": self.owner,
            "label": self.label,
            "weights": dict(self.weights),
        }

    def to_state_doc(self) -> dict[str, Any]:
        doc = self.to_psv_doc()
        doc["created_at"] = self.created_at
        return doc

    @classmethod
    def from_doc(cls, doc: dict[str, Any]) -> "ValueSystem":
        return cls(
            id=doc["id"],
            owner=doc["owner"],
            weights=dict(doc["weights"]),
            label=doc.get("label", ""),
            created_at=doc.get("created_at", ""),
        )


def new_value_system_id(existing: Mapping[str, ValueSystem]) -> str:
    n = len(existing) + 1
    while f"vs{n}" in existing:
        n += 1
    return f"vs{n}"


def validate_weights(
    weights: Mapping[str, float], known_indicators: Iterable[str]
) -> None:
    known = set(known_indicators)
    if not weights:
        raise AllZeroWeights("a value system needs at least one positive weight")
    for indicator_id, weight in weights.items():
        validate_identifier(indicator_id, "indicator id")
        if indicator_id not in known:
            raise UnknownIndicator(f"indicator {indicator_id!r} is not defined")
        if isinstance(weight, bool) or not isinstance(weight, (int, float)):
            raise NegativeWeight(f"weight for {indicator_id!r} must be a number")
        if not math.isfinite(weight):
            raise NonFiniteInput(f"weight for {indicator_id!r} must be finite")
        if weight < 0:
            raise NegativeWeight(f"weight for {indicator_id!r} is negative")
    if not any(w > 0 for w in weights.values()):
        raise AllZeroWeights("all weights are zero")


def normalized_weights(vs: ValueSystem) -> dict[str, float]:
    """Weights divided by their sum; output sums to 1 within 1e-12."""
    total = sum(vs.weights[k] for k in sorted(vs.weights))
    return {k: vs.weights[k] / total for k in sorted(vs.weights)}


def aggregate(
    psvs: list[ValueSystem],
    method: str,
    leader_psv: ValueSystem | None = None,
    *,
    vs_id: str,
    label: str = "",
    created_at: str = "",
) -> ValueSystem:
    """Fold personal value systems into one collective system.

    Inputs are normalized over the union of their indicators first
    (an indicator a person never mentioned carries weight 0 for them).
    mean: component-wise arithmetic mean. median: component-wise median,
    renormalized. leader: a copy of the leader's own weights.
    """
    if not psvs:
        raise EmptyInput("cannot aggregate an empty list of value systems")
    if method == "leader":
        if leader_psv is None:
            raise LeaderHasNoPsv("leader aggregation needs the leader's value system")
        weights = dict(leader_psv.weights)
    else:
        if method not in AGGREGATION_METHODS:
            raise ValueError(f"unknown aggregation method {method!r}")
        union = sorted({k for vs in psvs for k in vs.weights})
        vectors = [normalized_weights(vs) for vs in psvs]
        weights = {}
        for indicator_id in union:
            components = [v.get(indicator_id, 0.0) for v in vectors]
            if method == "mean":
                weights[indicator_id] = sum(components) / len(components)
            else:
                weights[indicator_id] = statistics.median(components)
        if method == "median":
            total = sum(weights[k] for k in union)
            if total <= 0:
                raise AllZeroWeights(
                    "component-wise median collapsed to an all-zero vector"
                )
            weights = {k: weights[k] / total for k in union}
    if not label:
        label = f"{method} of {len(psvs)} value systems"
    return ValueSystem(
        id=vs_id,
        owner=COLLECTIVE_OWNER,
        weights=weights,
        label=label,
        created_at=created_at,
    )


def parse_inline_weights(spec: str) -> dict[str, float]:
    """Parse "cit:0.8,hif:0.1" (or "cit=0.8,...") into a weights mapping."""
    from .errors import SchemaViolation

    weights: dict[str, float] = {}
    for part in spec.split(","):
        part = part.strip()
        if not part:
            continue
        separator = ":" if ":" in part else "="
        if separator not in part:
            raise SchemaViolation(f"bad weight entry {part!r}, expected name:value")
        name, _, raw = part.partition(separator)
        try:
            weights[name.strip()] = float(raw)
        except ValueError:
            raise SchemaViolation(f"bad weight value {raw!r} for {name!r}") from None
    if not weights:
        raise SchemaViolation(f"no weights found in {spec!r}")
    return weights


def value_distance(vs_a: ValueSystem, vs_b: ValueSystem) -> float:
    """L1 distance between normalized weight vectors, in [0, 2]."""
    norm_a = normalized_weights(vs_a)
    norm_b = normalized_weights(vs_b)
    union = sorted(set(norm_a) | set(norm_b))
    return sum(abs(norm_a.get(k, 0.0) - norm_b.get(k, 0.0)) for k in union)
