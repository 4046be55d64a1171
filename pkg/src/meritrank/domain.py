"""Resource graph: typed registry of resources, achievements and indicators.

Everything stored here validates against an explicit schema registry: which
achievement categories exist, which attributes each category declares (and
their scalar type), and which indicator definitions may extract from them.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Any

from .errors import (
    CycleDetected,
    DuplicateId,
    IllegalTransition,
    InvalidIdentifier,
    KindMismatch,
    MissingEvidence,
    SchemaViolation,
    UnknownAchievement,
    UnknownAttribute,
    UnknownIndicator,
    UnknownOwner,
    UnknownParent,
    UnknownResource,
    YearOutOfRange,
)

ID_PATTERN = re.compile(r"^[a-z0-9_-]{1,64}$")

RESOURCE_KINDS = ("person", "unit", "organization")
# kind of the resource a member_of reference must point at
PARENT_KIND = {"person": "unit", "unit": "organization", "organization": None}
ID_PREFIX = {"person": "p", "unit": "u", "organization": "org"}

STATUSES = ("reported", "evidence_attached", "verified", "disputed")
STATUS_EDGES = {
    ("reported", "evidence_attached"),
    ("evidence_attached", "verified"),
    ("evidence_attached", "disputed"),
    ("disputed", "evidence_attached"),
}
# statuses that satisfy a given extraction floor; disputed never scores
FLOOR_ACCEPTS = {
    "reported": ("reported", "evidence_attached", "verified"),
    "verified": ("verified",),
}

AGGREGATIONS = ("sum", "count", "max")
ATTRIBUTE_TYPES = ("number", "text", "boolean")
YEAR_MIN, YEAR_MAX = 1900, 2100


def validate_identifier(value: str, what: str) -> str:
    if not isinstance(value, str) or not ID_PATTERN.fullmatch(value):
        raise InvalidIdentifier(
            f"{what} {value!r} must match [a-z0-9_-]{{1,64}}"
        )
    return value


@dataclass
class Resource:
    id: str
    kind: str
    display_name: str
    member_of: str | None = None
    registered_at: str = ""
    psv: str | None = None

    def to_doc(self) -> dict[str, Any]:
        return {
            "id": self.id,
            "kind": self.kind,
            "display_name": self.display_name,
            "member_of": self.member_of,
            "registered_at": self.registered_at,
            "psv": self.psv,
        }

    @classmethod
    def from_doc(cls, doc: dict[str, Any]) -> "Resource":
        return cls(
            id=doc["id"],
            kind=doc["kind"],
            display_name=doc["display_name"],
            member_of=doc.get("member_of"),
            registered_at=doc.get("registered_at", ""),
            psv=doc.get("psv"),
        )


@dataclass
class Achievement:
    id: str
    owner: str
    category: str
    attributes: dict[str, Any]
    year: int
    evidence_uri: str | None = None
    status: str = "reported"

    def to_doc(self) -> dict[str, Any]:
        return {
            "id": self.id,
            "owner": self.owner,
            "category": self.category,
            "attributes": dict(self.attributes),
            "year": self.year,
            "evidence_uri": self.evidence_uri,
            "status": self.status,
        }

    @classmethod
    def from_doc(cls, doc: dict[str, Any]) -> "Achievement":
        return cls(
            id=doc["id"],
            owner=doc["owner"],
            category=doc["category"],
            attributes=dict(doc["attributes"]),
            year=doc["year"],
            evidence_uri=doc.get("evidence_uri"),
            status=doc.get("status", "reported"),
        )


@dataclass
class Indicator:
    """Declarative extraction rule for one quality measure.

    ``aggregation`` folds the matching achievements' attribute values:
    sum and max read the (numeric) attribute, count counts achievements
    that carry the attribute at all. ``status_floor`` is the minimum
    verification level an achievement needs to be counted.
    """

    id: str
    label: str
    category: str
    attribute: str
    aggregation: str = "sum"
    status_floor: str = "reported"
    direction: str = "higher_is_better"

    def to_doc(self) -> dict[str, Any]:
        return {
            "id": self.id,
            "label": self.label,
            "category": self.category,
            "attribute": self.attribute,
            "aggregation": self.aggregation,
            "status_floor": self.status_floor,
            "direction": self.direction,
        }

    @classmethod
    def from_doc(cls, doc: dict[str, Any]) -> "Indicator":
        return cls(
            id=doc["id"],
            label=doc["label"],
            category=doc["category"],
            attribute=doc["attribute"],
            aggregation=doc.get("aggregation", "sum"),
            status_floor=doc.get("status_floor", "reported"),
            direction=doc.get("direction", "higher_is_better"),
        )


@dataclass
class SchemaRegistry:
    """Declared achievement categories and their attribute names/types."""

    categories: dict[str, dict[str, str]] = field(default_factory=dict)

    def declare_category(self, category: str, attributes: dict[str, str]) -> None:
        validate_identifier(category, "category")
        for name, attr_type in attributes.items():
            validate_identifier(name, "attribute")
            if attr_type not in ATTRIBUTE_TYPES:
                raise SchemaViolation(
                    f"attribute type {attr_type!r} not one of {ATTRIBUTE_TYPES}"
                )
        self.categories[category] = dict(attributes)

    def attribute_type(self, category: str, attribute: str) -> str | None:
        return self.categories.get(category, {}).get(attribute)

    def validate_achievement(self, category: str, attributes: dict[str, Any]) -> None:
        if category not in self.categories:
            raise SchemaViolation(f"category {category!r} is not registered")
        declared = self.categories[category]
        for name, value in attributes.items():
            if name not in declared:
                raise SchemaViolation(
                    f"attribute {name!r} is not declared for category {category!r}"
                )
            expected = declared[name]
            if expected == "number":
                ok = isinstance(value, (int, float)) and not isinstance(value, bool)
            elif expected == "boolean":
                ok = isinstance(value, bool)
            else:
                ok = isinstance(value, str)
            if not ok:
                raise SchemaViolation(
                    f"attribute {name!r} of category {category!r} must be {expected}"
                )

    def all_attribute_names(self) -> set[str]:
        names: set[str] = set()
        for attrs in self.categories.values():
            names.update(attrs)
        return names

    def to_doc(self) -> dict[str, Any]:
        return {"categories": {c: dict(a) for c, a in self.categories.items()}}

    @classmethod
    def from_doc(cls, doc: dict[str, Any]) -> "SchemaRegistry":
        return cls(categories={c: dict(a) for c, a in doc["categories"].items()})


def starter_schema() -> SchemaRegistry:
    """Default registry covering the common academic reporting categories."""
    schema = SchemaRegistry()
    schema.declare_category(
        "publication",
        {"impact_factor": "number", "title": "text", "journal": "text"},
    )
    schema.declare_category(
        "citation_record", {"citations": "number", "source": "text"}
    )
    schema.declare_category(
        "project",
        {"intl_partner_count": "number", "title": "text", "funding": "number"},
    )
    schema.declare_category("award", {"title": "text", "level": "text"})
    schema.declare_category("other", {"note": "text"})
    return schema


@dataclass
class ResourceGraph:
    schema: SchemaRegistry
    resources: dict[str, Resource] = field(default_factory=dict)
    achievements: dict[str, Achievement] = field(default_factory=dict)
    indicators: dict[str, Indicator] = field(default_factory=dict)
    # derived indexes, rebuilt on load
    by_owner: dict[str, list[str]] = field(default_factory=dict, compare=False)
    members: dict[str, list[str]] = field(default_factory=dict, compare=False)

    # -- id generation ---------------------------------------------------

    def _fresh_id(self, prefix: str, taken: dict, start: int) -> str:
        n = start
        while f"{prefix}{n}" in taken:
            n += 1
        return f"{prefix}{n}"

    def new_resource_id(self, kind: str) -> str:
        count = sum(1 for r in self.resources.values() if r.kind == kind)
        return self._fresh_id(ID_PREFIX[kind], self.resources, count + 1)

    def new_achievement_id(self) -> str:
        return self._fresh_id("a", self.achievements, len(self.achievements) + 1)

    # -- mutations ---------------------------------------------------------

    def register_resource(
        self,
        kind: str,
        display_name: str,
        member_of: str | None = None,
        resource_id: str | None = None,
        registered_at: str = "",
    ) -> Resource:
        if kind not in RESOURCE_KINDS:
            raise KindMismatch(f"unknown resource kind {kind!r}")
        if not display_name:
            raise SchemaViolation("display_name must be non-empty")
        if resource_id is None:
            resource_id = self.new_resource_id(kind)
        validate_identifier(resource_id, "resource id")
        if resource_id in self.resources:
            raise DuplicateId(f"resource id {resource_id!r} already registered")
        if member_of is not None:
            parent = self.resources.get(member_of)
            if parent is None:
                raise UnknownParent(f"member_of {member_of!r} does not exist")
            expected = PARENT_KIND[kind]
            if expected is None or parent.kind != expected:
                raise KindMismatch(
                    f"a {kind} may only belong to a {expected or 'nothing'}, "
                    f"got {parent.kind} {member_of!r}"
                )
            self._check_acyclic(resource_id, member_of)
        resource = Resource(
            id=resource_id,
            kind=kind,
            display_name=display_name,
            member_of=member_of,
            registered_at=registered_at,
        )
        self.resources[resource_id] = resource
        if member_of is not None:
            self.members.setdefault(member_of, []).append(resource_id)
        return resource

    def _check_acyclic(self, new_id: str, parent_id: str) -> None:
        seen = {new_id}
        current: str | None = parent_id
        while current is not None:
            if current in seen:
                raise CycleDetected(f"membership cycle through {current!r}")
            seen.add(current)
            parent = self.resources.get(current)
            current = parent.member_of if parent else None

    def attach_achievement(
        self,
        owner: str,
        category: str,
        attributes: dict[str, Any],
        year: int,
        evidence_uri: str | None = None,
        achievement_id: str | None = None,
    ) -> Achievement:
        holder = self.resources.get(owner)
        if holder is None or holder.kind != "person":
            raise UnknownOwner(f"owner {owner!r} is not a registered person")
        self.schema.validate_achievement(category, attributes)
        if not isinstance(year, int) or isinstance(year, bool) or not YEAR_MIN <= year <= YEAR_MAX:
            raise YearOutOfRange(f"year {year!r} outside [{YEAR_MIN}, {YEAR_MAX}]")
        if achievement_id is None:
            achievement_id = self.new_achievement_id()
        validate_identifier(achievement_id, "achievement id")
        if achievement_id in self.achievements:
            raise DuplicateId(f"achievement id {achievement_id!r} already exists")
        achievement = Achievement(
            id=achievement_id,
            owner=owner,
            category=category,
            attributes=dict(attributes),
            year=year,
            evidence_uri=evidence_uri,
            status="evidence_attached" if evidence_uri else "reported",
        )
        self.achievements[achievement_id] = achievement
        self.by_owner.setdefault(owner, []).append(achievement_id)
        return achievement

    def set_verification(
        self,
        achievement_id: str,
        new_status: str,
        actor: str,
        evidence_uri: str | None = None,
    ) -> Achievement:
        achievement = self.achievements.get(achievement_id)
        if achievement is None:
            raise UnknownAchievement(f"achievement {achievement_id!r} does not exist")
        if new_status not in STATUSES:
            raise IllegalTransition(f"unknown status {new_status!r}")
        effective_evidence = evidence_uri or achievement.evidence_uri
        if new_status == "verified" and not effective_evidence:
            raise MissingEvidence(
                f"achievement {achievement_id!r} cannot be verified without evidence"
            )
        if (achievement.status, new_status) not in STATUS_EDGES:
            raise IllegalTransition(
                f"no transition {achievement.status} -> {new_status}"
            )
        if evidence_uri:
            achievement.evidence_uri = evidence_uri
        achievement.status = new_status
        return achievement

    def define_indicator(
        self,
        indicator_id: str,
        label: str,
        category: str,
        attribute: str,
        aggregation: str = "sum",
        status_floor: str = "reported",
    ) -> Indicator:
        validate_identifier(indicator_id, "indicator id")
        if indicator_id in self.indicators:
            raise DuplicateId(f"indicator id {indicator_id!r} already defined")
        attr_type = self.schema.attribute_type(category, attribute)
        if attr_type is None:
            raise UnknownAttribute(
                f"attribute {attribute!r} is not registered for category {category!r}"
            )
        if aggregation not in AGGREGATIONS:
            raise SchemaViolation(f"aggregation must be one of {AGGREGATIONS}")
        if status_floor not in FLOOR_ACCEPTS:
            raise SchemaViolation("status_floor must be 'reported' or 'verified'")
        if aggregation in ("sum", "max") and attr_type != "number":
            raise SchemaViolation(
                f"{aggregation} aggregation requires a number attribute, "
                f"{attribute!r} is {attr_type}"
            )
        indicator = Indicator(
            id=indicator_id,
            label=label,
            category=category,
            attribute=attribute,
            aggregation=aggregation,
            status_floor=status_floor,
        )
        self.indicators[indicator_id] = indicator
        return indicator

    # -- reads -------------------------------------------------------------

    def resource(self, resource_id: str) -> Resource:
        resource = self.resources.get(resource_id)
        if resource is None:
            raise UnknownResource(f"resource {resource_id!r} does not exist")
        return resource

    def indicator(self, indicator_id: str) -> Indicator:
        indicator = self.indicators.get(indicator_id)
        if indicator is None:
            raise UnknownIndicator(f"indicator {indicator_id!r} does not exist")
        return indicator

    def raw_indicator_value(
        self,
        resource_id: str,
        indicator_id: str,
        as_of_year: int | None = None,
        floor_override: str | None = None,
    ) -> float:
        """Aggregate an indicator over a resource's achievements.

        Units and organizations roll up as the sum of their member persons'
        values, transitively, for every aggregation kind.
        """
        resource = self.resource(resource_id)
        indicator = self.indicator(indicator_id)
        floor = floor_override or indicator.status_floor
        if resource.kind == "person":
            return self._person_value(resource_id, indicator, floor, as_of_year)
        return sum(
            self.raw_indicator_value(child, indicator_id, as_of_year, floor_override)
            for child in sorted(self.members.get(resource_id, []))
        )

    def _person_value(
        self,
        person_id: str,
        indicator: Indicator,
        floor: str,
        as_of_year: int | None,
    ) -> float:
        accepted = FLOOR_ACCEPTS[floor]
        values = []
        # canonical fold order: results must not depend on attach order
        for achievement_id in sorted(self.by_owner.get(person_id, [])):
            achievement = self.achievements[achievement_id]
            if achievement.category != indicator.category:
                continue
            if achievement.status not in accepted:
                continue
            if as_of_year is not None and achievement.year > as_of_year:
                continue
            if indicator.attribute not in achievement.attributes:
                continue
            values.append(achievement.attributes[indicator.attribute])
        if indicator.aggregation == "count":
            return len(values)
        if not values:
            return 0
        if indicator.aggregation == "sum":
            return sum(values)
        return max(values)

    def rebuild_indexes(self) -> None:
        self.by_owner = {}
        for achievement in self.achievements.values():
            self.by_owner.setdefault(achievement.owner, []).append(achievement.id)
        for ids in self.by_owner.values():
            ids.sort()
        self.members = {}
        for resource in self.resources.values():
            if resource.member_of is not None:
                self.members.setdefault(resource.member_of, []).append(resource.id)
        for ids in self.members.values():
            ids.sort()

    def integrity_problems(self) -> list[str]:
        problems = []
        for resource in self.resources.values():
            if resource.member_of is not None:
                parent = self.resources.get(resource.member_of)
                if parent is None:
                    problems.append(
                        f"resource {resource.id} has dangling member_of {resource.member_of}"
                    )
                elif parent.kind != PARENT_KIND[resource.kind]:
                    problems.append(
                        f"resource {resource.id} belongs to wrong kind {parent.kind}"
                    )
        for achievement in self.achievements.values():
            owner = self.resources.get(achievement.owner)
            if owner is None or owner.kind != "person":
                problems.append(
                    f"achievement {achievement.id} has dangling owner {achievement.owner}"
                )
            if achievement.status not in STATUSES:
                problems.append(
                    f"achievement {achievement.id} has unknown status {achievement.status}"
                )
        for indicator in self.indicators.values():
            if self.schema.attribute_type(indicator.category, indicator.attribute) is None:
                problems.append(
                    f"indicator {indicator.id} references unregistered "
                    f"{indicator.category}.{indicator.attribute}"
                )
        return problems
