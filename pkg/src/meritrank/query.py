"""Executable filter queries over the resource graph.

Grammar (whitespace-insensitive, values with spaces quoted):

    kind:<kind> [<field><op><value> {AND <field><op><value>}]
                [| rank | report | fetch | decide(<id>,...)]

Kinds: person, unit, organization, achievement. Ops: = != >= <= contains.
Clauses conjoin; the AND keyword between them is optional. Directives wire
the matched population straight into the analytics: rank and report use the
caller's newest value system unless one is named explicitly.

Matching semantics (shared by every consumer, deliberately simple):
= / != compare numbers numerically, booleans and strings exactly; >= and <=
apply to numbers only (anything else never matches); contains is substring
on the text form. Membership fields (unit, organization) match either the
referenced resource's id or its display name. An absent field only
satisfies !=.
"""

from __future__ import annotations

import re
import time
from dataclasses import dataclass, field
from typing import Any

from . import ranking
from .errors import (
    EmptyOptions,
    InvalidPopulation,
    NoValueSystem,
    QuerySyntaxError,
    UnknownField,
    UnknownKind,
    UnknownOption,
    UnknownResource,
    UnknownValueSystem,
)
from .state import PlatformState
from .values import ValueSystem

KINDS = ("person", "unit", "organization", "achievement")
DIRECTIVES = ("fetch", "rank", "report", "decide")
OPS = ("=", "!=", ">=", "<=", "contains")

_TOKEN_RE = re.compile(
    r"""\s*(?:
      (?P<quoted>"(?:[^"\\]|\\.)*")
    | (?P<op>!=|>=|<=|=)
    | (?P<punct>[|:(),])
    | (?P<word>[A-Za-z0-9_.\-]+)
    )""",
    re.X,
)

_ACHIEVEMENT_FIELDS = ("id", "owner", "category", "status", "year", "evidence_uri")


@dataclass(frozen=True)
class Clause:
    field: str
    op: str
    value: Any

    def to_doc(self) -> dict[str, Any]:
        return {"field": self.field, "op": self.op, "value": self.value}


@dataclass(frozen=True)
class Query:
    kind: str
    clauses: tuple[Clause, ...]
    directive: str = "fetch"
    options: tuple[str, ...] | None = None
    text: str = ""

    def to_doc(self) -> dict[str, Any]:
        return {
            "kind": self.kind,
            "clauses": [c.to_doc() for c in self.clauses],
            "directive": self.directive,
            "options": list(self.options) if self.options is not None else None,
        }


@dataclass
class QueryResult:
    query: Query
    matches: list[str]
    value_system: str | None = None
    ranking: ranking.RankingList | None = None
    ranking_doc: dict[str, Any] | None = None
    reports: list[dict[str, Any]] | None = None
    population_stats: dict[str, dict[str, float]] = field(default_factory=dict)
    elapsed_ms: float = 0.0  # informational; excluded from the wire form

    def to_doc(self) -> dict[str, Any]:
        return {
            "query": self.query.to_doc(),
            "matches": list(self.matches),
            "value_system": self.value_system,
            "ranking": self.ranking_doc,
            "reports": self.reports,
        }


def _tokenize(text: str) -> list[tuple[str, Any, int]]:
    tokens = []
    pos = 0
    while pos < len(text):
        match = _TOKEN_RE.match(text, pos)
        if match is None or match.end() == pos:
            raise QuerySyntaxError(f"unexpected character {text[pos]!r}", pos)
        if match.lastgroup == "quoted":
            raw = match.group("quoted")
            tokens.append(("value", raw[1:-1].replace('\\"', '"').replace("\\\\", "\\"), match.start()))
        elif match.lastgroup == "op":
            tokens.append(("op", match.group("op"), match.start()))
        elif match.lastgroup == "punct":
            tokens.append((match.group("punct"), match.group("punct"), match.start()))
        elif match.lastgroup == "word":
            tokens.append(("word", match.group("word"), match.start()))
        pos = match.end()
    return tokens


def _coerce(raw: str) -> Any:
    if re.fullmatch(r"-?\d+", raw):
        return int(raw)
    try:
        return float(raw)
    except ValueError:
        pass
    if raw == "true":
        return True
    if raw == "false":
        return False
    return raw


def fields_for_kind(kind: str, schema) -> set[str]:
    if kind == "achievement":
        return set(_ACHIEVEMENT_FIELDS) | schema.all_attribute_names()
    base = {"id", "display_name", "name"}
    if kind == "person":
        base |= {"unit", "organization"}
    elif kind == "unit":
        base |= {"organization"}
    return base


def parse_query(text: str, schema) -> Query:
    if not text or not text.strip():
        raise QuerySyntaxError("empty query", 0)
    tokens = _tokenize(text)
    i = 0

    def need(token_type: str, what: str):
        nonlocal i
        if i >= len(tokens):
            raise QuerySyntaxError(f"expected {what}", len(text))
        kind, value, pos = tokens[i]
        if kind != token_type:
            raise QuerySyntaxError(f"expected {what}, got {value!r}", pos)
        i += 1
        return value, pos

    word, pos = need("word", "'kind'")
    if word != "kind":
        raise QuerySyntaxError("query must start with 'kind:<kind>'", pos)
    need(":", "':' after 'kind'")
    kind_value, kind_pos = need("word", "a target kind")
    if kind_value not in KINDS:
        raise UnknownKind(f"unknown kind {kind_value!r}")
    allowed = fields_for_kind(kind_value, schema)

    clauses: list[Clause] = []
    directive = "fetch"
    options: tuple[str, ...] | None = None
    while i < len(tokens):
        token_type, value, pos = tokens[i]
        if token_type == "|":
            i += 1
            name, name_pos = need("word", "a directive after '|'")
            if name not in DIRECTIVES:
                raise QuerySyntaxError(f"unknown directive {name!r}", name_pos)
            directive = name
            if name == "decide":
                need("(", "'(' after decide")
                ids = []
                while True:
                    option_id, _ = need("word", "an option id")
                    ids.append(option_id)
                    token_type2, value2, pos2 = (
                        tokens[i] if i < len(tokens) else (None, None, len(text))
                    )
                    if token_type2 == ",":
                        i += 1
                        continue
                    if token_type2 == ")":
                        i += 1
                        break
                    raise QuerySyntaxError("expected ',' or ')' in decide(...)", pos2)
                options = tuple(ids)
            if i < len(tokens):
                raise QuerySyntaxError("trailing input after directive", tokens[i][2])
            break
        if token_type == "word" and value.lower() == "and" and clauses:
            i += 1
            continue
        if token_type != "word":
            raise QuerySyntaxError(f"expected a field name, got {value!r}", pos)
        field_name = value
        i += 1
        if i < len(tokens) and tokens[i][0] == "word" and tokens[i][1] == "contains":
            op = "contains"
            i += 1
        else:
            op, _ = need("op", "an operator")
        if i >= len(tokens) or tokens[i][0] not in ("word", "value"):
            raise QuerySyntaxError(
                "expected a value", tokens[i][2] if i < len(tokens) else len(text)
            )
        token_type3, raw_value, _ = tokens[i]
        i += 1
        literal = _coerce(raw_value) if token_type3 == "word" else raw_value
        if field_name not in allowed:
            raise UnknownField(
                f"field {field_name!r} is not queryable for kind {kind_value!r}"
            )
        clauses.append(Clause(field=field_name, op=op, value=literal))
    return Query(
        kind=kind_value,
        clauses=tuple(clauses),
        directive=directive,
        options=options,
        text=text,
    )


# --- matching ---------------------------------------------------------------


def _numeric(value: Any) -> float | None:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        return None
    return float(value)


def _scalar_match(value: Any, op: str, literal: Any) -> bool:
    if value is None:
        return op == "!="
    if op in (">=", "<="):
        left, right = _numeric(value), _numeric(literal)
        if left is None or right is None:
            return False
        return left >= right if op == ">=" else left <= right
    if op == "contains":
        return str(literal) in str(value)
    if isinstance(value, bool) or isinstance(literal, bool):
        equal = isinstance(value, bool) and isinstance(literal, bool) and value == literal
    else:
        left, right = _numeric(value), _numeric(literal)
        if left is not None and right is not None:
            equal = left == right
        else:
            equal = isinstance(value, str) and isinstance(literal, str) and value == literal
    return equal if op == "=" else not equal


def _reference_match(refs: set[str], op: str, literal: Any) -> bool:
    text = str(literal)
    if op == "=":
        return text in refs
    if op == "!=":
        return text not in refs
    if op == "contains":
        return any(text in ref for ref in refs)
    return False


def _resource_refs(state: PlatformState, resource_id: str | None) -> set[str]:
    if resource_id is None:
        return set()
    resource = state.graph.resources.get(resource_id)
    if resource is None:
        return set()
    return {resource.id, resource.display_name}


def matches_clause(state: PlatformState, kind: str, entity: Any, clause: Clause) -> bool:
    if kind == "achievement":
        if clause.field in _ACHIEVEMENT_FIELDS:
            return _scalar_match(getattr(entity, clause.field), clause.op, clause.value)
        return _scalar_match(
            entity.attributes.get(clause.field), clause.op, clause.value
        )
    if clause.field == "id":
        return _scalar_match(entity.id, clause.op, clause.value)
    if clause.field in ("display_name", "name"):
        return _scalar_match(entity.display_name, clause.op, clause.value)
    if clause.field == "unit":
        return _reference_match(
            _resource_refs(state, entity.member_of), clause.op, clause.value
        )
    if clause.field == "organization":
        if kind == "unit":
            return _reference_match(
                _resource_refs(state, entity.member_of), clause.op, clause.value
            )
        unit = state.graph.resources.get(entity.member_of) if entity.member_of else None
        parent = unit.member_of if unit else None
        return _reference_match(_resource_refs(state, parent), clause.op, clause.value)
    return False


def resolve_matches(state: PlatformState, query: Query) -> list[str]:
    """Ids of every entity satisfying all clauses, ascending."""
    if query.kind == "achievement":
        candidates = [
            state.graph.achievements[key] for key in sorted(state.graph.achievements)
        ]
    else:
        candidates = [
            state.graph.resources[key]
            for key in sorted(state.graph.resources)
            if state.graph.resources[key].kind == query.kind
        ]
    return [
        entity.id
        for entity in candidates
        if all(matches_clause(state, query.kind, entity, c) for c in query.clauses)
    ]


def _resolve_value_system(
    state: PlatformState, caller: str | None, value_system: str | None
) -> ValueSystem:
    if value_system is not None:
        vs = state.value_systems.get(value_system)
        if vs is None:
            raise UnknownValueSystem(f"value system {value_system!r} does not exist")
        return vs
    if caller is None:
        raise NoValueSystem("no caller and no explicit value system given")
    resource = state.graph.resource(caller)
    if resource.psv is None or resource.psv not in state.value_systems:
        raise NoValueSystem(f"caller {caller!r} has no value system")
    return state.value_systems[resource.psv]


def execute(
    state: PlatformState,
    query: Query | str,
    caller: str | None = None,
    value_system: str | None = None,
) -> QueryResult:
    """Resolve the population and run whatever analytics the query asked for."""
    started = time.perf_counter()
    if isinstance(query, str):
        query = parse_query(query, state.graph.schema)
    if caller is not None:
        state.graph.resource(caller)  # callers must be registered
    matches = resolve_matches(state, query)
    result = QueryResult(query=query, matches=matches)
    if query.directive in ("rank", "report"):
        if query.kind == "achievement":
            raise InvalidPopulation("achievements cannot be ranked")
        vs = _resolve_value_system(state, caller, value_system)
        result.value_system = vs.id
        if not matches:
            result.ranking_doc = ranking.empty_ranking(vs.id)
            result.reports = [] if query.directive == "report" else None
        else:
            population = ranking.Population(ids=tuple(matches), kind=query.kind)
            ranked = ranking.rank(state.graph, population, vs)
            result.ranking = ranked
            result.ranking_doc = ranked.to_doc()
            result.population_stats = _population_stats(ranked)
            if query.directive == "report":
                result.reports = [
                    ranking.assessment_report(state.graph, rid, vs, population)
                    for rid in matches
                ]
    elif query.directive == "decide":
        raise EmptyOptions(
            "decide queries need decision options; submit them with the query"
        )
    result.elapsed_ms = (time.perf_counter() - started) * 1000.0
    return result


def _population_stats(ranked: ranking.RankingList) -> dict[str, dict[str, float]]:
    stats: dict[str, dict[str, float]] = {}
    if not ranked.entries:
        return stats
    for indicator_id in sorted(ranked.entries[0].per_indicator):
        raws = [e.per_indicator[indicator_id]["raw"] for e in ranked.entries]
        stats[indicator_id] = {"min": min(raws), "max": max(raws)}
    return stats


def decide(
    state: PlatformState,
    query: Query | str,
    options: list[tuple[str, list[str]]],
    caller: str | None = None,
    value_system: str | None = None,
) -> dict[str, Any]:
    """Rank explicit decision options by the mean score of their linked resources."""
    if isinstance(query, str):
        query = parse_query(query, state.graph.schema)
    if not options:
        raise EmptyOptions("no decision options supplied")
    by_id = {}
    for option_id, linked in options:
        if not linked:
            raise EmptyOptions(f"option {option_id!r} links no resources")
        by_id[option_id] = list(linked)
    if query.options is not None:
        for requested in query.options:
            if requested not in by_id:
                raise UnknownOption(
                    f"option {requested!r} named in the query was not supplied"
                )
        by_id = {k: by_id[k] for k in query.options}
    for linked in by_id.values():
        for resource_id in linked:
            if resource_id not in state.graph.resources:
                raise UnknownResource(f"linked resource {resource_id!r} does not exist")
    if caller is not None:
        state.graph.resource(caller)
    vs = _resolve_value_system(state, caller, value_system)
    matches = resolve_matches(state, query)
    if not matches:
        raise InvalidPopulation("decision query matched an empty population")
    population = ranking.Population(ids=tuple(matches), kind=query.kind)
    entries = {
        e.resource: e for e in ranking.score_population(state.graph, population, vs)
    }
    scored = []
    for option_id in sorted(by_id):
        linked = by_id[option_id]
        for resource_id in linked:
            if resource_id not in entries:
                raise UnknownResource(
                    f"option {option_id!r} links {resource_id!r}, which is outside "
                    "the query population"
                )
        mean_score = sum(entries[r].score for r in sorted(linked)) / len(linked)
        scored.append((option_id, mean_score, linked))
    scored.sort(key=lambda item: (-item[1], item[0]))
    return {
        "query": query.to_doc(),
        "value_system": vs.id,
        "population": {"ids": list(population.ids), "hash": population.context_hash()},
        "options": [
            {"id": option_id, "score": score_value, "rank": i + 1, "resources": linked}
            for i, (option_id, score_value, linked) in enumerate(scored)
        ],
    }


def explain(result: QueryResult) -> dict[str, Any]:
    """Provenance for a query result: filters, value system, normalization stats."""
    doc: dict[str, Any] = {
        "kind": result.query.kind,
        "filters": [c.to_doc() for c in result.query.clauses],
        "directive": result.query.directive,
        "matches": list(result.matches),
    }
    if result.value_system is not None:
        doc["value_system"] = result.value_system
        doc["population_stats"] = {
            k: dict(v) for k, v in sorted(result.population_stats.items())
        }
        doc["tie_break"] = "descending score, ties by ascending resource id"
    return doc
