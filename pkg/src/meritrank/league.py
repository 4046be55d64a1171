"""Three-tier league model with leader-driven re-ranking and social elevator.

Members are partitioned into senior, middle and junior leagues. Each epoch:

1. newly reported achievements are applied,
2. every league is ranked under its current leader's value system,
3. adjacent leagues exchange members, senior<->middle first, then
   middle<->junior: the bottom p of the upper league swap with the top p
   of the lower league (relegated members land at the bottom of the lower
   league's positional order, so with a large p a just-relegated senior can
   fall again in the same epoch — deterministic and intentional),
4. every league is re-ranked under the same epoch's leader value systems,
5. the top of each league becomes its leader and the leader's own value
   system drives the next epoch's rankings.

A leader without a personal value system falls back to the mean collective
system of their league's members, then to the seed system the league was
initialized with.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

from . import audit, ranking
from .audit import AuditEvent, emit
from .domain import ResourceGraph
from .errors import (
    InvalidConfig,
    InvalidGeneratorConfig,
    LeaderPsvMissing,
    SizeMismatch,
)
from .prng import SplitMix64
from .values import ValueSystem, aggregate, new_value_system_id

LEAGUES = ("senior", "middle", "junior")
DEFAULT_EXCHANGE_COUNT = 3


@dataclass(frozen=True)
class LeagueConfig:
    sizes: tuple[int, int, int]
    exchange_count: int = DEFAULT_EXCHANGE_COUNT

    def __post_init__(self):
        if len(self.sizes) != 3 or any(
            not isinstance(s, int) or isinstance(s, bool) or s < 1 for s in self.sizes
        ):
            raise InvalidConfig("league sizes must be three positive integers")
        if not isinstance(self.exchange_count, int) or self.exchange_count < 1:
            raise InvalidConfig("exchange count must be a positive integer")
        if self.exchange_count > min(self.sizes):
            raise InvalidConfig(
                f"exchange count {self.exchange_count} exceeds the smallest "
                f"league size {min(self.sizes)}"
            )
        object.__setattr__(self, "sizes", tuple(self.sizes))

    def to_doc(self) -> dict[str, Any]:
        return {"sizes": list(self.sizes), "exchange_count": self.exchange_count}

    @classmethod
    def from_doc(cls, doc: dict[str, Any]) -> "LeagueConfig":
        return cls(sizes=tuple(doc["sizes"]), exchange_count=doc["exchange_count"])


@dataclass
class LeagueState:
    epoch: int
    config: LeagueConfig
    leagues: dict[str, list[str]]
    leaders: dict[str, str]
    leader_psvs: dict[str, str]
    seed_vs: str

    def all_members(self) -> list[str]:
        return [m for name in LEAGUES for m in self.leagues[name]]

    def to_doc(self) -> dict[str, Any]:
        return {
            "epoch": self.epoch,
            "config": self.config.to_doc(),
            "leagues": {name: list(self.leagues[name]) for name in LEAGUES},
            "leaders": dict(self.leaders),
            "leader_psvs": dict(self.leader_psvs),
            "seed_vs": self.seed_vs,
        }

    @classmethod
    def from_doc(cls, doc: dict[str, Any]) -> "LeagueState":
        return cls(
            epoch=doc["epoch"],
            config=LeagueConfig.from_doc(doc["config"]),
            leagues={name: list(doc["leagues"][name]) for name in LEAGUES},
            leaders=dict(doc["leaders"]),
            leader_psvs=dict(doc["leader_psvs"]),
            seed_vs=doc["seed_vs"],
        )


def resolve_leader_psv(
    graph: ResourceGraph,
    value_systems: dict[str, ValueSystem],
    leader_id: str,
    league_members: list[str],
    seed_vs: str,
    events: list[AuditEvent],
    epoch: int,
) -> str:
    """Pick the value system a leader rules with; the process never stalls."""
    leader = graph.resource(leader_id)
    if leader.psv is not None and leader.psv in value_systems:
        return leader.psv
    member_psvs = []
    for member_id in league_members:
        psv_id = graph.resources[member_id].psv
        if psv_id is not None and psv_id in value_systems:
            member_psvs.append(value_systems[psv_id])
    if member_psvs:
        vs_id = new_value_system_id(value_systems)
        vs = aggregate(
            member_psvs,
            "mean",
            vs_id=vs_id,
            label=f"league mean around {leader_id}",
        )
        value_systems[vs_id] = vs
        emit(
            events,
            epoch,
            audit.VALUE_SYSTEM_CREATED,
            [vs_id],
            vs.to_state_doc(),
        )
        return vs_id
    if seed_vs in value_systems:
        return seed_vs
    raise LeaderPsvMissing(
        f"no value system resolvable for leader {leader_id!r} and no seed fallback"
    )


def rank_league(
    graph: ResourceGraph,
    value_systems: dict[str, ValueSystem],
    state: LeagueState,
    league: str,
) -> list[str]:
    """Order one league's members under its leader's value system."""
    vs_id = state.leader_psvs[league]
    vs = value_systems.get(vs_id)
    if vs is None:
        raise LeaderPsvMissing(f"value system {vs_id!r} for league {league!r} missing")
    population = ranking.Population(ids=tuple(state.leagues[league]), kind="person")
    return ranking.rank(graph, population, vs).order()


def exchange(
    upper: list[str], lower: list[str], count: int
) -> tuple[list[str], list[str], list[str], list[str]]:
    """Swap the bottom `count` of upper with the top `count` of lower.

    Returns (new_upper, new_lower, relegated, promoted). Promoted members
    are appended to the upper league, relegated members to the bottom of
    the lower league.
    """
    relegated = upper[-count:]
    promoted = lower[:count]
    return upper[:-count] + promoted, lower[count:] + relegated, relegated, promoted


def init_league(
    graph: ResourceGraph,
    value_systems: dict[str, ValueSystem],
    person_ids: list[str],
    seed_vs: str,
    config: LeagueConfig,
    events: list[AuditEvent],
) -> LeagueState:
    if len(set(person_ids)) != len(person_ids):
        raise SizeMismatch("league population contains duplicate ids")
    if len(person_ids) != sum(config.sizes):
        raise SizeMismatch(
            f"population of {len(person_ids)} does not fill league sizes "
            f"{config.sizes} (need {sum(config.sizes)})"
        )
    vs = value_systems.get(seed_vs)
    if vs is None:
        raise LeaderPsvMissing(f"seed value system {seed_vs!r} does not exist")
    population = ranking.Population(ids=tuple(sorted(person_ids)), kind="person")
    ranked = ranking.rank(graph, population, vs).order()
    n_senior, n_middle, _ = config.sizes
    leagues = {
        "senior": ranked[:n_senior],
        "middle": ranked[n_senior : n_senior + n_middle],
        "junior": ranked[n_senior + n_middle :],
    }
    state = LeagueState(
        epoch=0,
        config=config,
        leagues=leagues,
        leaders={},
        leader_psvs={},
        seed_vs=seed_vs,
    )
    for name in LEAGUES:
        leader = leagues[name][0]
        state.leaders[name] = leader
        state.leader_psvs[name] = resolve_leader_psv(
            graph, value_systems, leader, leagues[name], seed_vs, events, 0
        )
    emit(events, 0, audit.LEAGUE_INITIALIZED, [], state.to_doc())
    return state


def run_epoch(
    graph: ResourceGraph,
    value_systems: dict[str, ValueSystem],
    state: LeagueState,
    new_achievements: list[dict[str, Any]],
    events: list[AuditEvent],
) -> None:
    """Advance the league by one epoch, appending every step to `events`."""
    epoch = state.epoch
    emit(events, epoch, audit.EPOCH_STARTED, [], {"epoch": epoch})

    for spec in new_achievements:
        achievement = graph.attach_achievement(
            owner=spec["owner"],
            category=spec["category"],
            attributes=spec["attributes"],
            year=spec["year"],
            evidence_uri=spec.get("evidence_uri"),
        )
        emit(
            events,
            epoch,
            audit.ACHIEVEMENT_ATTACHED,
            [achievement.id],
            achievement.to_doc(),
        )

    for name in LEAGUES:
        order = rank_league(graph, value_systems, state, name)
        state.leagues[name] = order
        emit(
            events,
            epoch,
            audit.LEAGUE_RANKED,
            list(order),
            {"league": name, "order": list(order), "value_system": state.leader_psvs[name]},
        )

    count = state.config.exchange_count
    for upper_name, lower_name in (("senior", "middle"), ("middle", "junior")):
        upper, lower, relegated, promoted = exchange(
            state.leagues[upper_name], state.leagues[lower_name], count
        )
        state.leagues[upper_name] = upper
        state.leagues[lower_name] = lower
        for member in relegated:
            emit(
                events,
                epoch,
                audit.RELEGATED,
                [member],
                {"member": member, "from": upper_name, "to": lower_name},
            )
        for member in promoted:
            emit(
                events,
                epoch,
                audit.PROMOTED,
                [member],
                {"member": member, "from": lower_name, "to": upper_name},
            )

    for name in LEAGUES:
        order = rank_league(graph, value_systems, state, name)
        state.leagues[name] = order
        emit(
            events,
            epoch,
            audit.LEAGUE_RANKED,
            list(order),
            {"league": name, "order": list(order), "value_system": state.leader_psvs[name]},
        )

    for name in LEAGUES:
        leader = state.leagues[name][0]
        psv = resolve_leader_psv(
            graph, value_systems, leader, state.leagues[name], state.seed_vs, events, epoch
        )
        if leader != state.leaders[name] or psv != state.leader_psvs[name]:
            emit(
                events,
                epoch,
                audit.LEADER_CHANGED,
                [leader],
                {"league": name, "leader": leader, "value_system": psv},
            )
        state.leaders[name] = leader
        state.leader_psvs[name] = psv

    state.epoch = epoch + 1


@dataclass(frozen=True)
class GeneratorConfig:
    """Synthetic achievement source for simulations.

    Per epoch and per league member, each configured indicator draws an
    integer increment from its inclusive range. Sum/max indicators get one
    achievement carrying the drawn value; count indicators get that many
    single-unit achievements. Draws of zero produce nothing.
    """

    increments: dict[str, tuple[int, int]] = field(default_factory=dict)
    year: int = 2000


def validate_generator(config: GeneratorConfig, graph: ResourceGraph) -> None:
    for indicator_id, bounds in config.increments.items():
        if indicator_id not in graph.indicators:
            raise InvalidGeneratorConfig(f"unknown indicator {indicator_id!r}")
        if len(bounds) != 2 or any(
            not isinstance(b, int) or isinstance(b, bool) for b in bounds
        ):
            raise InvalidGeneratorConfig(
                f"increment range for {indicator_id!r} must be two integers"
            )
        lo, hi = bounds
        if lo < 0 or hi < lo:
            raise InvalidGeneratorConfig(
                f"increment range for {indicator_id!r} must satisfy 0 <= lo <= hi"
            )
        indicator = graph.indicators[indicator_id]
        if graph.schema.attribute_type(indicator.category, indicator.attribute) != "number":
            raise InvalidGeneratorConfig(
                f"indicator {indicator_id!r} does not target a number attribute"
            )
    if not isinstance(config.year, int) or not 1900 <= config.year <= 2100:
        raise InvalidGeneratorConfig(f"generator year {config.year!r} out of range")


def synthesize_achievements(
    graph: ResourceGraph,
    state: LeagueState,
    config: GeneratorConfig,
    rng: SplitMix64,
) -> list[dict[str, Any]]:
    """Draw one epoch's synthetic achievements, in canonical member order."""
    payloads = []
    for person_id in sorted(state.all_members()):
        for indicator_id in sorted(config.increments):
            lo, hi = config.increments[indicator_id]
            drawn = rng.next_int(lo, hi)
            if drawn == 0:
                continue
            indicator = graph.indicators[indicator_id]
            if indicator.aggregation == "count":
                batches = [{indicator.attribute: 1}] * drawn
            else:
                batches = [{indicator.attribute: drawn}]
            for attributes in batches:
                payloads.append(
                    {
                        "owner": person_id,
                        "category": indicator.category,
                        "attributes": attributes,
                        "year": config.year,
                    }
                )
    return payloads


def simulate(
    graph: ResourceGraph,
    value_systems: dict[str, ValueSystem],
    state: LeagueState,
    epochs: int,
    config: GeneratorConfig,
    seed: int,
) -> tuple[list[dict[str, Any]], list[AuditEvent]]:
    """Run epochs against the given (caller-copied) state.

    Returns (trajectory of league snapshots, audit events numbered from 1).
    Identical inputs and seed produce byte-identical results.
    """
    if not isinstance(epochs, int) or epochs < 1:
        raise InvalidGeneratorConfig("epochs must be a positive integer")
    if not isinstance(seed, int) or not 0 <= seed < (1 << 64):
        raise InvalidGeneratorConfig("seed must be an unsigned 64-bit integer")
    validate_generator(config, graph)
    rng = SplitMix64(seed)
    events: list[AuditEvent] = []
    trajectory = []
    for _ in range(epochs):
        payloads = synthesize_achievements(graph, state, config, rng)
        run_epoch(graph, value_systems, state, payloads, events)
        trajectory.append(state.to_doc())
    for i, event in enumerate(events):
        event.seq = i + 1
    return trajectory, events
