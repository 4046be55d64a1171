"""Platform facade: one object tying the graph, value systems, league, store
and audit log together.

All mutations are single-writer and atomic: they run against a deep copy of
the current state, persist on success (audit events first, then snapshot)
and only then swap the visible state reference. Reads always see a complete
state. Every mutation emits replayable audit events, so replaying the full
log from a fresh state reproduces the current snapshot byte for byte.
"""

from __future__ import annotations

import copy
import os
import threading
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Callable, Iterable

from . import audit, league, query, ranking, store, values
from .audit import AuditEvent, emit
from .errors import (
    DuplicateId,
    IoError,
    LeagueNotInitialized,
    LeaderHasNoPsv,
    MeritError,
    ReadOnly,
    UnknownResource,
    UnknownValueSystem,
)
from .state import PlatformState, integrity_problems
from .errors import IntegrityViolation
from .league import GeneratorConfig, LeagueConfig
from .values import ValueSystem


def default_clock() -> str:
    """UTC timestamp; honours MERITRANK_CLOCK for reproducible runs."""
    fixed = os.environ.get("MERITRANK_CLOCK")
    if fixed:
        return fixed
    return datetime.now(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")


class _AtomicImportFailed(Exception):
    def __init__(self, report: dict[str, Any]):
        self.report = report


class Platform:
    def __init__(
        self,
        state: PlatformState,
        store_dir: str | Path | None = None,
        read_only: bool = False,
        clock: Callable[[], str] | None = None,
        lock: store.StoreLock | None = None,
    ):
        self._state = state
        self._mutex = threading.Lock()
        self._clock = clock or default_clock
        self.read_only = read_only
        self._store_dir = Path(store_dir) if store_dir else None
        self._lock = lock
        self._audit = (
            store.AuditLog(self._store_dir / store.AUDIT_FILE)
            if self._store_dir
            else None
        )
        self._memory_events: list[AuditEvent] = []
        self._next_memory_seq = 1

    # -- lifecycle ---------------------------------------------------------

    @classmethod
    def create(cls, store_dir: str | Path | None = None, clock=None) -> "Platform":
        """Initialize a brand-new store (or an in-memory platform)."""
        state = PlatformState.fresh()
        if store_dir is None:
            return cls(state, clock=clock)
        directory = Path(store_dir)
        directory.mkdir(parents=True, exist_ok=True)
        snapshot = directory / store.SNAPSHOT_FILE
        if snapshot.exists():
            raise IoError(f"store already initialized at {directory}")
        lock = store.StoreLock(directory)
        lock.acquire()
        try:
            store.save_snapshot(state, snapshot)
        except Exception:
            lock.release()
            raise
        return cls(state, store_dir=directory, clock=clock, lock=lock)

    @classmethod
    def open(
        cls, store_dir: str | Path, read_only: bool = False, clock=None
    ) -> "Platform":
        directory = Path(store_dir)
        state = store.load_snapshot(directory / store.SNAPSHOT_FILE)
        lock = None
        if not read_only:
            lock = store.StoreLock(directory)
            lock.acquire()
        return cls(
            state,
            store_dir=directory,
            read_only=read_only,
            clock=clock,
            lock=lock,
        )

    def close(self) -> None:
        if self._lock is not None:
            self._lock.release()
            self._lock = None

    def __enter__(self) -> "Platform":
        return self

    def __exit__(self, *exc_info) -> None:
        self.close()

    # -- state access --------------------------------------------------------

    @property
    def state(self) -> PlatformState:
        return self._state

    def snapshot_digest(self) -> str:
        return store.state_digest(self._state)

    def health(self) -> dict[str, Any]:
        return {
            "status": "ok",
            "epoch": self._state.league.epoch if self._state.league else 0,
        }

    def _epoch(self, state: PlatformState) -> int:
        return state.league.epoch if state.league else 0

    # -- mutation plumbing ---------------------------------------------------

    def _mutate(self, work: Callable[[PlatformState, list[AuditEvent]], Any]) -> Any:
        if self.read_only:
            raise ReadOnly("this instance is read-only")
        with self._mutex:
            working = copy.deepcopy(self._state)
            events: list[AuditEvent] = []
            result = work(working, events)
            problems = integrity_problems(working)
            if problems:
                raise IntegrityViolation("; ".join(problems))
            self._record(events)
            if self._store_dir is not None:
                store.save_snapshot(working, self._store_dir / store.SNAPSHOT_FILE)
            self._state = working
            return result

    def _record(self, events: list[AuditEvent]) -> None:
        if self._audit is not None:
            self._audit.append_many(events)
        else:
            for event in events:
                event.seq = self._next_memory_seq
                self._next_memory_seq += 1
        self._memory_events.extend(events)

    def audit_events(self, from_seq: int = 1) -> list[AuditEvent]:
        if self._audit is not None:
            return list(self._audit.events(from_seq))
        return [e for e in self._memory_events if (e.seq or 0) >= from_seq]

    # -- domain ops ------------------------------------------------------------

    def register_resource(
        self,
        kind: str,
        display_name: str,
        member_of: str | None = None,
        resource_id: str | None = None,
    ) -> dict[str, Any]:
        registered_at = self._clock()

        def work(state: PlatformState, events: list[AuditEvent]):
            resource = state.graph.register_resource(
                kind, display_name, member_of, resource_id, registered_at
            )
            emit(
                events,
                self._epoch(state),
                audit.RESOURCE_REGISTERED,
                [resource.id],
                resource.to_doc(),
            )
            return resource.to_doc()

        return self._mutate(work)

    def attach_achievement(
        self,
        owner: str,
        category: str,
        attributes: dict[str, Any],
        year: int,
        evidence_uri: str | None = None,
    ) -> dict[str, Any]:
        def work(state: PlatformState, events: list[AuditEvent]):
            achievement = state.graph.attach_achievement(
                owner, category, attributes, year, evidence_uri
            )
            emit(
                events,
                self._epoch(state),
                audit.ACHIEVEMENT_ATTACHED,
                [achievement.id],
                achievement.to_doc(),
            )
            return achievement.to_doc()

        return self._mutate(work)

    def set_verification(
        self,
        achievement_id: str,
        new_status: str,
        actor: str,
        evidence_uri: str | None = None,
    ) -> dict[str, Any]:
        def work(state: PlatformState, events: list[AuditEvent]):
            prior = state.graph.achievements.get(achievement_id)
            prior_status = prior.status if prior else None
            achievement = state.graph.set_verification(
                achievement_id, new_status, actor, evidence_uri
            )
            emit(
                events,
                self._epoch(state),
                audit.VERIFICATION_CHANGED,
                [achievement_id],
                {
                    "id": achievement_id,
                    "from": prior_status,
                    "to": new_status,
                    "actor": actor,
                    "evidence_uri": evidence_uri,
                },
            )
            return achievement.to_doc()

        return self._mutate(work)

    def define_indicator(
        self,
        indicator_id: str,
        label: str,
        category: str,
        attribute: str,
        aggregation: str = "sum",
        status_floor: str = "reported",
    ) -> dict[str, Any]:
        def work(state: PlatformState, events: list[AuditEvent]):
            indicator = state.graph.define_indicator(
                indicator_id, label, category, attribute, aggregation, status_floor
            )
            emit(
                events,
                self._epoch(state),
                audit.INDICATOR_DEFINED,
                [indicator.id],
                indicator.to_doc(),
            )
            return indicator.to_doc()

        return self._mutate(work)

    def raw_indicator_value(
        self, resource_id: str, indicator_id: str, as_of_year: int | None = None
    ) -> float:
        return self._state.graph.raw_indicator_value(
            resource_id, indicator_id, as_of_year
        )

    def list_indicators(self) -> list[dict[str, Any]]:
        graph = self._state.graph
        return [graph.indicators[key].to_doc() for key in sorted(graph.indicators)]

    def get_resource(self, resource_id: str) -> dict[str, Any]:
        return self._state.graph.resource(resource_id).to_doc()

    # -- value systems -----------------------------------------------------------

    def create_value_system(
        self,
        owner: str,
        weights: dict[str, float],
        label: str = "",
        vs_id: str | None = None,
    ) -> dict[str, Any]:
        created_at = self._clock()

        def work(state: PlatformState, events: list[AuditEvent]):
            if owner != values.COLLECTIVE_OWNER:
                state.graph.resource(owner)  # raises UnknownResource
            values.validate_weights(weights, state.graph.indicators)
            new_id = vs_id or values.new_value_system_id(state.value_systems)
            if new_id in state.value_systems:
                raise DuplicateId(f"value system id {new_id!r} already exists")
            vs = ValueSystem(
                id=new_id,
                owner=owner,
                weights=dict(weights),
                label=label,
                created_at=created_at,
            )
            state.value_systems[new_id] = vs
            epoch = self._epoch(state)
            emit(
                events, epoch, audit.VALUE_SYSTEM_CREATED, [new_id], vs.to_state_doc()
            )
            if owner != values.COLLECTIVE_OWNER:
                # the newest system becomes the owner's active one
                state.graph.resources[owner].psv = new_id
                emit(
                    events,
                    epoch,
                    audit.PSV_ASSIGNED,
                    [owner],
                    {"resource": owner, "value_system": new_id},
                )
            return vs.to_psv_doc()

        return self._mutate(work)

    def aggregate_value_systems(
        self,
        psv_ids: list[str],
        method: str,
        leader: str | None = None,
        label: str = "",
        vs_id: str | None = None,
    ) -> dict[str, Any]:
        created_at = self._clock()

        def work(state: PlatformState, events: list[AuditEvent]):
            psvs = []
            for psv_id in psv_ids:
                vs = state.value_systems.get(psv_id)
                if vs is None:
                    raise UnknownValueSystem(f"value system {psv_id!r} does not exist")
                psvs.append(vs)
            leader_psv = None
            if method == "leader":
                if leader is None:
                    raise LeaderHasNoPsv("leader aggregation needs a leader id")
                resource = state.graph.resource(leader)
                if resource.psv is None or resource.psv not in state.value_systems:
                    raise LeaderHasNoPsv(f"leader {leader!r} has no value system")
                leader_psv = state.value_systems[resource.psv]
            new_id = vs_id or values.new_value_system_id(state.value_systems)
            if new_id in state.value_systems:
                raise DuplicateId(f"value system id {new_id!r} already exists")
            vs = values.aggregate(
                psvs,
                method,
                leader_psv,
                vs_id=new_id,
                label=label,
                created_at=created_at,
            )
            state.value_systems[new_id] = vs
            emit(
                events,
                self._epoch(state),
                audit.VALUE_SYSTEM_CREATED,
                [new_id],
                vs.to_state_doc(),
            )
            return vs.to_psv_doc()

        return self._mutate(work)

    def get_value_system(self, vs_id: str) -> dict[str, Any]:
        vs = self._state.value_systems.get(vs_id)
        if vs is None:
            raise UnknownValueSystem(f"value system {vs_id!r} does not exist")
        return vs.to_psv_doc()

    def _resolve_vs(
        self,
        state: PlatformState,
        vs_id: str | None = None,
        weights: dict[str, float] | None = None,
        ephemeral_id: str | None = None,
    ) -> ValueSystem:
        if weights is not None:
            values.validate_weights(weights, state.graph.indicators)
            return ValueSystem(
                id=ephemeral_id or "ephemeral", owner="collective", weights=dict(weights)
            )
        if vs_id is None:
            raise UnknownValueSystem("no value system given")
        vs = state.value_systems.get(vs_id)
        if vs is None:
            raise UnknownValueSystem(f"value system {vs_id!r} does not exist")
        return vs

    # -- ranking reads --------------------------------------------------------------

    def _population_ids(
        self, kind: str, ids: list[str] | None, filter_text: str | None
    ) -> list[str]:
        state = self._state
        if ids is not None:
            return list(ids)
        text = f"kind:{kind} {filter_text}" if filter_text else f"kind:{kind}"
        parsed = query.parse_query(text, state.graph.schema)
        return query.resolve_matches(state, parsed)

    def rank_resources(
        self,
        kind: str = "person",
        vs_id: str | None = None,
        weights: dict[str, float] | None = None,
        ephemeral_id: str | None = None,
        ids: list[str] | None = None,
        filter_text: str | None = None,
        as_of_year: int | None = None,
    ) -> dict[str, Any]:
        state = self._state
        vs = self._resolve_vs(state, vs_id, weights, ephemeral_id)
        population_ids = self._population_ids(kind, ids, filter_text)
        if not population_ids:
            return ranking.empty_ranking(vs.id)
        population = ranking.Population(
            ids=tuple(population_ids), kind=kind, as_of_year=as_of_year
        )
        return ranking.rank(state.graph, population, vs, created_at=self._clock()).to_doc()

    def assessment_report(
        self,
        resource_id: str,
        vs_id: str | None = None,
        weights: dict[str, float] | None = None,
        ephemeral_id: str | None = None,
        filter_text: str | None = None,
    ) -> dict[str, Any]:
        state = self._state
        vs = self._resolve_vs(state, vs_id, weights, ephemeral_id)
        resource = state.graph.resource(resource_id)
        population_ids = self._population_ids(resource.kind, None, filter_text)
        population = ranking.Population(ids=tuple(population_ids), kind=resource.kind)
        return ranking.assessment_report(state.graph, resource_id, vs, population)

    # -- queries ----------------------------------------------------------------

    def run_query(
        self,
        text: str,
        caller: str | None = None,
        value_system: str | None = None,
    ) -> query.QueryResult:
        return query.execute(self._state, text, caller, value_system)

    def run_decision(
        self,
        text: str,
        options: list[tuple[str, list[str]]],
        caller: str | None = None,
        value_system: str | None = None,
    ) -> dict[str, Any]:
        return query.decide(self._state, text, options, caller, value_system)

    # -- league -----------------------------------------------------------------

    def league_init(
        self,
        sizes: tuple[int, int, int],
        seed_vs: str,
        exchange_count: int = league.DEFAULT_EXCHANGE_COUNT,
        members: list[str] | None = None,
    ) -> dict[str, Any]:
        def work(state: PlatformState, events: list[AuditEvent]):
            config = LeagueConfig(sizes=tuple(sizes), exchange_count=exchange_count)
            person_ids = members
            if person_ids is None:
                person_ids = sorted(
                    r.id for r in state.graph.resources.values() if r.kind == "person"
                )
            else:
                for person_id in person_ids:
                    resource = state.graph.resource(person_id)
                    if resource.kind != "person":
                        raise UnknownResource(
                            f"league member {person_id!r} is not a person"
                        )
            state.league = league.init_league(
                state.graph, state.value_systems, person_ids, seed_vs, config, events
            )
            return state.league.to_doc()

        return self._mutate(work)

    def league_epoch(
        self, new_achievements: list[dict[str, Any]] | None = None
    ) -> dict[str, Any]:
        def work(state: PlatformState, events: list[AuditEvent]):
            if state.league is None:
                raise LeagueNotInitialized("league has not been initialized")
            league.run_epoch(
                state.graph,
                state.value_systems,
                state.league,
                new_achievements or [],
                events,
            )
            return state.league.to_doc()

        return self._mutate(work)

    def league_show(self) -> dict[str, Any]:
        if self._state.league is None:
            raise LeagueNotInitialized("league has not been initialized")
        return self._state.league.to_doc()

    def league_simulate(
        self,
        epochs: int,
        seed: int,
        increments: dict[str, tuple[int, int]] | None = None,
        year: int = 2000,
    ) -> dict[str, Any]:
        """What-if run on a private copy; the platform state is untouched."""
        if self._state.league is None:
            raise LeagueNotInitialized("league has not been initialized")
        working = copy.deepcopy(self._state)
        config = GeneratorConfig(
            increments={k: tuple(v) for k, v in (increments or {}).items()}, year=year
        )
        trajectory, events = league.simulate(
            working.graph, working.value_systems, working.league, epochs, config, seed
        )
        return {
            "seed": seed,
            "epochs": epochs,
            "initial_digest": store.state_digest(self._state),
            "final_digest": store.state_digest(working),
            "trajectory": trajectory,
            "events": [event.to_doc() for event in events],
        }

    # -- import, replay ------------------------------------------------------------

    def import_achievements(
        self, csv_path: str | Path, atomic: bool = False
    ) -> dict[str, Any]:
        rows = store.read_achievement_rows(csv_path)

        def work(state: PlatformState, events: list[AuditEvent]):
            imported = 0
            errors = []
            for row in rows:
                if "error" in row:
                    errors.append({"line": row["line"], "error": row["error"]})
                    continue
                try:
                    achievement = state.graph.attach_achievement(
                        owner=row["owner"],
                        category=row["category"],
                        attributes=row["attributes"],
                        year=row["year"],
                        evidence_uri=row["evidence_uri"],
                    )
                except MeritError as exc:
                    errors.append({"line": row["line"], "error": exc.message})
                    continue
                emit(
                    events,
                    self._epoch(state),
                    audit.ACHIEVEMENT_ATTACHED,
                    [achievement.id],
                    achievement.to_doc(),
                )
                imported += 1
            report = {"total": len(rows), "imported": imported, "errors": errors}
            if atomic and errors:
                report["imported"] = 0
                raise _AtomicImportFailed(report)
            return report

        try:
            return self._mutate(work)
        except _AtomicImportFailed as aborted:
            return aborted.report

    def replay_from_genesis(self) -> dict[str, Any]:
        """Re-derive the current state purely from the audit log."""
        replayed = apply_events(PlatformState.fresh(), self.audit_events())
        replayed_digest = store.state_digest(replayed)
        current_digest = self.snapshot_digest()
        return {
            "events": len(self.audit_events()),
            "replayed_digest": replayed_digest,
            "current_digest": current_digest,
            "match": replayed_digest == current_digest,
        }


def apply_events(
    state: PlatformState, events: Iterable[AuditEvent]
) -> PlatformState:
    """Replay audit events onto a state (mutates and returns it).

    Domain events re-run their operation with the recorded identifiers and
    timestamps; league events record outcomes and are applied structurally.
    """
    for event in events:
        payload = event.payload
        kind = event.kind
        if kind == audit.RESOURCE_REGISTERED:
            state.graph.register_resource(
                kind=payload["kind"],
                display_name=payload["display_name"],
                member_of=payload.get("member_of"),
                resource_id=payload["id"],
                registered_at=payload.get("registered_at", ""),
            )
        elif kind == audit.ACHIEVEMENT_ATTACHED:
            state.graph.attach_achievement(
                owner=payload["owner"],
                category=payload["category"],
                attributes=payload["attributes"],
                year=payload["year"],
                evidence_uri=payload.get("evidence_uri"),
                achievement_id=payload["id"],
            )
        elif kind == audit.VERIFICATION_CHANGED:
            state.graph.set_verification(
                payload["id"],
                payload["to"],
                payload["actor"],
                payload.get("evidence_uri"),
            )
        elif kind == audit.INDICATOR_DEFINED:
            state.graph.define_indicator(
                payload["id"],
                payload["label"],
                payload["category"],
                payload["attribute"],
                payload.get("aggregation", "sum"),
                payload.get("status_floor", "reported"),
            )
        elif kind == audit.VALUE_SYSTEM_CREATED:
            state.value_systems[payload["id"]] = ValueSystem.from_doc(payload)
        elif kind == audit.PSV_ASSIGNED:
            state.graph.resources[payload["resource"]].psv = payload["value_system"]
        elif kind == audit.LEAGUE_INITIALIZED:
            state.league = league.LeagueState.from_doc(payload)
        elif kind == audit.EPOCH_STARTED:
            # run_epoch is atomic, so seeing the start implies completion
            state.league.epoch = payload["epoch"] + 1
        elif kind == audit.LEAGUE_RANKED:
            state.league.leagues[payload["league"]] = list(payload["order"])
        elif kind in (audit.PROMOTED, audit.RELEGATED):
            member = payload["member"]
            state.league.leagues[payload["from"]].remove(member)
            state.league.leagues[payload["to"]].append(member)
        elif kind == audit.LEADER_CHANGED:
            state.league.leaders[payload["league"]] = payload["leader"]
            state.league.leader_psvs[payload["league"]] = payload["value_system"]
        else:
            raise IntegrityViolation(f"audit log contains unknown event {kind!r}")
    return state
