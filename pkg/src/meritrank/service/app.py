"""HTTP gateway: FastAPI service wrapping a Platform.

Responses are emitted as canonical JSON built by the core, not re-encoded
by the framework, so a payload fetched over HTTP is byte-identical to the
same result printed by the CLI. Reads are anonymous; mutations require the
configured bearer token and are rejected entirely on read-only instances.
"""

from __future__ import annotations

from fastapi import Depends, FastAPI, Request, Response
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse

from .. import query as query_mod
from ..canon import canonical_json
from ..errors import MeritError, ReadOnly, Unauthorized
from ..platform import Platform
from ..values import parse_inline_weights
from .schemas import (
    AchievementCreate,
    AggregateRequest,
    DecisionRequest,
    EpochRequest,
    IndicatorCreate,
    LeagueInitRequest,
    QueryRequest,
    ResourceCreate,
    SimulateRequest,
    ValueSystemCreate,
    VerificationUpdate,
)


def canonical_response(doc, status_code: int = 200) -> Response:
    return Response(
        content=canonical_json(doc),
        status_code=status_code,
        media_type="application/json",
    )


def create_app(platform: Platform, token: str | None = None) -> FastAPI:
    app = FastAPI(title="meritrank gateway", version="0.1.0")
    app.state.platform = platform
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )

    def write_access(request: Request) -> None:
        if platform.read_only:
            raise ReadOnly("this instance serves reads only")
        if token is not None:
            header = request.headers.get("authorization", "")
            if header != f"Bearer {token}":
                raise Unauthorized("missing or invalid bearer token")

    @app.exception_handler(MeritError)
    async def merit_error_handler(_request: Request, exc: MeritError):
        return JSONResponse(
            status_code=exc.http_status,
            content={"code": exc.code, "message": exc.message},
        )

    @app.exception_handler(RequestValidationError)
    async def validation_error_handler(_request: Request, exc: RequestValidationError):
        return JSONResponse(
            status_code=422,
            content={"code": "ValidationError", "message": str(exc.errors())},
        )

    # -- reads ---------------------------------------------------------------

    @app.get("/health")
    def health():
        return canonical_response(platform.health())

    @app.get("/indicators")
    def indicators():
        return canonical_response(platform.list_indicators())

    @app.get("/resources/{resource_id}")
    def get_resource(resource_id: str):
        return canonical_response(platform.get_resource(resource_id))

    @app.get("/value-systems/{vs_id}")
    def get_value_system(vs_id: str):
        return canonical_response(platform.get_value_system(vs_id))

    @app.get("/rankings")
    def rankings(
        kind: str = "person",
        vs: str | None = None,
        weights: str | None = None,
        filter: str | None = None,
        as_of_year: int | None = None,
    ):
        inline = parse_inline_weights(weights) if weights else None
        return canonical_response(
            platform.rank_resources(
                kind=kind,
                vs_id=vs,
                weights=inline,
                filter_text=filter,
                as_of_year=as_of_year,
            )
        )

    @app.get("/reports/{resource_id}")
    def report(resource_id: str, vs: str | None = None, weights: str | None = None):
        inline = parse_inline_weights(weights) if weights else None
        return canonical_response(
            platform.assessment_report(resource_id, vs_id=vs, weights=inline)
        )

    @app.get("/league")
    def league_show():
        return canonical_response(platform.league_show())

    @app.get("/league/audit")
    def league_audit(from_seq: int = 1):
        lines = "".join(
            canonical_json(event.to_doc()) + "\n"
            for event in platform.audit_events(from_seq)
        )
        return Response(content=lines, media_type="application/x-ndjson")

    # -- queries (read-only analytics over the current snapshot) --------------

    @app.post("/queries")
    def run_query(body: QueryRequest):
        result = platform.run_query(body.text, body.caller, body.value_system)
        doc = result.to_doc()
        doc["explain"] = query_mod.explain(result)
        return canonical_response(doc)

    @app.post("/decisions")
    def run_decision(body: DecisionRequest):
        options = [(option.id, option.resources) for option in body.options]
        return canonical_response(
            platform.run_decision(body.text, options, body.caller, body.value_system)
        )

    @app.post("/league/simulate")
    def league_simulate(body: SimulateRequest):
        return canonical_response(
            platform.league_simulate(
                epochs=body.epochs,
                seed=body.seed,
                increments=body.increments,
                year=body.year,
            )
        )

    # -- mutations -------------------------------------------------------------

    @app.post("/resources", dependencies=[Depends(write_access)])
    def create_resource(body: ResourceCreate):
        return canonical_response(
            platform.register_resource(
                body.kind, body.display_name, body.member_of, body.id
            ),
            status_code=201,
        )

    @app.post("/resources/{resource_id}/achievements", dependencies=[Depends(write_access)])
    def create_achievement(resource_id: str, body: AchievementCreate):
        return canonical_response(
            platform.attach_achievement(
                resource_id, body.category, body.attributes, body.year, body.evidence_uri
            ),
            status_code=201,
        )

    @app.post("/achievements/{achievement_id}/verification", dependencies=[Depends(write_access)])
    def update_verification(achievement_id: str, body: VerificationUpdate):
        return canonical_response(
            platform.set_verification(
                achievement_id, body.status, body.actor, body.evidence_uri
            )
        )

    @app.post("/indicators", dependencies=[Depends(write_access)])
    def create_indicator(body: IndicatorCreate):
        return canonical_response(
            platform.define_indicator(
                body.id,
                body.label,
                body.category,
                body.attribute,
                body.aggregation,
                body.status_floor,
            ),
            status_code=201,
        )

    @app.post("/value-systems", dependencies=[Depends(write_access)])
    def create_value_system(body: ValueSystemCreate):
        return canonical_response(
            platform.create_value_system(body.owner, body.weights, body.label, body.id),
            status_code=201,
        )

    @app.post("/value-systems/aggregate", dependencies=[Depends(write_access)])
    def aggregate_value_systems(body: AggregateRequest):
        return canonical_response(
            platform.aggregate_value_systems(
                body.psv_ids, body.method, body.leader, body.label, body.id
            ),
            status_code=201,
        )

    @app.post("/league/init", dependencies=[Depends(write_access)])
    def league_init(body: LeagueInitRequest):
        return canonical_response(
            platform.league_init(
                sizes=tuple(body.sizes),
                seed_vs=body.seed_vs,
                exchange_count=body.exchange_count,
                members=body.members,
            ),
            status_code=201,
        )

    @app.post("/league/epoch", dependencies=[Depends(write_access)])
    def league_epoch(body: EpochRequest | None = None):
        achievements = (
            [a.model_dump() for a in body.achievements] if body is not None else []
        )
        return canonical_response(platform.league_epoch(achievements))

    return app
