"""Command-line client for the platform.

Every data command is a thin wrapper over the same core facade the HTTP
gateway serves, and ``--json`` prints the identical canonical payload, so
scripted CLI output byte-matches the corresponding API response (plus a
trailing newline). Exit codes: 0 success, 1 operation failure, 2 usage.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Any

from .canon import canonical_json
from .errors import MeritError
from .platform import Platform
from .values import parse_inline_weights


def _print_doc(doc: Any, as_json: bool) -> None:
    if as_json:
        sys.stdout.write(canonical_json(doc) + "\n")
    else:
        sys.stdout.write(json.dumps(doc, indent=2, sort_keys=True) + "\n")


def _read_psv_file(path: str) -> dict[str, Any]:
    try:
        return json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise MeritError(f"cannot read value system file {path}: {exc}") from exc


def _vs_arguments(parser: argparse.ArgumentParser) -> None:
    group = parser.add_mutually_exclusive_group(required=True)
    group.add_argument("--vs-id", help="id of a stored value system")
    group.add_argument("--vs", metavar="FILE", help="value system JSON file (used ephemerally)")
    group.add_argument("--weights", help="inline weights, e.g. cit:0.8,hif:0.2")


def _resolve_vs_args(args) -> dict[str, Any]:
    if args.vs_id:
        return {"vs_id": args.vs_id}
    if args.vs:
        doc = _read_psv_file(args.vs)
        return {"weights": doc["weights"], "ephemeral_id": doc.get("id", "ephemeral")}
    return {"weights": parse_inline_weights(args.weights)}


def _parse_increments(spec: str) -> dict[str, tuple[int, int]]:
    increments: dict[str, tuple[int, int]] = {}
    for part in spec.split(","):
        part = part.strip()
        if not part:
            continue
        pieces = part.split(":")
        if len(pieces) != 3:
            raise MeritError(f"bad increment {part!r}, expected indicator:lo:hi")
        increments[pieces[0]] = (int(pieces[1]), int(pieces[2]))
    return increments


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="meritrank", description="value-driven assessment platform"
    )
    parser.add_argument(
        "--store", default="./store", help="store directory (default ./store)"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("init", help="initialize a new store")

    p = sub.add_parser("import", help="bulk-import achievements from CSV")
    p.add_argument("csv")
    p.add_argument("--atomic", action="store_true", help="all rows or nothing")
    p.add_argument("--json", action="store_true")

    p = sub.add_parser("register", help="register a person, unit or organization")
    p.add_argument("--kind", required=True, choices=("person", "unit", "organization"))
    p.add_argument("--name", required=True, dest="display_name")
    p.add_argument("--member-of")
    p.add_argument("--id")
    p.add_argument("--json", action="store_true")

    p = sub.add_parser("indicator", help="manage indicators")
    ind_sub = p.add_subparsers(dest="indicator_command", required=True)
    d = ind_sub.add_parser("define", help="define an indicator")
    d.add_argument("--id", required=True)
    d.add_argument("--label", required=True)
    d.add_argument("--category", required=True)
    d.add_argument("--attribute", required=True)
    d.add_argument("--aggregation", default="sum", choices=("sum", "count", "max"))
    d.add_argument("--floor", default="reported", choices=("reported", "verified"))
    d.add_argument("--json", action="store_true")
    lst = ind_sub.add_parser("list", help="list indicators")
    lst.add_argument("--json", action="store_true")

    p = sub.add_parser("psv", help="manage value systems")
    psv_sub = p.add_subparsers(dest="psv_command", required=True)
    s = psv_sub.add_parser("set", help="create a value system and make it the owner's")
    s.add_argument("--owner", required=True)
    source = s.add_mutually_exclusive_group(required=True)
    source.add_argument("--file", help="PSV JSON file")
    source.add_argument("--weights", help="inline weights, e.g. cit:0.8,hif:0.2")
    s.add_argument("--label", default="")
    s.add_argument("--id")
    s.add_argument("--json", action="store_true")
    sh = psv_sub.add_parser("show", help="print a stored value system")
    sh.add_argument("--id", required=True)
    sh.add_argument("--json", action="store_true")
    ag = psv_sub.add_parser("aggregate", help="build a collective value system")
    ag.add_argument("--method", required=True, choices=("mean", "median", "leader"))
    ag.add_argument("--ids", required=True, help="comma-separated value system ids")
    ag.add_argument("--leader")
    ag.add_argument("--label", default="")
    ag.add_argument("--id")
    ag.add_argument("--json", action="store_true")

    p = sub.add_parser("rank", help="rank resources under a value system")
    p.add_argument("--kind", default="person", choices=("person", "unit", "organization"))
    _vs_arguments(p)
    p.add_argument("--filter", dest="filter_text")
    p.add_argument("--as-of-year", type=int)
    p.add_argument("--json", action="store_true")

    p = sub.add_parser("report", help="assessment report for one resource")
    p.add_argument("--resource", required=True)
    _vs_arguments(p)
    p.add_argument("--filter", dest="filter_text")
    p.add_argument("--json", action="store_true")

    p = sub.add_parser("query", help="run a filter query")
    p.add_argument("text")
    p.add_argument("--caller")
    p.add_argument("--vs-id")
    p.add_argument("--explain", action="store_true")
    p.add_argument("--json", action="store_true")

    p = sub.add_parser("decide", help="rank decision options")
    p.add_argument("text")
    p.add_argument(
        "--option",
        action="append",
        required=True,
        metavar="ID=RID[,RID...]",
        help="option and its linked resources; repeatable",
    )
    p.add_argument("--caller")
    p.add_argument("--vs-id")
    p.add_argument("--json", action="store_true")

    p = sub.add_parser("league", help="league operations")
    league_sub = p.add_subparsers(dest="league_command", required=True)
    li = league_sub.add_parser("init", help="partition the population into leagues")
    li.add_argument("--sizes", required=True, help="senior,middle,junior e.g. 3,3,3")
    li.add_argument("--seed-vs", required=True)
    li.add_argument("--exchange", type=int, default=3)
    li.add_argument("--members", help="comma-separated person ids (default: everyone)")
    li.add_argument("--json", action="store_true")
    le = league_sub.add_parser("epoch", help="run one committed epoch")
    le.add_argument("--achievements", help="JSON file with new achievement payloads")
    le.add_argument("--json", action="store_true")
    ls = league_sub.add_parser("simulate", help="what-if epochs, store untouched")
    ls.add_argument("--epochs", type=int, required=True)
    ls.add_argument("--seed", type=int, required=True)
    ls.add_argument("--increments", help="indicator:lo:hi[,indicator:lo:hi...]")
    ls.add_argument("--year", type=int, default=2000)
    ls.add_argument("--json", action="store_true")
    lw = league_sub.add_parser("show", help="print the league board")
    lw.add_argument("--json", action="store_true")

    p = sub.add_parser("serve", help="run the HTTP gateway")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8400)
    p.add_argument("--read-only", action="store_true")
    p.add_argument("--token", help="bearer token required for mutations")

    p = sub.add_parser("audit", help="audit log operations")
    audit_sub = p.add_subparsers(dest="audit_command", required=True)
    ar = audit_sub.add_parser("replay", help="replay the log and check the digest")
    ar.add_argument("--json", action="store_true")

    return parser


def _open(args, read_only: bool = False) -> Platform:
    return Platform.open(args.store, read_only=read_only)


def run(args) -> int:
    if args.command == "init":
        platform = Platform.create(args.store)
        platform.close()
        sys.stdout.write(f"initialized store at {args.store}\n")
        return 0

    if args.command == "serve":
        import os
        import signal

        import uvicorn

        from .errors import PortInUse
        from .service import create_app

        platform = Platform.open(args.store, read_only=args.read_only)

        def terminate(signum, _frame):
            # uvicorn does not always capture signals; never leave a stale lock
            platform.close()
            signal.signal(signum, signal.SIG_DFL)
            os.kill(os.getpid(), signum)

        signal.signal(signal.SIGTERM, terminate)
        signal.signal(signal.SIGINT, terminate)
        try:
            app = create_app(platform, token=args.token)
            uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
        except OSError as exc:
            raise PortInUse(f"cannot bind {args.host}:{args.port}: {exc}") from exc
        finally:
            platform.close()
        return 0

    read_only_commands = {"rank", "report", "query", "decide"}
    league_reads = {"simulate", "show"}
    read_only = args.command in read_only_commands or (
        args.command == "league" and args.league_command in league_reads
    ) or (args.command == "psv" and args.psv_command == "show") or (
        args.command == "indicator" and args.indicator_command == "list"
    ) or (args.command == "audit")

    with _open(args, read_only=read_only) as platform:
        if args.command == "import":
            report = platform.import_achievements(args.csv, atomic=args.atomic)
            _print_doc(report, args.json)
            return 0 if not report["errors"] else 1
        if args.command == "register":
            doc = platform.register_resource(
                args.kind, args.display_name, args.member_of, args.id
            )
            _print_doc(doc, args.json)
            return 0
        if args.command == "indicator":
            if args.indicator_command == "define":
                doc = platform.define_indicator(
                    args.id, args.label, args.category, args.attribute,
                    args.aggregation, args.floor,
                )
            else:
                doc = platform.list_indicators()
            _print_doc(doc, args.json)
            return 0
        if args.command == "psv":
            if args.psv_command == "set":
                if args.file:
                    file_doc = _read_psv_file(args.file)
                    weights = file_doc["weights"]
                    label = args.label or file_doc.get("label", "")
                    vs_id = args.id or file_doc.get("id")
                else:
                    weights = parse_inline_weights(args.weights)
                    label = args.label
                    vs_id = args.id
                doc = platform.create_value_system(args.owner, weights, label, vs_id)
            elif args.psv_command == "show":
                doc = platform.get_value_system(args.id)
            else:
                doc = platform.aggregate_value_systems(
                    [i.strip() for i in args.ids.split(",") if i.strip()],
                    args.method,
                    args.leader,
                    args.label,
                    args.id,
                )
            _print_doc(doc, args.json)
            return 0
        if args.command == "rank":
            doc = platform.rank_resources(
                kind=args.kind,
                filter_text=args.filter_text,
                as_of_year=args.as_of_year,
                **_resolve_vs_args(args),
            )
            _print_doc(doc, args.json)
            return 0
        if args.command == "report":
            doc = platform.assessment_report(
                args.resource, filter_text=args.filter_text, **_resolve_vs_args(args)
            )
            _print_doc(doc, args.json)
            return 0
        if args.command == "query":
            result = platform.run_query(args.text, args.caller, args.vs_id)
            doc = result.to_doc()
            if args.explain:
                from . import query as query_mod

                doc["explain"] = query_mod.explain(result)
            _print_doc(doc, args.json)
            return 0
        if args.command == "decide":
            options = []
            for raw in args.option:
                option_id, _, linked = raw.partition("=")
                options.append(
                    (option_id, [r.strip() for r in linked.split(",") if r.strip()])
                )
            doc = platform.run_decision(args.text, options, args.caller, args.vs_id)
            _print_doc(doc, args.json)
            return 0
        if args.command == "league":
            if args.league_command == "init":
                sizes = tuple(int(s) for s in args.sizes.split(","))
                members = (
                    [m.strip() for m in args.members.split(",") if m.strip()]
                    if args.members
                    else None
                )
                doc = platform.league_init(
                    sizes=sizes,
                    seed_vs=args.seed_vs,
                    exchange_count=args.exchange,
                    members=members,
                )
            elif args.league_command == "epoch":
                achievements = []
                if args.achievements:
                    achievements = json.loads(
                        Path(args.achievements).read_text(encoding="utf-8")
                    )
                doc = platform.league_epoch(achievements)
            elif args.league_command == "simulate":
                increments = (
                    _parse_increments(args.increments) if args.increments else {}
                )
                doc = platform.league_simulate(
                    epochs=args.epochs,
                    seed=args.seed,
                    increments=increments,
                    year=args.year,
                )
            else:
                doc = platform.league_show()
            _print_doc(doc, args.json)
            return 0
        if args.command == "audit":
            doc = platform.replay_from_genesis()
            _print_doc(doc, args.json)
            return 0 if doc["match"] else 1
    raise AssertionError(f"unhandled command {args.command!r}")


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return run(args)
    except MeritError as exc:
        sys.stderr.write(f"error: {exc.code}: {exc.message}\n")
        return 1


if __name__ == "__main__":
    sys.exit(main())
