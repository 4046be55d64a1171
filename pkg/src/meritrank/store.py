"""Durable persistence: canonical snapshots plus an append-only audit log.

A store directory holds three files:

    store.json   current state snapshot (canonical JSON, digest-protected)
    audit.ndjson one audit event per line, gap-free monotone sequence
    store.lock   single-writer lock, held for the writer's lifetime

Snapshots are canonical: identical states serialize to identical bytes, so
state equality is byte equality and the embedded 64-bit FNV-1a digest
detects any corruption on load.
"""

from __future__ import annotations

import csv
import json
import os
from pathlib import Path
from typing import Any, Iterator

from .audit import AuditEvent
from .canon import canonical_bytes, canonical_json, fnv1a64
from .errors import (
    DigestMismatch,
    HeaderMismatch,
    IntegrityViolation,
    IoError,
    MeritError,
    SchemaVersionUnsupported,
    StoreLocked,
)
from .state import PlatformState, integrity_problems

SNAPSHOT_VERSION = 1
SNAPSHOT_FILE = "store.json"
AUDIT_FILE = "audit.ndjson"
LOCK_FILE = "store.lock"

IMPORT_HEADER = ["owner", "category", "year", "attr_name", "attr_value", "evidence_uri"]


def state_digest(state: PlatformState) -> str:
    return f"{fnv1a64(canonical_bytes(state.to_doc())):016x}"


def save_snapshot(state: PlatformState, path: str | Path) -> str:
    """Write the canonical snapshot atomically; returns the state digest."""
    doc = state.to_doc()
    digest = f"{fnv1a64(canonical_bytes(doc)):016x}"
    envelope = {"version": SNAPSHOT_VERSION, "digest": digest, "state": doc}
    path = Path(path)
    tmp = path.with_suffix(".tmp")
    try:
        tmp.write_text(canonical_json(envelope) + "\n", encoding="utf-8")
        tmp.replace(path)
    except OSError as exc:
        raise IoError(f"cannot write snapshot {path}: {exc}") from exc
    return digest


def load_snapshot(path: str | Path) -> PlatformState:
    path = Path(path)
    try:
        raw = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise IoError(f"cannot read snapshot {path}: {exc}") from exc
    try:
        envelope = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise DigestMismatch(f"snapshot {path} is not valid JSON: {exc}") from exc
    version = envelope.get("version")
    if version != SNAPSHOT_VERSION:
        raise SchemaVersionUnsupported(
            f"snapshot version {version!r} unsupported (expected {SNAPSHOT_VERSION})"
        )
    doc = envelope.get("state")
    recorded = envelope.get("digest")
    actual = f"{fnv1a64(canonical_bytes(doc)):016x}"
    if recorded != actual:
        raise DigestMismatch(
            f"snapshot digest mismatch: recorded {recorded}, computed {actual}"
        )
    try:
        state = PlatformState.from_doc(doc)
    except (KeyError, TypeError, ValueError, MeritError) as exc:
        raise IntegrityViolation(f"snapshot cannot be reconstructed: {exc}") from exc
    problems = integrity_problems(state)
    if problems:
        raise IntegrityViolation("; ".join(problems))
    return state


class AuditLog:
    """Newline-delimited JSON event log with a gap-free sequence."""

    def __init__(self, path: str | Path):
        self.path = Path(path)
        self._next_seq = self._scan_next_seq()

    def _scan_next_seq(self) -> int:
        if not self.path.exists():
            return 1
        last = 0
        with self.path.open(encoding="utf-8") as handle:
            for line in handle:
                line = line.strip()
                if line:
                    last = json.loads(line)["seq"]
        return last + 1

    @property
    def next_seq(self) -> int:
        return self._next_seq

    def append(self, event: AuditEvent) -> int:
        return self.append_many([event])[-1]

    def append_many(self, events: list[AuditEvent]) -> list[int]:
        """Assign sequence numbers and write; durable before returning."""
        sequences = []
        try:
            with self.path.open("a", encoding="utf-8") as handle:
                for event in events:
                    event.seq = self._next_seq
                    self._next_seq += 1
                    handle.write(canonical_json(event.to_doc()) + "\n")
                    sequences.append(event.seq)
                handle.flush()
                os.fsync(handle.fileno())
        except OSError as exc:
            raise IoError(f"cannot append to audit log {self.path}: {exc}") from exc
        return sequences

    def events(self, from_seq: int = 1) -> Iterator[AuditEvent]:
        if not self.path.exists():
            return
        with self.path.open(encoding="utf-8") as handle:
            for line in handle:
                line = line.strip()
                if not line:
                    continue
                event = AuditEvent.from_doc(json.loads(line))
                if event.seq is not None and event.seq >= from_seq:
                    yield event


class StoreLock:
    """Exclusive writer lock on a store directory."""

    def __init__(self, directory: str | Path):
        self.path = Path(directory) / LOCK_FILE
        self._fd: int | None = None

    def acquire(self) -> None:
        try:
            self._fd = os.open(self.path, os.O_CREAT | os.O_EXCL | os.O_WRONLY)
            os.write(self._fd, f"{os.getpid()}\n".encode())
        except FileExistsError:
            raise StoreLocked(
                f"store is locked by another writer ({self.path}); "
                "remove the lock file if that writer is gone"
            ) from None
        except OSError as exc:
            raise IoError(f"cannot create lock file {self.path}: {exc}") from exc

    def release(self) -> None:
        if self._fd is not None:
            os.close(self._fd)
            self._fd = None
            try:
                self.path.unlink()
            except FileNotFoundError:
                pass

    def __enter__(self) -> "StoreLock":
        self.acquire()
        return self

    def __exit__(self, *exc_info) -> None:
        self.release()


def _parse_attr_value(raw: str) -> Any:
    raw = raw.strip()
    if raw == "true":
        return True
    if raw == "false":
        return False
    try:
        return int(raw)
    except ValueError:
        pass
    try:
        return float(raw)
    except ValueError:
        pass
    return raw


def read_achievement_rows(csv_path: str | Path) -> list[dict[str, Any]]:
    """Parse the bulk-import CSV into attach payloads, tagged with line numbers."""
    path = Path(csv_path)
    try:
        handle = path.open(encoding="utf-8", newline="")
    except OSError as exc:
        raise IoError(f"cannot read {path}: {exc}") from exc
    with handle:
        reader = csv.reader(handle)
        try:
            header = next(reader)
        except StopIteration:
            raise HeaderMismatch(f"{path} is empty, expected header {IMPORT_HEADER}")
        if [h.strip() for h in header] != IMPORT_HEADER:
            raise HeaderMismatch(
                f"unexpected header {header}, expected {IMPORT_HEADER}"
            )
        rows = []
        for line_no, row in enumerate(reader, start=2):
            if not row or all(not cell.strip() for cell in row):
                continue
            rows.append({"line": line_no, "cells": row})
    payloads = []
    for row in rows:
        cells = row["cells"]
        if len(cells) != len(IMPORT_HEADER):
            payloads.append(
                {"line": row["line"], "error": f"expected {len(IMPORT_HEADER)} columns"}
            )
            continue
        owner, category, year_raw, attr_name, attr_value, evidence = [
            c.strip() for c in cells
        ]
        try:
            year = int(year_raw)
        except ValueError:
            payloads.append({"line": row["line"], "error": f"bad year {year_raw!r}"})
            continue
        payloads.append(
            {
                "line": row["line"],
                "owner": owner,
                "category": category,
                "attributes": {attr_name: _parse_attr_value(attr_value)},
                "year": year,
                "evidence_uri": evidence or None,
            }
        )
    return payloads
