"""Append-only audit events.

Every state mutation emits exactly one event carrying enough payload to
reapply it, so a snapshot plus the subsequent event stream reconstructs
the follow-up state byte for byte. Events have no wall-clock field on
purpose: audit logs produced from the same inputs must be identical.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

# Mutations of the resource graph and value-system registry.
RESOURCE_REGISTERED = "resource_registered"
ACHIEVEMENT_ATTACHED = "achievement_attached"
VERIFICATION_CHANGED = "verification_changed"
INDICATOR_DEFINED = "indicator_defined"
VALUE_SYSTEM_CREATED = "value_system_created"
PSV_ASSIGNED = "psv_assigned"

# League lifecycle.
LEAGUE_INITIALIZED = "league_initialized"
EPOCH_STARTED = "epoch_started"
LEAGUE_RANKED = "league_ranked"
PROMOTED = "promoted"
RELEGATED = "relegated"
LEADER_CHANGED = "leader_changed"

KINDS = (
    RESOURCE_REGISTERED,
    ACHIEVEMENT_ATTACHED,
    VERIFICATION_CHANGED,
    INDICATOR_DEFINED,
    VALUE_SYSTEM_CREATED,
    PSV_ASSIGNED,
    LEAGUE_INITIALIZED,
    EPOCH_STARTED,
    LEAGUE_RANKED,
    PROMOTED,
    RELEGATED,
    LEADER_CHANGED,
)


@dataclass
class AuditEvent:
    epoch: int
    kind: str
    subjects: list[str] = field(default_factory=list)
    payload: dict[str, Any] = field(default_factory=dict)
    seq: int | None = None  # assigned when the event is appended to a log

    def to_doc(self) -> dict[str, Any]:
        return {
            "seq": self.seq,
            "epoch": self.epoch,
            "kind": self.kind,
            "subjects": list(self.subjects),
            "payload": self.payload,
        }

    @classmethod
    def from_doc(cls, doc: dict[str, Any]) -> "AuditEvent":
        return cls(
            epoch=doc["epoch"],
            kind=doc["kind"],
            subjects=list(doc.get("subjects", [])),
            payload=dict(doc.get("payload", {})),
            seq=doc.get("seq"),
        )


def emit(
    events: list[AuditEvent],
    epoch: int,
    kind: str,
    subjects: list[str],
    payload: dict[str, Any],
) -> AuditEvent:
    event = AuditEvent(epoch=epoch, kind=kind, subjects=subjects, payload=payload)
    events.append(event)
    return event
