"""Canonical JSON serialization and content digests.

State equality must be equivalent to snapshot byte equality, so every
serialization that feeds a digest or a wire payload goes through here:
keys sorted, minimal separators, shortest round-trip float formatting,
non-finite numbers rejected.
"""

from __future__ import annotations

import json
from typing import Any

FNV64_OFFSET = 0xCBF29CE484222325
FNV64_PRIME = 0x100000001B3
_MASK64 = (1 << 64) - 1


def canonical_json(doc: Any) -> str:
    return json.dumps(
        doc, sort_keys=True, separators=(",", ":"), ensure_ascii=False, allow_nan=False
    )


def canonical_bytes(doc: Any) -> bytes:
    return canonical_json(doc).encode("utf-8")


def fnv1a64(data: bytes) -> int:
    """64-bit FNV-1a hash of raw bytes."""
    h = FNV64_OFFSET
    for b in data:
        h ^= b
        h = (h * FNV64_PRIME) & _MASK64
    return h


def digest_hex(doc: Any) -> str:
    """Hex digest of a document's canonical serialization."""
    return f"{fnv1a64(canonical_bytes(doc)):016x}"
