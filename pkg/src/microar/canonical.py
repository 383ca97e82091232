"""Canonical JSON used by package parts, journals, reports, and request logs:
UTF-8, lexicographically sorted keys, no insignificant whitespace."""

from __future__ import annotations

import json
from typing import Any


def canonical_dumps(value: Any) -> str:
    return json.dumps(value, sort_keys=True, separators=(",", ":"), ensure_ascii=False, allow_nan=False)


def canonical_bytes(value: Any) -> bytes:
    return canonical_dumps(value).encode("utf-8")


def canonical_line(value: Any) -> str:
    """One canonical JSON document plus newline, for append-only journals."""
    return canonical_dumps(value) + "\n"
