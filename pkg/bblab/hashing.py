"""
bblab/hashing.py
-----------------------------------------------------------------------------
Canonical JSON and SHA-256 digests for report lists and lattice payloads.

Canonical form
--------------
- Integers stay JSON integers, however large.
- Rationals with denominator 1 become integers; others become ``"p/q"``
  strings, so a round trip through JSON never loses exactness.
- Enums serialise as their value; tuples as lists; mapping keys as strings.
- ``json.dumps(..., sort_keys=True, separators=(",", ":"))`` fixes the byte
  layout, which makes the digest independent of dict insertion order.

Exports
-------
to_canonical(value) -> JSON-ready value
canonical_json(value) -> str
compute_digest(value) -> str
"""

from __future__ import annotations

import hashlib
import json
from enum import Enum
from fractions import Fraction
from typing import Any, Mapping


def to_canonical(value: Any) -> Any:
    """
    Convert ``value`` into plain JSON types following the canonical rules.

    Raises
    ------
    TypeError : ``value`` contains an object with no canonical form.
    """
    if value is None or isinstance(value, (bool, str)):
        return value
    if isinstance(value, Enum):
        return to_canonical(value.value)
    if isinstance(value, int):
        return value
    if isinstance(value, Fraction):
        if value.denominator == 1:
            return value.numerator
        return f"{value.numerator}/{value.denominator}"
    if isinstance(value, Mapping):
        return {str(k): to_canonical(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_canonical(v) for v in value]
    raise TypeError(f"no canonical JSON form for {type(value).__name__}")


def canonical_json(value: Any) -> str:
    """Compact, key-sorted JSON of ``to_canonical(value)``."""
    return json.dumps(
        to_canonical(value), sort_keys=True, separators=(",", ":"), ensure_ascii=False
    )


def compute_digest(value: Any) -> str:
    """64-character lowercase hex SHA-256 of ``canonical_json(value)``."""
    return hashlib.sha256(canonical_json(value).encode("utf-8")).hexdigest()
