"""Small shared helpers."""

import hashlib
import json


def canonical_json(obj) -> str:
    """Deterministic JSON serialization (sorted keys, no whitespace)."""
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def derive_seed(*parts) -> int:
    """Stable 63-bit seed from arbitrary string/int parts."""
    blob = "\x1f".join(str(p) for p in parts).encode("utf-8")
    return int.from_bytes(hashlib.sha256(blob).digest()[:8], "big") >> 1
