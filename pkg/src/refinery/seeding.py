"""Stable seed derivation, independent of PYTHONHASHSEED."""

from __future__ import annotations

import hashlib


def derive_seed(*parts: object) -> int:
    """Derive a 63-bit child seed from arbitrary labelled parts.

    Built on SHA-256 of the parts' text form, so the same inputs give the
    same seed on every platform and in every process.
    """
    material = "\x1f".join(str(p) for p in parts).encode("utf-8")
    digest = hashlib.sha256(material).digest()
    return int.from_bytes(digest[:8], "big") >> 1
