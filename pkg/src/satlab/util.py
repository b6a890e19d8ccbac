"""Small shared helpers: stable seed derivation and id hashing."""

from __future__ import annotations

import hashlib


def derive_seed(*parts: object) -> int:
    """Derive a 63-bit seed from arbitrary parts, stable across runs and
    platforms (unlike hash())."""
    text = ":".join(repr(p) for p in parts)
    digest = hashlib.sha256(text.encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big") >> 1


def stable_id(*parts: object) -> str:
    """Short stable hex identifier derived from the given parts."""
    text = ":".join(repr(p) for p in parts)
    return hashlib.sha256(text.encode("utf-8")).hexdigest()[:16]
