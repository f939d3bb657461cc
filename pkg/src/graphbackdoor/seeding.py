"""Deterministic seed derivation.

One master seed fans out to per-stage and per-item seeds via SHA-256 over the
UTF-8 string ``"<seed>|<part>|<part>|..."``, truncated to 64 bits.  The hash is
platform-independent, so two runs with the same master seed are byte-identical
anywhere.
"""

from __future__ import annotations

import hashlib

import numpy as np

__all__ = ["derive_seed", "derive_rng"]


def derive_seed(master: int, *parts: object) -> int:
    """64-bit seed derived from a master seed and a label path."""
    text = "|".join([str(int(master)), *[str(p) for p in parts]])
    digest = hashlib.sha256(text.encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big")


def derive_rng(master: int, *parts: object) -> np.random.Generator:
    """Fresh generator seeded by :func:`derive_seed`."""
    return np.random.default_rng(derive_seed(master, *parts))
