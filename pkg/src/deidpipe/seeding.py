"""Deterministic seed derivation shared by obfuscation components.

Every random decision in the pipeline draws from a generator keyed by
(seed, ...string parts) through a keyed BLAKE2 hash, so outputs are pure
functions of (input, config, seed): adding documents, reordering work, or
changing parallelism never perturbs existing draws. Python's builtin
``hash()`` is never used (it is salted per process).
"""

from __future__ import annotations

import hashlib
import random


def keyed_int(seed: int, *parts: str) -> int:
    h = hashlib.blake2b(digest_size=8, key=str(seed).encode("utf-8"))
    for part in parts:
        h.update(part.encode("utf-8"))
        h.update(b"\x1f")
    return int.from_bytes(h.digest(), "big")


def keyed_rng(seed: int, *parts: str) -> random.Random:
    return random.Random(keyed_int(seed, *parts))
