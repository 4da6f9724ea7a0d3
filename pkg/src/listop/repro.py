"""Seed derivation, evaluation caps and ordered parallel maps.

Every random quantity in listop is driven by an explicit 64-bit seed.  Batch
work derives one seed per item with :func:`derive_seed`, so an item can be
replayed in isolation and results do not depend on scheduling.
"""
from __future__ import annotations

import hashlib
import os
from concurrent.futures import ThreadPoolExecutor

import numpy as np

MASK64 = (1 << 64) - 1
GOLDEN_GAMMA = 0x9E3779B97F4A7C15
DEFAULT_CAP = 1 << 24


def splitmix64(x: int) -> int:
    """SplitMix64 output finalizer."""
    z = x & MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def label_hash(label: str) -> int:
    """Stable 64-bit hash of a stream label (BLAKE2b, little-endian)."""
    digest = hashlib.blake2b(label.encode("utf-8"), digest_size=8).digest()
    return int.from_bytes(digest, "little")


def derive_seed(master_seed: int, stream_label: str, index: int) -> int:
    word = (master_seed & MASK64) ^ label_hash(stream_label) ^ ((index * GOLDEN_GAMMA) & MASK64)
    return splitmix64(word)


def rng_for(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed & MASK64))


def default_cap() -> int:
    """Enumeration cap; the LISTOP_BUDGET environment variable overrides it."""
    raw = os.environ.get("LISTOP_BUDGET")
    if raw is None:
        return DEFAULT_CAP
    return int(raw, 0)


def resolve_cap(cap):
    return default_cap() if cap is None else int(cap)


def map_ordered(fn, items, threads: int = 1):
    """``list(map(fn, items))``, optionally on a thread pool; order is preserved."""
    items = list(items)
    if threads <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))
