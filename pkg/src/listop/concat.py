"""Outer code concatenated with a binary Hadamard inner code, and its randomized list decoder."""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .codes import CodeMatrix, to_fraction
from .constructions import hadamard
from .errors import InputError
from .repro import derive_seed, map_ordered, rng_for


@lru_cache(maxsize=16)
def _hadamard_words(k: int) -> np.ndarray:
    """Row ``m`` is the Hadamard encoding of message ``m``."""
    w = hadamard(k).entries.T.copy()
    w.setflags(write=False)
    return w


@dataclass(frozen=True)
class ConcatCode:
    outer: CodeMatrix
    inner_k: int

    def __post_init__(self):
        if self.inner_k < 1 or 2**self.inner_k < self.outer.q:
            raise InputError(f"inner code with 2^{self.inner_k} messages cannot carry {self.outer.q} symbols")

    @property
    def block(self) -> int:
        return 2**self.inner_k

    @property
    def length(self) -> int:
        return self.outer.n * self.block


def concat_encode(code: ConcatCode, index: int) -> np.ndarray:
    if not 0 <= index < code.outer.N:
        raise InputError(f"codeword index {index} out of range [0, {code.outer.N})")
    H = _hadamard_words(code.inner_k)
    return H[code.outer.entries[:, index].astype(np.int64)].reshape(-1).astype(np.int64)


def hadamard_list_decode(y, radius, num_messages=None) -> list:
    """All messages whose Hadamard encoding lies within ``floor(radius * 2^k)`` of ``y``."""
    y = np.asarray(y, dtype=np.int64)
    k = int(round(math.log2(len(y)))) if len(y) else 0
    if len(y) < 2 or 2**k != len(y):
        raise InputError(f"received word length {len(y)} is not a power of two >= 2")
    H = _hadamard_words(k)
    if num_messages is not None:
        H = H[:num_messages]
    r = math.floor(to_fraction(radius) * len(y))
    d = np.count_nonzero(H != y, axis=1)
    return [int(m) for m in np.flatnonzero(d <= r)]


def inner_radius_for(eps) -> Fraction:
    """Inner decoding radius ``1/2 - eps/2``."""
    return Fraction(1, 2) - to_fraction(eps) / 2


@dataclass(frozen=True)
class ConcatDecodeResult:
    candidates: tuple
    intermediate: tuple
    inner_list_sizes: tuple


def concat_list_decode(code: ConcatCode, y, eps, seed: int, outer_radius=None,
                       threads: int = 1) -> ConcatDecodeResult:
    """Inner list decoding at ``1/2 - eps/2``, one random pick per block, then outer list decoding.

    Empty inner lists yield a uniform outer symbol.  The outer radius
    defaults to ``1 - eps^3/8``.
    """
    y = np.asarray(y, dtype=np.int64)
    if y.shape != (code.length,):
        raise InputError(f"received word must have length {code.length}")
    eps = to_fraction(eps)
    inner_radius = inner_radius_for(eps)
    B, qo = code.block, code.outer.q

    def pick(i):
        lst = hadamard_list_decode(y[i * B:(i + 1) * B], inner_radius, num_messages=qo)
        rng = rng_for(derive_seed(seed, "position", i))
        sym = int(lst[int(rng.integers(0, len(lst)))]) if lst else int(rng.integers(0, qo))
        return sym, len(lst)

    picks = map_ordered(pick, range(code.outer.n), threads)
    yp = np.array([s for s, _ in picks], dtype=np.int64)
    rad = 1 - eps**3 / 8 if outer_radius is None else to_fraction(outer_radius)
    r = math.floor(rad * code.outer.n)
    d = np.count_nonzero(code.outer.entries.T != yp, axis=1)
    return ConcatDecodeResult(tuple(int(j) for j in np.flatnonzero(d <= r)),
                              tuple(int(s) for s in yp), tuple(n for _, n in picks))


def adversarial_corruption(code: ConcatCode, index: int, eps) -> np.ndarray:
    """Concentrated deterministic corruption of ``floor((1/2 - eps) * length)`` bits.

    Whole blocks are destroyed in order with ``floor((1/2 - eps/2) 2^k) + 1``
    flips each (enough to push the block outside the inner decoding radius);
    any leftover budget goes to the next block.  Returns the corrupted word.
    """
    eps = to_fraction(eps)
    x = concat_encode(code, index).copy()
    budget = max(0, math.floor((Fraction(1, 2) - eps) * code.length))
    kill = math.floor(inner_radius_for(eps) * code.block) + 1
    for blk in range(code.outer.n):
        if budget <= 0:
            break
        k = min(kill, budget, code.block)
        x[blk * code.block: blk * code.block + k] ^= 1
        budget -= k
    return x


def agreement_fraction(code: ConcatCode, index: int, intermediate) -> float:
    c = code.outer.entries[:, index]
    return float(np.count_nonzero(c == np.asarray(intermediate))) / code.outer.n
