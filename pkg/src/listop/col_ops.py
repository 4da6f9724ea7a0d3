"""Random column operations: subcodes drawn with or without replacement."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

import numpy as np

from .codes import CodeMatrix, absolute_radius, distinct_columns, to_fraction
from .errors import InputError
from .repro import rng_for


@dataclass(frozen=True, eq=False)
class SubcodeDraw:
    retained: np.ndarray
    p: Optional[Fraction]
    replacement: str
    seed: int

    @property
    def N(self) -> int:
        return len(self.retained)

    def to_dict(self) -> dict:
        return {"p": None if self.p is None else str(self.p), "N": self.N,
                "replacement": self.replacement, "seed": self.seed,
                "indices": [int(i) for i in self.retained]}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "SubcodeDraw":
        d = json.loads(text)
        return cls(np.array(d["indices"], dtype=np.int64),
                   None if d["p"] is None else Fraction(d["p"]), d["replacement"], int(d["seed"]))


def subcode_size(N0: int, p=None, N=None) -> int:
    """``N`` if given, else ``max(1, round(p * N0))`` with ties rounded up."""
    if (p is None) == (N is None):
        raise InputError("give exactly one of p or N")
    if N is not None:
        N = int(N)
        if N < 1:
            raise InputError(f"subcode size must be >= 1, got {N}")
        return N
    p = to_fraction(p)
    if p <= 0:
        raise InputError(f"retention parameter must be positive, got {p}")
    return max(1, math.floor(p * N0 + Fraction(1, 2)))


def subcode_retention(q: int, eps, n: int, L0: int) -> Fraction:
    """``p = 1 / (q^(eps n) L0)``, exact when ``eps * n`` is an integer."""
    e = to_fraction(eps) * n
    if e.denominator == 1:
        return Fraction(1, q ** int(e) * L0)
    return Fraction(1.0 / (q ** float(e) * L0)).limit_denominator(10**15)


def draw_subcode(C0: CodeMatrix, p=None, N=None, replacement: str = "with", seed: int = 0):
    """Retain ``N`` columns of ``C0`` chosen uniformly; returns ``(subcode, draw)``."""
    size = subcode_size(C0.N, p, N)
    rng = rng_for(seed)
    if replacement == "with":
        idx = rng.integers(0, C0.N, size=size)
    elif replacement == "without":
        if size > C0.N:
            raise InputError(f"cannot retain {size} of {C0.N} columns without replacement")
        idx = rng.permutation(C0.N)[:size]
    else:
        raise InputError(f"replacement must be 'with' or 'without', got {replacement!r}")
    draw = SubcodeDraw(idx.astype(np.int64), None if p is None else to_fraction(p), replacement, int(seed))
    return C0.select(draw.retained), draw


def distinct_count(C: CodeMatrix) -> int:
    return int(len(distinct_columns(C)))


def expected_ball_load(C0: CodeMatrix, z, rho, p) -> Fraction:
    """Expected number of subcode columns inside ``B(z, floor(rho n))`` at retention ``p``."""
    r, _ = absolute_radius(rho, C0.n)
    z = np.asarray(list(z))
    if z.shape != (C0.n,):
        raise InputError(f"center must have length {C0.n}")
    count = int(np.count_nonzero(np.count_nonzero(C0.entries.T != z, axis=1) <= r))
    return to_fraction(p) * C0.N * Fraction(count, C0.N)
