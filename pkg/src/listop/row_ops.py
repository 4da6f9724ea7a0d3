"""Basic row operations and the random row-operation distributions.

Every distribution is materialized as a :class:`RowOpTuple`, an explicit list
of ``n`` basic operations that can be applied, serialized and replayed.
Sampling and puncturing are stored as aggregations over singleton sets, so
they work over any alphabet.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

import numpy as np

from .codes import CodeMatrix, INT64_SAFE, is_prime, symbol_dtype
from .errors import InputError
from .repro import rng_for

KINDS = ("sampling", "puncturing", "xor_t", "aggregate_t", "fold_t", "hash_reduce")
AGGREGATE_KINDS = ("sampling", "puncturing", "aggregate_t", "fold_t")


@dataclass(frozen=True)
class BasicRowOp:
    """Either an inner product with ``v`` or an aggregation over the sorted set ``S``."""

    kind: str
    v: Optional[tuple] = None
    S: Optional[tuple] = None


@dataclass(frozen=True)
class HashCoordOp:
    """Per-coordinate hash ``h(x) = <m, x> + b`` over base-q digit tuples."""

    m: tuple
    b: int


@dataclass(frozen=True, eq=False)
class RowOpTuple:
    kind: str
    replacement: str
    seed: int
    n0: int
    q: int
    t: int
    sets: Optional[np.ndarray] = None      # (n, t) ascending indices, aggregate kinds
    vectors: Optional[np.ndarray] = None   # (n, n0) coefficients, xor_t
    hash_m: Optional[np.ndarray] = None    # (n, k), hash_reduce
    hash_b: Optional[np.ndarray] = None    # (n,), hash_reduce

    @property
    def n(self) -> int:
        for arr in (self.sets, self.vectors, self.hash_b):
            if arr is not None:
                return len(arr)
        return 0

    @property
    def ops(self) -> list:
        if self.kind == "xor_t":
            return [BasicRowOp("inner-product", v=tuple(int(a) for a in row)) for row in self.vectors]
        if self.kind == "hash_reduce":
            return [HashCoordOp(tuple(int(a) for a in m), int(b)) for m, b in zip(self.hash_m, self.hash_b)]
        return [BasicRowOp("aggregate", S=tuple(int(a) for a in row)) for row in self.sets]

    def __eq__(self, other):
        if not isinstance(other, RowOpTuple):
            return NotImplemented
        return self.to_dict() == other.to_dict()

    def to_dict(self) -> dict:
        out = dict(kind=self.kind, seed=self.seed, replacement=self.replacement,
                   n0=self.n0, q=self.q, t=self.t)
        if self.kind == "xor_t":
            out["ops"] = [{"v": [int(a) for a in row]} for row in self.vectors]
        elif self.kind == "hash_reduce":
            out["ops"] = [{"m": [int(a) for a in m], "b": int(b)} for m, b in zip(self.hash_m, self.hash_b)]
        else:
            out["ops"] = [{"S": [int(a) for a in row]} for row in self.sets]
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_dict(cls, d: dict) -> "RowOpTuple":
        kind = d["kind"]
        base = dict(kind=kind, replacement=d["replacement"], seed=int(d["seed"]),
                    n0=int(d["n0"]), q=int(d["q"]), t=int(d["t"]))
        ops = d["ops"]
        if kind == "xor_t":
            return cls(vectors=np.array([o["v"] for o in ops], dtype=np.int64), **base)
        if kind == "hash_reduce":
            return cls(hash_m=np.array([o["m"] for o in ops], dtype=np.int64),
                       hash_b=np.array([o["b"] for o in ops], dtype=np.int64), **base)
        if kind in AGGREGATE_KINDS:
            return cls(sets=np.array([o["S"] for o in ops], dtype=np.int64), **base)
        raise InputError(f"unknown row-operation kind {kind!r}")

    @classmethod
    def from_json(cls, text: str) -> "RowOpTuple":
        return cls.from_dict(json.loads(text))


def prime_power_base(Q: int) -> tuple:
    """``(p, k)`` with ``Q = p**k`` and ``p`` prime; input error otherwise."""
    for p in range(2, Q + 1):
        if Q % p == 0:
            k, rest = 0, Q
            while rest % p == 0:
                rest //= p
                k += 1
            if rest != 1:
                raise InputError(f"alphabet size {Q} is not a prime power")
            return p, k
    raise InputError(f"alphabet size {Q} is not a prime power")


def _family_size(kind: str, n0: int, t: int, q: int) -> int:
    if kind in ("sampling", "puncturing"):
        return n0
    if kind == "aggregate_t":
        return math.comb(n0, t)
    if kind == "xor_t":
        return math.comb(n0, t) * (q - 1) ** t
    raise InputError(f"no finite op family for {kind!r}")


def resolve_row_params(kind: str, params: dict, n0: int, q: int) -> dict:
    """Validate parameters and fill defaults; returns ``{n, t, replacement, k, base_q}``."""
    if kind not in KINDS:
        raise InputError(f"unknown row-operation kind {kind!r}; expected one of {KINDS}")
    p = dict(params)
    t = p.get("t")
    n = p.get("n")
    if kind in ("sampling", "puncturing"):
        t = 1
    elif kind == "hash_reduce":
        t = 1
        if n is not None and int(n) != n0:
            raise InputError("hash_reduce maps coordinates one-to-one: n must equal n0")
        n = n0
    else:
        if t is None:
            raise InputError(f"t is required for {kind}")
        t = int(t)
        if not 1 <= t <= n0:
            raise InputError(f"t must satisfy 1 <= t <= n0={n0}, got {t}")
    if kind == "fold_t":
        if n0 % t:
            raise InputError(f"t={t} does not divide n0={n0}; folding needs t | n0")
        if n is not None and int(n) != n0 // t:
            raise InputError(f"fold_t needs n = n0/t = {n0 // t}, got {n}")
        n = n0 // t
    if n is None:
        raise InputError(f"n is required for {kind}")
    n = int(n)
    if n < 1:
        raise InputError(f"n must be >= 1, got {n}")
    default_rep = "without" if kind in ("puncturing", "fold_t") else "with"
    replacement = p.get("replacement", default_rep)
    if replacement not in ("with", "without"):
        raise InputError(f"replacement must be 'with' or 'without', got {replacement!r}")
    if kind == "sampling" and replacement != "with":
        raise InputError("sampling draws with replacement; use puncturing for the other variant")
    if kind == "puncturing" and replacement != "without":
        raise InputError("puncturing draws without replacement; use sampling for the other variant")
    if kind == "fold_t":
        replacement = "without"
    if kind == "xor_t" and not is_prime(q):
        raise InputError(f"inner products need a prime alphabet, got q={q}")
    if replacement == "without" and kind not in ("fold_t", "hash_reduce"):
        if n > _family_size(kind, n0, t, q):
            raise InputError(f"n={n} exceeds the number of distinct {kind} operations")
    out = dict(n=n, t=t, replacement=replacement)
    if kind == "hash_reduce":
        base_q = p.get("base_q")
        if base_q is None:
            base_q, k = prime_power_base(q)
        else:
            base_q = int(base_q)
            if not is_prime(base_q):
                raise InputError(f"hash base alphabet must be prime, got {base_q}")
            k = round(math.log(q, base_q))
            if base_q**k != q:
                raise InputError(f"input alphabet {q} is not a power of {base_q}")
        out.update(base_q=base_q, k=k)
    return out


def _draw_distinct(draw_one, n: int, key):
    seen, out = set(), []
    while len(out) < n:
        item = draw_one()
        kk = key(item)
        if kk not in seen:
            seen.add(kk)
            out.append(item)
    return out


def draw_row_operation(kind: str, params: dict, seed: int, n0: int, q: int = 2) -> RowOpTuple:
    """Draw a replayable ``n``-tuple of basic row operations for an ``n0``-row code over ``q``."""
    rp = resolve_row_params(kind, params, n0, q)
    n, t, replacement = rp["n"], rp["t"], rp["replacement"]
    rng = rng_for(seed)
    base = dict(kind=kind, replacement=replacement, seed=int(seed), n0=n0, q=q, t=t)

    if kind == "sampling":
        return RowOpTuple(sets=rng.integers(0, n0, size=(n, 1)), **base)
    if kind == "puncturing":
        return RowOpTuple(sets=rng.permutation(n0)[:n].reshape(n, 1), **base)
    if kind == "fold_t":
        blocks = np.sort(rng.permutation(n0).reshape(n, t), axis=1)
        return RowOpTuple(sets=blocks, **base)
    if kind == "aggregate_t":
        draw = lambda: np.sort(rng.choice(n0, size=t, replace=False))
        if replacement == "with":
            sets = [draw() for _ in range(n)]
        else:
            sets = _draw_distinct(draw, n, lambda s: tuple(s.tolist()))
        return RowOpTuple(sets=np.array(sets, dtype=np.int64).reshape(n, t), **base)
    if kind == "xor_t":
        def draw():
            v = np.zeros(n0, dtype=np.int64)
            support = rng.choice(n0, size=t, replace=False)
            v[np.sort(support)] = rng.integers(1, q, size=t) if q > 2 else 1
            return v
        if replacement == "with":
            vecs = [draw() for _ in range(n)]
        else:
            vecs = _draw_distinct(draw, n, lambda v: v.tobytes())
        return RowOpTuple(vectors=np.array(vecs, dtype=np.int64).reshape(n, n0), **base)
    # hash_reduce
    bq, k = rp["base_q"], rp["k"]
    return RowOpTuple(hash_m=rng.integers(0, bq, size=(n, k)), hash_b=rng.integers(0, bq, size=n), **base)


def pack_digits(rows: np.ndarray, q: int) -> tuple:
    """Pack ``(t, N)`` digit rows big-endian base ``q``; returns ``(packed, q**t)``."""
    t = rows.shape[0]
    q_out = q**t
    if q_out <= INT64_SAFE:
        acc = np.zeros(rows.shape[1], dtype=np.int64)
        for r in rows:
            acc = acc * q + r.astype(np.int64)
    else:
        acc = np.zeros(rows.shape[1], dtype=object)
        for r in rows:
            acc = acc * q + r.astype(object)
    return acc, q_out


def symbol_digits(symbols: np.ndarray, q: int, k: int) -> np.ndarray:
    """Big-endian base-q digits of symbols, shape ``symbols.shape + (k,)``."""
    s = np.asarray(symbols).astype(np.int64)
    powers = np.array([q ** (k - 1 - i) for i in range(k)], dtype=np.int64)
    return (s[..., None] // powers) % q


def apply_row_op(C0: CodeMatrix, f: RowOpTuple) -> CodeMatrix:
    """Apply every operation in ``f`` to ``C0``; column ``j`` of the result is ``f(c_j)``."""
    if f.n0 != C0.n or f.q != C0.q:
        raise InputError(f"operation drawn for n0={f.n0}, q={f.q} but code has n0={C0.n}, q={C0.q}")
    E = C0.entries
    if f.kind == "xor_t":
        out = (f.vectors @ E.astype(np.int64)) % f.q
        return CodeMatrix(f.q, out)
    if f.kind == "hash_reduce":
        bq, k = prime_power_base(C0.q)
        digits = symbol_digits(E, bq, k)                      # (n0, N, k)
        out = (np.einsum("ijk,ik->ij", digits, f.hash_m) + f.hash_b[:, None]) % bq
        return CodeMatrix(bq, out)
    t = f.sets.shape[1]
    q_out = f.q**t
    out = np.empty((len(f.sets), C0.N), dtype=symbol_dtype(q_out))
    for i, S in enumerate(f.sets):
        out[i], _ = pack_digits(E[S], f.q)
    return CodeMatrix(q_out, out)


def _check_range(n0: int, w: int, t: int) -> None:
    if not (0 <= w <= n0 and 1 <= t <= n0):
        raise InputError(f"need 0 <= w <= n0 and 1 <= t <= n0, got n0={n0}, w={w}, t={t}")


def xor_parity_probability(n0: int, w: int, t: int, q: int = 2) -> Fraction:
    """Exact ``Pr[<v, x> != 0]`` for ``x`` of weight ``w`` and ``v`` uniform of weight ``t``.

    For ``q = 2`` this is the odd-overlap hypergeometric sum; for prime ``q`` the
    nonzero coefficients of ``v`` are uniform and an overlap of size ``j``
    leaves a nonzero sum with probability ``(1 - 1/q)(1 - (-1/(q-1))**j)``.
    """
    _check_range(n0, w, t)
    total = math.comb(n0, t)
    acc = Fraction(0)
    for j in range(max(0, t - (n0 - w)), min(w, t) + 1):
        ways = math.comb(w, j) * math.comb(n0 - w, t - j)
        if q == 2:
            nz = Fraction(j % 2)
        else:
            nz = Fraction(q - 1, q) * (1 - Fraction(-1, q - 1) ** j)
        acc += ways * nz
    return acc / total


def xor_parity_approximation(n0: int, w: int, t: int) -> float:
    """The with-replacement style approximation ``(1 - (1 - w/n0)**t) / 2``."""
    _check_range(n0, w, t)
    return 0.5 * (1 - (1 - w / n0) ** t)


def aggregation_agreement_probability(n0: int, w: int, t: int) -> Fraction:
    """Exact probability that a uniform size-``t`` subset misses a weight-``w`` support."""
    _check_range(n0, w, t)
    return Fraction(math.comb(n0 - w, t), math.comb(n0, t))


def aggregation_agreement_approximation(n0: int, w: int, t: int) -> float:
    _check_range(n0, w, t)
    return (1 - w / n0) ** t


def pairwise_distance_histogram(C0: CodeMatrix) -> dict:
    """``{w: number of unordered column pairs at distance w}`` over pairs of unequal columns."""
    words = C0.entries.T
    hist = {}
    for i in range(C0.N - 1):
        d = np.count_nonzero(words[i + 1:] != words[i], axis=1)
        vals, counts = np.unique(d[d > 0], return_counts=True)
        for v, c in zip(vals.tolist(), counts.tolist()):
            hist[v] = hist.get(v, 0) + c
    return hist


def _row_difference_probability(kind: str, n0: int, w: int, t: int, q: int) -> Fraction:
    """Probability that one transformed row separates a pair at distance ``w``."""
    if kind == "xor_t":
        return xor_parity_probability(n0, w, t, q)
    if kind == "hash_reduce":
        bq, _ = prime_power_base(q)
        return Fraction(w, n0) * (1 - Fraction(1, bq))
    tt = 1 if kind in ("sampling", "puncturing") else t
    return 1 - aggregation_agreement_probability(n0, w, tt)


def expected_pairwise_distance(C0: CodeMatrix, kind: str, params: dict) -> dict:
    """Exact expected relative distance of ``f(c), f(c')`` per unequal column pair.

    Returns ``{"min", "mean", "max", "pairs"}`` with exact fractions.  Every
    row of every supported distribution has the same marginal, so the
    expectation is the single-row separation probability.  For hash
    reduction the per-coordinate collision probability is ``1/q``.
    """
    rp = resolve_row_params(kind, params, C0.n, C0.q)
    hist = pairwise_distance_histogram(C0)
    if not hist:
        raise InputError("code has fewer than two distinct columns")
    vals = {w: _row_difference_probability(kind, C0.n, w, rp["t"], C0.q) for w in hist}
    pairs = sum(hist.values())
    mean = sum(vals[w] * c for w, c in hist.items()) / pairs
    return {"min": min(vals.values()), "mean": mean, "max": max(vals.values()), "pairs": pairs}


def _pair_collision_probability(kind: str, n0: int, n: int, w: int, t: int, q: int,
                                replacement: str) -> Fraction:
    """Exact probability that all ``n`` rows fail to separate a pair at distance ``w``."""
    if kind == "fold_t":
        return Fraction(0)  # blocks cover every coordinate, so distinct columns stay distinct
    if kind == "hash_reduce":
        bq, _ = prime_power_base(q)
        return Fraction(1, bq) ** w
    tt = 1 if kind in ("sampling", "puncturing") else t
    if kind == "xor_t":
        miss = 1 - xor_parity_probability(n0, w, tt, q)
    else:
        miss = aggregation_agreement_probability(n0, w, tt)
    if replacement == "with":
        return miss**n
    family = _family_size(kind, n0, tt, q)
    colliding = miss * family
    assert colliding.denominator == 1
    return Fraction(math.comb(int(colliding), n), math.comb(family, n))


def derived_eps(t: int, delta0) -> float:
    """The ``eps`` that makes ``t = 4 ln(1/eps) / delta0`` hold exactly."""
    return math.exp(-t * float(delta0) / 4)


def injectivity_failure_bound(C0: CodeMatrix, kind: str, params: dict, eps=None) -> dict:
    """Union bound on ``Pr[f not injective on distinct columns]`` plus the closed form.

    ``exact_union_bound`` sums the exact pair-collision probability over all
    unequal column pairs.  The closed form ``paper_bound`` is ``N^2 ((1+eps^2)/2)^n`` for
    inner products and ``N^2 eps^(2nt)`` for aggregation and folding; when
    ``eps`` is not given it is derived from ``t`` and the minimum distance.
    """
    rp = resolve_row_params(kind, params, C0.n, C0.q)
    n, t = rp["n"], rp["t"]
    hist = pairwise_distance_histogram(C0)
    exact = sum((_pair_collision_probability(kind, C0.n, n, w, t, C0.q, rp["replacement"]) * c
                 for w, c in hist.items()), Fraction(0))
    N = C0.N
    closed = None
    eps_used = None
    if kind in ("xor_t", "aggregate_t", "fold_t") and hist:
        eps_used = derived_eps(t, Fraction(min(hist), C0.n)) if eps is None else eps
        e = Fraction(eps_used).limit_denominator(10**12)
        if kind == "xor_t":
            closed = Fraction(N * N) * ((1 + e * e) / 2) ** n
        else:
            closed = Fraction(N * N) * e ** (2 * n * t)
    return {"exact_union_bound": exact, "paper_bound": closed, "eps": eps_used}
