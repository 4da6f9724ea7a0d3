"""Code matrices, Hamming metrics, pluralities and brute-force list-decoding oracles.

A code is an ``n x N`` matrix over the alphabet ``{0, ..., q-1}``; column ``j``
is codeword ``j``.  Columns form a multiset: duplicates are kept and never
merged implicitly.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from .errors import BudgetError, DegenerateCodeError, InputError
from .repro import resolve_cap, rng_for

INT64_SAFE = 1 << 62

VERDICT_DECODABLE = "decodable"
VERDICT_VIOLATED = "violated"
VERDICT_NO_COUNTEREXAMPLE = "no-counterexample"
VERDICT_BUDGET = "exhausted-budget"


def to_fraction(x) -> Fraction:
    """Exact rational for ``x``; floats are snapped to the nearest small-denominator rational."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, np.integer)):
        return Fraction(int(x))
    if isinstance(x, str):
        return Fraction(x)
    return Fraction(float(x)).limit_denominator(10**9)


def is_prime(q: int) -> bool:
    if q < 2:
        return False
    return all(q % d for d in range(2, math.isqrt(q) + 1))


def symbol_dtype(q: int):
    return np.int64 if q <= INT64_SAFE else object


@dataclass(frozen=True)
class Alphabet:
    q: int
    field_kind: str = "prime-field"

    def __post_init__(self):
        if self.q < 2:
            raise InputError(f"alphabet size must be >= 2, got {self.q}")
        if self.field_kind not in ("prime-field", "power-of-prime-as-tuples"):
            raise InputError(f"unknown field kind {self.field_kind!r}")

    @property
    def is_field(self) -> bool:
        return is_prime(self.q)


@dataclass(frozen=True, eq=False)
class CodeMatrix:
    """An ``n x N`` symbol matrix whose columns are codewords."""

    q: int
    entries: np.ndarray

    def __post_init__(self):
        q = int(self.q)
        if q < 2:
            raise InputError(f"alphabet size must be >= 2, got {q}")
        arr = np.array(self.entries, dtype=symbol_dtype(q), copy=True)
        if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
            raise InputError(f"code matrix must be n x N with n, N >= 1, got shape {arr.shape}")
        if arr.size and (np.any(arr < 0) or np.any(arr >= q)):
            raise InputError(f"entries must lie in [0, {q})")
        arr.setflags(write=False)
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "entries", arr)

    @classmethod
    def from_codewords(cls, q: int, codewords) -> "CodeMatrix":
        words = np.array([list(c) for c in codewords], dtype=symbol_dtype(q))
        if words.ndim != 2:
            raise InputError("codewords must all have the same length")
        return cls(q, words.T)

    @property
    def n(self) -> int:
        return self.entries.shape[0]

    @property
    def N(self) -> int:
        return self.entries.shape[1]

    @property
    def alphabet(self) -> Alphabet:
        return Alphabet(self.q)

    def column(self, j: int) -> np.ndarray:
        return self.entries[:, j]

    def codewords(self):
        return [tuple(int(s) for s in self.entries[:, j]) for j in range(self.N)]

    def select(self, indices) -> "CodeMatrix":
        return CodeMatrix(self.q, self.entries[:, list(indices)])

    def __eq__(self, other):
        if not isinstance(other, CodeMatrix):
            return NotImplemented
        return (
            self.q == other.q
            and self.entries.shape == other.entries.shape
            and bool(np.all(self.entries == other.entries))
        )

    def __hash__(self):
        return hash((self.q, self.entries.shape, self.entries.tobytes()))

    def __repr__(self):
        return f"CodeMatrix(q={self.q}, n={self.n}, N={self.N})"


def _as_word(x) -> np.ndarray:
    return np.asarray(list(x) if not isinstance(x, np.ndarray) else x)


def hamming_distance(x, y) -> int:
    x, y = _as_word(x), _as_word(y)
    if x.shape != y.shape:
        raise InputError(f"length mismatch: {x.shape[0]} vs {y.shape[0]}")
    return int(np.count_nonzero(x != y))


def agreement(x, y) -> int:
    x = _as_word(x)
    return x.shape[0] - hamming_distance(x, y)


def distinct_columns(C: CodeMatrix) -> np.ndarray:
    """Indices of the first occurrence of each distinct column."""
    seen = {}
    for j in range(C.N):
        seen.setdefault(C.entries[:, j].tobytes() if C.entries.dtype != object
                        else tuple(C.entries[:, j]), j)
    return np.array(sorted(seen.values()), dtype=np.int64)


def code_min_distance(C: CodeMatrix) -> Fraction:
    """Relative minimum distance over pairs of distinct columns (exhaustive)."""
    idx = distinct_columns(C)
    if len(idx) < 2:
        raise DegenerateCodeError("minimum distance needs at least two distinct codewords")
    words = C.entries[:, idx].T
    best = C.n
    for i in range(len(words) - 1):
        d = np.count_nonzero(words[i + 1:] != words[i], axis=1)
        best = min(best, int(d.min()))
    return Fraction(best, C.n)


def _check_index_set(C: CodeMatrix, lam) -> np.ndarray:
    lam = np.asarray(list(lam), dtype=np.int64)
    if lam.size == 0:
        raise InputError("index set must be nonempty")
    if np.any(lam < 0) or np.any(lam >= C.N):
        raise InputError("index set refers to a column outside the code")
    return lam


def plurality_vector(C: CodeMatrix, lam) -> np.ndarray:
    """Per-row count of the most frequent symbol among the columns in ``lam``."""
    lam = _check_index_set(C, lam)
    sub = C.entries[:, lam]
    eq = sub[:, :, None] == sub[:, None, :]
    return eq.sum(axis=2).max(axis=1).astype(np.int64)


def max_agreement_sum(C: CodeMatrix, lam) -> int:
    """``max_z sum_{c in lam} agr(c, z)``, computed as the sum of pluralities."""
    return int(plurality_vector(C, lam).sum())


def plurality_center(C: CodeMatrix, lam) -> tuple:
    """A center ``z`` attaining :func:`max_agreement_sum` (smallest symbol on ties)."""
    lam = _check_index_set(C, lam)
    sub = C.entries[:, lam]
    z = []
    for row in sub:
        vals, counts = np.unique(row, return_counts=True)
        z.append(int(vals[np.argmax(counts)]))
    return tuple(z)


def plurality_sums(entries: np.ndarray, sets: np.ndarray, chunk_elems: int = 1 << 22) -> np.ndarray:
    """Plurality sums for many index sets at once.

    ``entries`` has shape ``(..., n, N)`` and ``sets`` shape ``(S, L)``; the
    result has shape ``(..., S)``.
    """
    sets = np.asarray(sets, dtype=np.int64)
    S, L = sets.shape
    lead = entries.shape[:-1]
    per_set = max(1, int(np.prod(lead)) * L * L)
    step = max(1, chunk_elems // per_set)
    out = np.empty(entries.shape[:-2] + (S,), dtype=np.int64)
    for lo in range(0, S, step):
        sub = entries[..., sets[lo:lo + step]]
        eq = sub[..., :, None] == sub[..., None, :]
        pl = eq.sum(axis=-1).max(axis=-1)
        out[..., lo:lo + step] = pl.sum(axis=-2)
    return out


def hamming_ball_volume(q: int, n: int, r: int) -> int:
    if r < 0 or r > n:
        raise InputError(f"radius must satisfy 0 <= r <= n, got r={r}, n={n}")
    return sum(math.comb(n, i) * (q - 1) ** i for i in range(r + 1))


def absolute_radius(rho, n: int) -> tuple:
    """``(floor(rho * n), rho * n is integral)`` for a relative radius."""
    rho = to_fraction(rho)
    if rho < 0 or rho > 1:
        raise InputError(f"relative radius must lie in [0, 1], got {rho}")
    scaled = rho * n
    return math.floor(scaled), scaled.denominator == 1


def word_digits(indices: np.ndarray, q: int, n: int) -> np.ndarray:
    """Big-endian base-q digits of word indices, shape ``(len(indices), n)``."""
    powers = np.array([q ** (n - 1 - i) for i in range(n)], dtype=np.int64)
    return (np.asarray(indices, dtype=np.int64)[:, None] // powers[None, :]) % q


def iter_all_words(q: int, n: int, chunk: int = 1 << 14):
    total = q**n
    for lo in range(0, total, chunk):
        yield word_digits(np.arange(lo, min(total, lo + chunk), dtype=np.int64), q, n)


def _check_space_budget(q: int, n: int, cap) -> None:
    cap = resolve_cap(cap)
    if q**n > cap:
        raise BudgetError(f"exhaustive enumeration of {q}^{n} words exceeds the cap {cap}")


def ball_counts(C: CodeMatrix, centers: np.ndarray, r: int) -> np.ndarray:
    """Number of codewords within distance ``r`` of each center (rows of ``centers``)."""
    words = C.entries.T
    centers = np.asarray(centers)
    out = np.empty(len(centers), dtype=np.int64)
    step = max(1, (1 << 22) // max(1, C.N * C.n))
    for lo in range(0, len(centers), step):
        block = centers[lo:lo + step]
        d = np.count_nonzero(block[:, None, :] != words[None, :, :], axis=2)
        out[lo:lo + step] = np.count_nonzero(d <= r, axis=1)
    return out


def max_ball_count(C: CodeMatrix, rho, cap=None) -> tuple:
    """Exhaustive ``(max_z |B(z, floor(rho n)) cap C|, argmax z)``."""
    _check_space_budget(C.q, C.n, cap)
    r, _ = absolute_radius(rho, C.n)
    best, best_z = -1, None
    for block in iter_all_words(C.q, C.n):
        counts = ball_counts(C, block, r)
        i = int(np.argmax(counts))
        if counts[i] > best:
            best, best_z = int(counts[i]), tuple(int(s) for s in block[i])
    return best, best_z


@dataclass(frozen=True)
class LdReport:
    """Outcome of a list-decodability check.

    ``decodable`` is ``True`` only for an exhaustive proof, ``False`` when a
    witness was found, and ``None`` when a sampled or heuristic search ended
    without a counterexample.
    """

    decodable: Optional[bool]
    radius: Fraction
    list_bound: int
    witness_center: Optional[tuple]
    witness_list_size: int
    mode: str
    verdict: str
    abs_radius: int
    radius_integral: bool
    average_radius: bool = False
    witness_set: Optional[tuple] = None
    witness_value: Optional[int] = None
    evaluations: int = 0
    notes: tuple = field(default_factory=tuple)


def is_list_decodable(C: CodeMatrix, rho, L: int, mode: str = "exhaustive", cap=None,
                      samples: int = 4096, seed: int = 0) -> LdReport:
    """Check that every ball of relative radius ``rho`` holds fewer than ``L`` codewords."""
    rho = to_fraction(rho)
    r, integral = absolute_radius(rho, C.n)
    if L < 1:
        raise InputError(f"list bound must be >= 1, got {L}")
    notes = () if integral else (f"rho*n = {rho * C.n} floored to {r}",)
    common = dict(radius=rho, list_bound=L, abs_radius=r, radius_integral=integral, notes=notes)

    if mode == "exhaustive":
        best, z = max_ball_count(C, rho, cap)
        ok = best < L
        return LdReport(decodable=ok, witness_center=None if ok else z, witness_list_size=best,
                        mode=mode, verdict=VERDICT_DECODABLE if ok else VERDICT_VIOLATED,
                        evaluations=C.q**C.n, **common)
    if mode != "sampled":
        raise InputError(f"unknown mode {mode!r}")

    rng = rng_for(seed)
    half = samples // 2
    uniform = rng.integers(0, C.q, size=(half, C.n))
    picks = rng.integers(0, C.N, size=samples - half)
    near = C.entries[:, picks].T.astype(np.int64).copy()
    for row in near:
        k = int(rng.integers(0, r + 1))
        pos = rng.choice(C.n, size=k, replace=False)
        row[pos] = (row[pos] + rng.integers(1, C.q, size=k)) % C.q if C.q > 1 else row[pos]
    centers = np.concatenate([uniform, near])
    counts = ball_counts(C, centers, r)
    i = int(np.argmax(counts))
    if counts[i] >= L:
        return LdReport(decodable=False, witness_center=tuple(int(s) for s in centers[i]),
                        witness_list_size=int(counts[i]), mode=mode, verdict=VERDICT_VIOLATED,
                        evaluations=samples, **common)
    return LdReport(decodable=None, witness_center=None, witness_list_size=int(counts[i]),
                    mode=mode, verdict=VERDICT_NO_COUNTEREXAMPLE, evaluations=samples, **common)


def relabel_symbols(entries: np.ndarray) -> tuple:
    """Map symbols to dense ids per row, preserving equality.

    Returns ``(ids, K)`` where ``ids`` has the shape of ``entries`` and values
    in ``[0, K)``.
    """
    order = np.argsort(entries, axis=-1, kind="stable")
    srt = np.take_along_axis(entries, order, axis=-1)
    new = np.zeros(srt.shape, dtype=np.int64)
    new[..., 1:] = (srt[..., 1:] != srt[..., :-1]).astype(np.int64)
    runs = np.cumsum(new, axis=-1)
    ids = np.empty_like(runs)
    np.put_along_axis(ids, order, runs, axis=-1)
    K = int(runs[..., -1].max()) + 1 if runs.size else 1
    return ids, K


@dataclass
class SetSearchResult:
    best_set: tuple
    best_total: int
    evaluations: int
    exhausted: bool


def search_max_plurality_set(entries: np.ndarray, L: int, seed: int = 0, starts: int = 8,
                             budget: int = 1 << 22) -> SetSearchResult:
    """Greedy construction plus best-improvement swaps maximizing a total plurality sum.

    ``entries`` has shape ``(T, n, N)``; the objective for an index set is the
    plurality sum added up over the ``T`` leading slices.  The search is a
    heuristic: it returns a local optimum, not a certified maximum.
    ``budget`` bounds the number of candidate-set evaluations.
    """
    if entries.ndim == 2:
        entries = entries[None]
    T, n, N = entries.shape
    if not 1 <= L <= N:
        raise InputError(f"set size must satisfy 1 <= L <= N, got L={L}, N={N}")
    ids, K = relabel_symbols(entries)
    rng = rng_for(seed)
    start_pts = list(range(N)) if N <= starts else sorted(rng.choice(N, size=starts, replace=False).tolist())
    tt, jj = np.meshgrid(np.arange(T), np.arange(n), indexing="ij")

    def counts_of(members):
        cnt = np.zeros((T, n, K), dtype=np.int64)
        for m in members:
            cnt[tt, jj, ids[:, :, m]] += 1
        return cnt

    def add_scores(cnt):
        pl = cnt.max(axis=2)
        gained = np.take_along_axis(cnt, ids, axis=2) + 1
        return np.maximum(pl[:, :, None], gained).sum(axis=(0, 1))

    evals = 0
    exhausted = False
    best_set, best_total = None, -1
    for s in start_pts:
        members = [s]
        cnt = counts_of(members)
        while len(members) < L:
            scores = add_scores(cnt)
            evals += N
            scores[members] = -1
            b = int(np.argmax(scores))
            members.append(b)
            cnt[tt, jj, ids[:, :, b]] += 1
        total = int(cnt.max(axis=2).sum())
        improved = True
        while improved and not exhausted:
            improved = False
            best_move = (total, None, None)
            for pos, a in enumerate(members):
                cnt_minus = cnt.copy()
                cnt_minus[tt, jj, ids[:, :, a]] -= 1
                scores = add_scores(cnt_minus)
                evals += N
                scores[members] = -1
                b = int(np.argmax(scores))
                if scores[b] > best_move[0]:
                    best_move = (int(scores[b]), pos, b)
            if best_move[1] is not None:
                _, pos, b = best_move
                cnt[tt, jj, ids[:, :, members[pos]]] -= 1
                cnt[tt, jj, ids[:, :, b]] += 1
                members[pos] = b
                total = best_move[0]
                improved = True
            if evals >= budget:
                exhausted = True
        if total > best_total:
            best_total, best_set = total, tuple(sorted(members))
        if exhausted:
            break
    return SetSearchResult(best_set, best_total, evals, exhausted)


def iter_index_sets(N: int, L: int, chunk: int = 1 << 15):
    """All size-``L`` subsets of ``range(N)`` in lexicographic order, in array chunks."""
    it = itertools.combinations(range(N), L)
    while True:
        block = list(itertools.islice(it, chunk))
        if not block:
            return
        yield np.array(block, dtype=np.int64).reshape(len(block), L)


def is_avg_radius_list_decodable(C: CodeMatrix, rho, L: int, mode: str = "exhaustive", cap=None,
                                 seed: int = 0, budget: int = 1 << 22) -> LdReport:
    """Check ``max_z sum_{c in lam} agr(c, z) <= (1 - rho) n L`` for every size-``L`` set ``lam``."""
    rho = to_fraction(rho)
    r, integral = absolute_radius(rho, C.n)
    if L < 1:
        raise InputError(f"list bound must be >= 1, got {L}")
    limit = (1 - rho) * C.n * L
    common = dict(radius=rho, list_bound=L, abs_radius=r, radius_integral=integral,
                  average_radius=True)
    if L > C.N:
        return LdReport(decodable=True, witness_center=None, witness_list_size=0, mode=mode,
                        verdict=VERDICT_DECODABLE,
                        notes=(f"no index set of size {L} in a code with {C.N} columns",), **common)

    if mode == "exhaustive":
        total_sets = math.comb(C.N, L)
        cap = resolve_cap(cap)
        if total_sets > cap and C.q**C.n <= cap:
            best, z, best_set = max_top_agreement(C, L, cap)
            ok = best <= limit
            return LdReport(decodable=ok, witness_center=None if ok else z, witness_list_size=L,
                            mode=mode, verdict=VERDICT_DECODABLE if ok else VERDICT_VIOLATED,
                            witness_set=best_set, witness_value=best, evaluations=C.q**C.n,
                            notes=("enumerated centers",), **common)
        if total_sets > cap:
            raise BudgetError(f"C({C.N},{L}) = {total_sets} index sets and {C.q}^{C.n} centers exceed the cap {cap}")
        best, best_set = -1, None
        for block in iter_index_sets(C.N, L):
            sums = plurality_sums(C.entries, block)
            i = int(np.argmax(sums))
            if sums[i] > best:
                best, best_set = int(sums[i]), tuple(int(x) for x in block[i])
        ok = best <= limit
        return LdReport(decodable=ok, witness_center=None if ok else plurality_center(C, best_set),
                        witness_list_size=L, mode=mode,
                        verdict=VERDICT_DECODABLE if ok else VERDICT_VIOLATED,
                        witness_set=best_set, witness_value=best, evaluations=total_sets, **common)
    if mode not in ("heuristic", "sampled"):
        raise InputError(f"unknown mode {mode!r}")

    res = search_max_plurality_set(C.entries, L, seed=seed, budget=budget)
    if res.best_total > limit:
        return LdReport(decodable=False, witness_center=plurality_center(C, res.best_set),
                        witness_list_size=L, mode=mode, verdict=VERDICT_VIOLATED,
                        witness_set=res.best_set, witness_value=res.best_total,
                        evaluations=res.evaluations, **common)
    verdict = VERDICT_BUDGET if res.exhausted else VERDICT_NO_COUNTEREXAMPLE
    return LdReport(decodable=None, witness_center=None, witness_list_size=L, mode=mode,
                    verdict=verdict, witness_set=res.best_set, witness_value=res.best_total,
                    evaluations=res.evaluations, **common)


def max_top_agreement(C: CodeMatrix, L: int, cap=None) -> tuple:
    """``max_z`` of the sum of the ``L`` largest agreements with ``z``, by enumerating centers.

    This equals ``max_{|lam| = L} max_agreement_sum(C, lam)``.  Returns
    ``(value, z, lam)`` for a maximizing center and list.
    """
    _check_space_budget(C.q, C.n, cap)
    words = C.entries.T
    best, best_z = -1, None
    step = max(1, (1 << 22) // max(1, C.N * C.n))
    for block in iter_all_words(C.q, C.n, chunk=step):
        agr = np.count_nonzero(block[:, None, :] == words[None, :, :], axis=2)
        top = -np.partition(-agr, L - 1, axis=1)[:, :L].sum(axis=1) if L < C.N else agr.sum(axis=1)
        i = int(np.argmax(top))
        if top[i] > best:
            best, best_z = int(top[i]), block[i]
    agr = np.count_nonzero(words == best_z, axis=1)
    lam = tuple(sorted(int(j) for j in np.argsort(-agr, kind="stable")[:L]))
    return best, tuple(int(s) for s in best_z), lam


def ball_intersection_size(c, y, r1: int, r2: int, q: int, cap=None) -> int:
    """Exact ``|B(c, r1) cap B(y, r2)|`` by enumerating the whole space."""
    c, y = _as_word(c).astype(np.int64), _as_word(y).astype(np.int64)
    if c.shape != y.shape:
        raise InputError(f"length mismatch: {c.shape[0]} vs {y.shape[0]}")
    n = c.shape[0]
    _check_space_budget(q, n, cap)
    total = 0
    for block in iter_all_words(q, n):
        dc = np.count_nonzero(block != c, axis=1)
        dy = np.count_nonzero(block != y, axis=1)
        total += int(np.count_nonzero((dc <= r1) & (dy <= r2)))
    return total


def as_word_tuple(x: Sequence) -> tuple:
    return tuple(int(s) for s in x)
