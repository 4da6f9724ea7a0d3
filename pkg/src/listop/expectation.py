"""Monte-Carlo estimators for the expected maximal agreement of transformed codes.

All per-trial quantities are integer plurality sums, so means and standard
deviations are computed from exact integer moments and replay bit-exactly.
Trials use seeds ``derive_seed(seed, "trial", i)``; the same seeds are shared
by every index set and every sampler variant (common random numbers).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from .codes import (CodeMatrix, iter_index_sets, plurality_sums, relabel_symbols,
                    search_max_plurality_set)
from .errors import BudgetError, InputError
from .repro import derive_seed, map_ordered, resolve_cap
from .row_ops import apply_row_op, draw_row_operation


@dataclass(frozen=True)
class EstimateSummary:
    mean: float
    std_dev: float
    trials: int
    seed: int
    mode: str
    best_set: Optional[tuple] = None
    samples: Optional[tuple] = None

    @property
    def std_error(self) -> float:
        return self.std_dev / math.sqrt(self.trials)


@dataclass(frozen=True)
class MainBoundParams:
    L: int
    N: int
    n: int
    C_fit: float
    alphabet_binary: bool = False

    def __post_init__(self):
        if self.L < 2 or self.N < self.L:
            raise InputError(f"need L >= 2 and N >= L, got L={self.L}, N={self.N}")


def summarize(values: Sequence[int], seed: int, mode: str, best_set=None) -> EstimateSummary:
    """Mean and sample standard deviation from exact integer moments."""
    vals = [int(v) for v in values]
    T = len(vals)
    if T < 1:
        raise InputError("need at least one trial")
    s1 = sum(vals)
    mean = Fraction(s1, T)
    if T > 1:
        var = Fraction(T * sum(v * v for v in vals) - s1 * s1, T * (T - 1))
        std = math.sqrt(var)
    else:
        std = 0.0
    return EstimateSummary(float(mean), std, T, int(seed), mode, best_set, tuple(vals))


def trial_seeds(seed: int, trials: int, label: str = "trial") -> list:
    return [derive_seed(seed, label, i) for i in range(trials)]


def transformed_stack(C0: CodeMatrix, kind: str, params: dict, trials: int, seed: int,
                      threads: int = 1, label: str = "trial") -> np.ndarray:
    """Dense symbol ids of ``f_i(C0)`` for each trial, shape ``(trials, n, N0)``."""
    if trials < 1:
        raise InputError(f"trials must be >= 1, got {trials}")

    def one(s):
        f = draw_row_operation(kind, params, s, C0.n, C0.q)
        ids, _ = relabel_symbols(apply_row_op(C0, f).entries)
        return ids

    return np.stack(map_ordered(one, trial_seeds(seed, trials, label), threads))


def estimate_E_fixed(C0: CodeMatrix, kind: str, params: dict, lam, trials: int, seed: int,
                     threads: int = 1) -> EstimateSummary:
    """Mean over draws ``f`` of ``max_z sum_{c in lam} agr(f(c), z)`` for a fixed set ``lam``."""
    lam = np.asarray(list(lam), dtype=np.int64)
    if lam.size == 0:
        raise InputError("index set must be nonempty")
    if np.any(lam < 0) or np.any(lam >= C0.N):
        raise InputError("index set refers to a column outside the code")
    stack = transformed_stack(C0, kind, params, trials, seed, threads)
    sums = plurality_sums(stack, lam[None, :])[:, 0]
    return summarize(sums, seed, "fixed-lambda", tuple(int(x) for x in lam))


def estimate_E(C0: CodeMatrix, kind: str, params: dict, L: int, trials: int, seed: int,
               lambda_mode: str = "exact", cap=None, threads: int = 1,
               search_starts: int = 8) -> EstimateSummary:
    """Estimate ``max_lam E_f max_z sum_{c in lam} agr(f(c), z)``.

    ``lambda_mode`` is ``exact`` (enumerate every size-``L`` set), ``heuristic``
    (greedy plus swap search on the shared trials) or ``auto`` (exact when
    the number of sets fits the cap).
    """
    if not 1 <= L <= C0.N:
        raise InputError(f"need 1 <= L <= N0={C0.N}, got {L}")
    cap = resolve_cap(cap)
    n_sets = math.comb(C0.N, L)
    if lambda_mode == "auto":
        lambda_mode = "exact" if n_sets <= cap else "heuristic"
    stack = transformed_stack(C0, kind, params, trials, seed, threads)
    if lambda_mode == "exact":
        if n_sets > cap:
            raise BudgetError(f"C({C0.N},{L}) = {n_sets} index sets exceed the cap {cap}")
        best_total, best_set = -1, None
        for block in iter_index_sets(C0.N, L):
            totals = plurality_sums(stack, block).sum(axis=0)
            i = int(np.argmax(totals))
            if totals[i] > best_total:
                best_total, best_set = int(totals[i]), tuple(int(x) for x in block[i])
        mode = "max-lambda-exact"
    elif lambda_mode == "heuristic":
        res = search_max_plurality_set(stack, L, seed=derive_seed(seed, "lambda", 0),
                                       starts=search_starts, budget=max(cap, 1 << 20))
        best_set = res.best_set
        mode = "max-lambda-heuristic"
    else:
        raise InputError(f"unknown lambda_mode {lambda_mode!r}")
    sums = plurality_sums(stack, np.array([best_set], dtype=np.int64))[:, 0]
    return summarize(sums, seed, mode, best_set)


def per_trial_max(stack: np.ndarray, L: int, cap=None) -> np.ndarray:
    """For each trial, ``max_lam`` of the plurality sum over every size-``L`` set."""
    T, n, N = stack.shape
    n_sets = math.comb(N, L)
    cap = resolve_cap(cap)
    if n_sets > cap:
        raise BudgetError(f"C({N},{L}) = {n_sets} index sets exceed the cap {cap}")
    best = np.full(T, -1, dtype=np.int64)
    for block in iter_index_sets(N, L):
        best = np.maximum(best, plurality_sums(stack, block).max(axis=1))
    return best


def estimate_reversed(C0: CodeMatrix, kind: str, params: dict, L: int, trials: int, seed: int,
                      cap=None, threads: int = 1) -> EstimateSummary:
    """Mean over draws of ``max_lam max_z sum_{c in lam} agr(f(c), z)``."""
    if not 1 <= L <= C0.N:
        raise InputError(f"need 1 <= L <= N0={C0.N}, got {L}")
    stack = transformed_stack(C0, kind, params, trials, seed, threads)
    return summarize(per_trial_max(stack, L, cap), seed, "reversed")


def main_bound(E: float, params: MainBoundParams) -> float:
    """``E + Y + sqrt(E Y)`` with ``Y = C L ln(N) ln^5(L)``; binary: ``E + C L sqrt(n ln N)``."""
    if E < 0:
        raise InputError(f"E must be nonnegative, got {E}")
    if params.alphabet_binary:
        return E + params.C_fit * params.L * math.sqrt(params.n * math.log(params.N))
    Y = params.C_fit * params.L * math.log(params.N) * math.log(params.L) ** 5
    return E + Y + math.sqrt(E * Y)


def _bound_scale(p: MainBoundParams) -> float:
    if p.alphabet_binary:
        return p.L * math.sqrt(p.n * math.log(p.N))
    return p.L * math.log(p.N) * math.log(p.L) ** 5


def fit_main_constant(batch) -> float:
    """Smallest ``C`` with ``reversed <= main_bound(E)`` on every ``(E, reversed, params)``."""
    C = 0.0
    for E, R, p in batch:
        if R <= E:
            continue
        scale = _bound_scale(p)
        if scale <= 0:
            return math.inf
        if p.alphabet_binary:
            need = (R - E) / scale
        else:
            s = (-math.sqrt(E) + math.sqrt(E + 4 * (R - E))) / 2
            need = s * s / scale
        C = max(C, need)
    return C


REPLACEMENT_PAIRS = {
    "sampling/puncturing": (("sampling", {}), ("puncturing", {})),
    "aggregate/fold": (("aggregate_t", {}), ("fold_t", {})),
    "aggregate/aggregate-distinct": (("aggregate_t", {"replacement": "with"}),
                                     ("aggregate_t", {"replacement": "without"})),
    "xor/xor-distinct": (("xor_t", {"replacement": "with"}), ("xor_t", {"replacement": "without"})),
}


def replacement_dominance_test(C0: CodeMatrix, pair: str, params: dict, L: int, trials: int,
                               seed: int, cap=None, threads: int = 1) -> dict:
    """Paired estimates of ``E max_{z, lam} sum agr`` with and without replacement."""
    if pair not in REPLACEMENT_PAIRS:
        raise InputError(f"unknown sampler pair {pair!r}; expected one of {sorted(REPLACEMENT_PAIRS)}")
    (kw, pw), (ko, po) = REPLACEMENT_PAIRS[pair]
    with_stack = transformed_stack(C0, kw, {**params, **pw}, trials, seed, threads)
    without_stack = transformed_stack(C0, ko, {**params, **po}, trials, seed, threads)
    a = per_trial_max(with_stack, L, cap)
    b = per_trial_max(without_stack, L, cap)
    sw, so = summarize(a, seed, "reversed"), summarize(b, seed, "reversed")
    diff = summarize(a - b, seed, "paired-difference")
    se = diff.std_error
    delta = sw.mean - so.mean
    if se > 0:
        z = delta / se
    else:
        z = 0.0 if delta == 0 else math.copysign(math.inf, delta)
    return {"mean_with": sw.mean, "mean_without": so.mean, "delta": delta,
            "paired_std_error": se, "z_score": z, "trials": trials, "seed": int(seed)}
