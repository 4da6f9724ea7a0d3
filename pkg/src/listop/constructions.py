"""Base-code generators and the clustered code behind the subcode lower bound."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .codes import CodeMatrix, code_min_distance, is_list_decodable, is_prime, to_fraction, word_digits
from .col_ops import draw_subcode
from .errors import BudgetError, ConstructionError, DegenerateCodeError, InputError
from .repro import derive_seed, resolve_cap, rng_for


def random_code(q: int, n: int, N: int, seed: int) -> CodeMatrix:
    if N < 1 or n < 1:
        raise InputError(f"need n, N >= 1, got n={n}, N={N}")
    return CodeMatrix(q, rng_for(seed).integers(0, q, size=(n, N)))


def _messages(q: int, k: int, cap) -> np.ndarray:
    cap = resolve_cap(cap)
    if q**k > cap:
        raise BudgetError(f"{q}^{k} messages exceed the cap {cap}")
    return word_digits(np.arange(q**k), q, k) if k else np.zeros((1, 0), dtype=np.int64)


def random_linear_code(q: int, n: int, k: int, seed: int, cap=None) -> CodeMatrix:
    """Encodings of all ``q^k`` messages under a uniform ``n x k`` generator matrix."""
    if not is_prime(q):
        raise InputError(f"linear codes need a prime alphabet, got q={q}")
    if not 0 <= k <= n:
        raise InputError(f"need 0 <= k <= n, got k={k}, n={n}")
    msgs = _messages(q, k, cap)
    G = rng_for(seed).integers(0, q, size=(n, k))
    return CodeMatrix(q, (G @ msgs.T) % q)


def reed_solomon(q: int, k: int, eval_points=None, cap=None) -> CodeMatrix:
    """Evaluations of every polynomial of degree < ``k``; message digits are coefficients of ``1, x, x^2, ...``."""
    if not is_prime(q):
        raise InputError(f"Reed-Solomon here needs a prime field, got q={q}")
    pts = list(range(q)) if eval_points is None else [int(a) for a in eval_points]
    if len(set(pts)) != len(pts):
        raise InputError("evaluation points must be distinct")
    if any(not 0 <= a < q for a in pts):
        raise InputError(f"evaluation points must lie in [0, {q})")
    if not 0 <= k <= len(pts):
        raise InputError(f"need 0 <= k <= number of points, got k={k}")
    msgs = _messages(q, k, cap)
    V = np.array([[pow(a, j, q) for j in range(k)] for a in pts], dtype=np.int64).reshape(len(pts), k)
    return CodeMatrix(q, (V @ msgs.T) % q)


def hadamard(k: int) -> CodeMatrix:
    """Binary Hadamard code: entry ``(x, m)`` is the parity of ``x & m``; length and size ``2^k``."""
    if k < 1:
        raise InputError(f"need k >= 1, got {k}")
    idx = np.arange(2**k)
    anded = idx[:, None] & idx[None, :]
    bits = np.zeros_like(anded)
    while np.any(anded):
        bits ^= anded & 1
        anded >>= 1
    return CodeMatrix(2, bits)


@dataclass(frozen=True)
class WeightDistribution:
    n: int
    N: int
    histogram: dict

    def A(self, beta) -> Fraction:
        """Fraction of codewords agreeing with the zero word in at least ``beta * n`` places."""
        thr = to_fraction(beta) * self.n
        hits = sum(c for w, c in self.histogram.items() if self.n - w >= thr)
        return Fraction(hits, self.N)


def weight_distribution(C: CodeMatrix) -> WeightDistribution:
    w = np.count_nonzero(C.entries, axis=0)
    vals, counts = np.unique(w, return_counts=True)
    return WeightDistribution(C.n, C.N, {int(a): int(b) for a, b in zip(vals, counts)})


def integer_power_floor(q: int, e: Fraction) -> int:
    """``floor(q ** e)`` for a nonnegative rational exponent, exactly."""
    a, b = e.numerator, e.denominator
    target = q**a
    lo, hi = 1, 1
    while hi**b <= target:
        hi *= 2
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if mid**b <= target:
            lo = mid
        else:
            hi = mid
    return lo


def cluster_parameters(rho, n: int, q: int) -> dict:
    """Derived quantities ``beta, r, cluster_size, num_centers`` of the clustered code."""
    rho = to_fraction(rho)
    if not 0 < rho < 1:
        raise InputError(f"need 0 < rho < 1, got {rho}")
    j = 0
    while Fraction(1, 2**j) >= 1 - rho:
        j += 1
    gap = Fraction(1, 2**j)                  # 1 - rho - beta, a power of 1/2
    beta = 1 - rho - gap
    r = gap / 6
    cluster_size = math.floor(beta * n / (8 * j)) - 1
    return {"rho": rho, "beta": beta, "r": r, "log2_inv_gap": j, "cluster_size": cluster_size,
            "num_centers": integer_power_floor(q, r * n),
            "q_precondition": q >= 2 ** (1 / float(r)), "log_base": 2}


def smallest_feasible_length(rho, q: int = 2, limit: int = 1 << 16) -> int:
    for n in range(1, limit):
        p = cluster_parameters(rho, n, q)
        if p["cluster_size"] >= 1 and p["num_centers"] >= 1:
            return n
    raise InputError(f"no feasible length below {limit}")


@dataclass(frozen=True)
class ClusterCode:
    C0: CodeMatrix
    centers: CodeMatrix
    cluster_of: np.ndarray
    params: dict = field(default_factory=dict)

    def members(self, center: int) -> np.ndarray:
        return np.flatnonzero(self.cluster_of == center)


def _min_abs_distance(words: np.ndarray) -> int:
    best = words.shape[1]
    for i in range(len(words) - 1):
        best = min(best, int(np.count_nonzero(words[i + 1:] != words[i], axis=1).min()))
    return best


def build_cluster_code(rho, n: int, q: int, seed: int, retry_cap: int = 32,
                       cluster_size=None) -> ClusterCode:
    """Clusters of distance-1 satellites around the words of a random center code.

    Member ``i`` of a cluster bumps coordinate ``i`` of its center by one
    (mod ``q``).  The center code is redrawn with derived seeds until its
    minimum distance exceeds 2.  ``cluster_size`` overrides the formula
    value (off-formula experiments only; recorded in ``params``).
    """
    p = cluster_parameters(rho, n, q)
    size = p["cluster_size"] if cluster_size is None else int(cluster_size)
    if size < 1:
        raise InputError(f"cluster_size = {size} < 1 at rho={p['rho']}, n={n}; increase n")
    if size > n:
        raise InputError(f"cluster_size = {size} exceeds n = {n}")
    M = p["num_centers"]
    if M < 1:
        raise InputError("the center code would be empty")
    for attempt in range(retry_cap):
        s = derive_seed(seed, "centers", attempt)
        words = rng_for(s).integers(0, q, size=(M, n))
        if M < 2 or _min_abs_distance(words) > 2:
            break
    else:
        raise ConstructionError(f"no center code with distance > 2 after {retry_cap} attempts")
    members = np.repeat(words, size, axis=0)
    bump = np.tile(np.arange(size), M)
    members[np.arange(len(members)), bump] = (members[np.arange(len(members)), bump] + 1) % q
    params = dict(p, cluster_size=size, formula_cluster_size=p["cluster_size"],
                  attempts=attempt + 1, seed=int(seed), n=n, q=q)
    return ClusterCode(CodeMatrix(q, members.T), CodeMatrix(q, words.T),
                       np.repeat(np.arange(M), size), params)


def verify_random_centers(Cstar: CodeMatrix, r, gammas=None, cap=None) -> list:
    """Exhaustive ``(1 - gamma, ceil(1/(gamma - 2r)))`` list-decoding checks of the center code."""
    r = to_fraction(r)
    if gammas is None:
        gammas, g = [], Fraction(1)
        while g > 2 * r:
            gammas.append(g)
            g /= 2
    out = []
    for g in gammas:
        g = to_fraction(g)
        if g <= 2 * r:
            raise InputError(f"gamma must exceed 2r = {2 * r}, got {g}")
        L = math.ceil(1 / (g - 2 * r))
        rep = is_list_decodable(Cstar, 1 - g, L, mode="exhaustive", cap=cap)
        out.append({"gamma": g, "L": L, "decodable": rep.decodable,
                    "witness_list_size": rep.witness_list_size, "report": rep})
    return out


def capture_target(cc: ClusterCode, alpha) -> int:
    D = cc.params["r"] / 3
    return min(cc.params["cluster_size"], math.ceil(D / to_fraction(alpha)))


def lower_bound_retention(q: int, alpha, n: int) -> float:
    """``p = q^(-alpha n) / n``."""
    return q ** (-float(alpha) * n) / n


def cluster_capture_trial(cc: ClusterCode, alpha, seed: int, replacement: str = "with") -> dict:
    """Draw a subcode at ``p = q^(-alpha n)/n`` and look for a captured cluster.

    A cluster counts as captured when the subcode holds at least
    ``min(cluster_size, ceil(D/alpha))`` distinct members of it, with
    ``D = r/3``.  The certificate is the largest number of subcode
    columns inside a radius-1 ball around a center.
    """
    n, q = cc.C0.n, cc.C0.q
    p = Fraction(lower_bound_retention(q, alpha, n)).limit_denominator(10**15)
    sub, draw = draw_subcode(cc.C0, p=p, replacement=replacement, seed=seed)
    target = capture_target(cc, alpha)
    kept = np.unique(draw.retained)
    per_center = np.bincount(cc.cluster_of[kept], minlength=cc.centers.N)
    best_center = int(np.argmax(per_center))
    center = cc.centers.entries[:, best_center]
    ball = int(np.count_nonzero(np.count_nonzero(sub.entries.T != center, axis=1) <= 1))
    return {"captured": bool(per_center[best_center] >= target), "target": target,
            "best_center": best_center, "members_kept": int(per_center[best_center]),
            "certified_list_size": ball, "subcode_size": sub.N, "p": p}


def min_distance_or_none(C: CodeMatrix):
    try:
        return code_min_distance(C)
    except DegenerateCodeError:
        return None
