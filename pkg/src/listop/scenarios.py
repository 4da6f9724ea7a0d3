"""Experiment scenarios run by the ``listop`` command.

Each scenario declares its parameters (with defaults), its CSV columns and a
runner producing one dict per row.  Every row carries the derived seed that
reproduces it in isolation.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

import numpy as np

from .bounds import johnson_rhs
from .codes import (CodeMatrix, code_min_distance, is_list_decodable, max_agreement_sum, max_ball_count,
                    search_max_plurality_set)
from .col_ops import distinct_count, draw_subcode, subcode_retention
from .concat import (ConcatCode, adversarial_corruption, agreement_fraction, concat_encode,
                     concat_list_decode)
from .constructions import (build_cluster_code, cluster_capture_trial, random_code, random_linear_code,
                            reed_solomon, hadamard, smallest_feasible_length)
from .errors import InputError
from .expectation import (MainBoundParams, estimate_E, estimate_reversed, fit_main_constant, per_trial_max,
                          replacement_dominance_test)
from .repro import derive_seed, map_ordered, resolve_cap, rng_for
from .row_ops import apply_row_op, derived_eps, draw_row_operation

REQUIRED = object()

ESTIMATE_COLUMNS = ["scenario_id", "kind", "n0", "n", "N", "L", "t", "trials", "seed",
                    "mean", "std_dev", "bound", "fitted_C"]
ROWOP_COLUMNS = ["scenario_id", "trial", "seed", "kind", "n0", "n", "N", "t", "L", "rho",
                 "distinct", "max_agreement_sum", "avg_radius_limit", "lambda_mode", "verdict"]
SUBCODE_COLUMNS = ["scenario_id", "trial", "seed", "N0", "n", "p", "N", "distinct", "half_pN0",
                   "rho", "L", "max_ball", "verdict"]
CLUSTER_COLUMNS = ["scenario_id", "trial", "seed", "n", "q", "cluster_size", "num_centers", "alpha",
                   "target", "subcode_size", "members_kept", "captured", "certified_list_size"]
CONCAT_COLUMNS = ["scenario_id", "trial", "seed", "eps", "inner_k", "message", "corrupted_bits",
                  "agreement", "list_size", "recovered"]
JOHNSON_COLUMNS = ["scenario_id", "instance", "seed", "q", "n", "L", "sum_d", "lhs", "rhs_binary",
                   "rhs_q_eps_quarter", "rhs_q_eps_half", "rhs_q_sqrt", "violations"]
REPLACEMENT_COLUMNS = ["scenario_id", "config", "seed", "pair", "n0", "n", "t", "L", "trials",
                       "mean_with", "mean_without", "delta", "paired_std_error", "z_score", "dominated"]


@dataclass(frozen=True)
class Scenario:
    name: str
    columns: list
    params: dict
    runner: Callable
    needs_base_code: bool = True


def preset_t(n0: int, delta0, eps, kind: str) -> int:
    """``t = ceil(4 ln(1/eps) / delta0)``; folding takes the smallest divisor of ``n0`` at least that."""
    t = max(1, min(n0, math.ceil(4 * math.log(1 / float(eps)) / float(delta0))))
    if kind == "fold_t":
        t = min(d for d in range(t, n0 + 1) if n0 % d == 0)
    return t


def preset_n(N: int, n0: int, t: int, eps, kind: str) -> int:
    """Output length: the XOR rate condition ``N^2 ((1+eps^2)/2)^n <= 1/N``, else ``n0 // t``."""
    if kind == "xor_t":
        e = float(eps)
        return max(1, math.ceil(3 * math.log(N) / math.log(2 / (1 + e * e))))
    return max(1, n0 // t)


def _kind_params(kind: str, P: dict, C0: CodeMatrix = None) -> dict:
    out = {"t": P["t"], "n": P["n"]}
    if P.get("replacement") is not None:
        out["replacement"] = P["replacement"]
    if C0 is not None and kind in ("xor_t", "aggregate_t", "fold_t") and P.get("eps") is not None:
        eps = Fraction(str(P["eps"]))
        if out["t"] is None:
            out["t"] = preset_t(C0.n, code_min_distance(C0), eps, kind)
        if out["n"] is None and kind != "fold_t":
            out["n"] = preset_n(C0.N, C0.n, int(out["t"]), eps, kind)
    return {k: v for k, v in out.items() if v is not None}


def _n_of(kind: str, P: dict, n0: int) -> int:
    if kind == "fold_t":
        return n0 // int(P["t"])
    if kind == "hash_reduce":
        return n0
    return int(P["n"])


def run_estimate(C0: CodeMatrix, P: dict, seed: int, threads: int, cap) -> list:
    kind = P["kind"]
    rows = []
    for b in range(int(P["batch"])):
        s = derive_seed(seed, "scenario", b)
        params = _kind_params(kind, P, C0)
        est = estimate_E(C0, kind, params, int(P["L"]), int(P["trials"]), s,
                         lambda_mode=P["lambda_mode"], cap=cap, threads=threads)
        n = _n_of(kind, params, C0.n)
        L = int(P["L"])
        bound, fitted = None, None
        if kind == "xor_t" and C0.q == 2:
            eps = P["eps"]
            if eps is None:
                eps = derived_eps(int(params["t"]), code_min_distance(C0))
            eps = float(Fraction(str(eps))) if isinstance(eps, str) else float(eps)
            bound = n / 2 * (L * (1 + eps) + math.sqrt(L))
        if P["reversed"] and L >= 2 and C0.N >= L:
            rev = estimate_reversed(C0, kind, params, L, int(P["trials"]), s, cap=cap, threads=threads)
            mp = MainBoundParams(L, C0.N, n, 0.0, alphabet_binary=(kind == "xor_t" and C0.q == 2))
            fitted = fit_main_constant([(est.mean, rev.mean, mp)])
        elif kind in ("aggregate_t", "fold_t"):
            fitted = est.mean / n
        rows.append(dict(scenario_id=b, kind=kind, n0=C0.n, n=n, N=C0.N, L=L, t=params.get("t", 1),
                         trials=est.trials, seed=s, mean=est.mean, std_dev=est.std_dev,
                         bound=bound, fitted_C=fitted))
    return rows


def _max_sum_over_sets(C: CodeMatrix, L: int, mode: str, cap, seed: int) -> tuple:
    cap = resolve_cap(cap)
    if mode == "auto":
        mode = "exact" if math.comb(C.N, L) <= cap else "heuristic"
    if mode == "exact":
        return int(per_trial_max(C.entries[None], L, cap)[0]), mode
    res = search_max_plurality_set(C.entries, L, seed=seed, budget=max(cap, 1 << 20))
    return int(res.best_total), mode


def make_rowop_runner(kind: str):
    def run(C0: CodeMatrix, P: dict, seed: int, threads: int, cap) -> list:
        L, rho = int(P["L"]), Fraction(str(P["rho"]))
        params = _kind_params(kind, P, C0)

        def one(i):
            s = derive_seed(seed, "trial", i)
            C = apply_row_op(C0, draw_row_operation(kind, params, s, C0.n, C0.q))
            if L > C.N:
                raise InputError(f"L={L} exceeds the number of codewords {C.N}")
            best, mode = _max_sum_over_sets(C, L, P["lambda_mode"], cap, derive_seed(s, "lambda", 0))
            limit = (1 - rho) * C.n * L
            if best > limit:
                verdict = "violated"
            else:
                verdict = "decodable" if mode == "exact" else "no-counterexample"
            return dict(scenario_id=0, trial=i, seed=s, kind=kind, n0=C0.n, n=C.n, N=C.N,
                        t=params.get("t", 1), L=L, rho=rho, distinct=distinct_count(C),
                        max_agreement_sum=best, avg_radius_limit=limit, lambda_mode=mode,
                        verdict=verdict)

        return map_ordered(one, range(int(P["trials"])), threads)
    return run


def run_subcode(C0: CodeMatrix, P: dict, seed: int, threads: int, cap) -> list:
    rho, eps = Fraction(str(P["rho"])), Fraction(str(P["eps"]))
    L0 = P["L0"]
    if L0 is None:
        L0 = max_ball_count(C0, rho, cap)[0] + 1
    p = subcode_retention(C0.q, eps, C0.n, int(L0))
    L = int(P["L"]) if P["L"] is not None else math.ceil(3 / eps)

    def one(i):
        s = derive_seed(seed, "trial", i)
        sub, _ = draw_subcode(C0, p=p, replacement=P["replacement"], seed=s)
        rep = is_list_decodable(sub, rho, L, mode="exhaustive", cap=cap)
        return dict(scenario_id=0, trial=i, seed=s, N0=C0.N, n=C0.n, p=p, N=sub.N,
                    distinct=distinct_count(sub), half_pN0=p * C0.N / 2, rho=rho, L=L,
                    max_ball=rep.witness_list_size, verdict=rep.verdict)

    return map_ordered(one, range(int(P["trials"])), threads)


def run_cluster(C0, P: dict, seed: int, threads: int, cap) -> list:
    rho, q = Fraction(str(P["rho"])), int(P["q"])
    n = int(P["n"]) if P["n"] is not None else smallest_feasible_length(rho, q)
    cc = build_cluster_code(rho, n, q, derive_seed(seed, "cluster", 0))
    alpha = Fraction(str(P["alpha"]))

    def one(i):
        s = derive_seed(seed, "trial", i)
        res = cluster_capture_trial(cc, alpha, s, replacement=P["replacement"])
        return dict(scenario_id=0, trial=i, seed=s, n=n, q=q, cluster_size=cc.params["cluster_size"],
                    num_centers=cc.centers.N, alpha=alpha, target=res["target"],
                    subcode_size=res["subcode_size"], members_kept=res["members_kept"],
                    captured=res["captured"], certified_list_size=res["certified_list_size"])

    return map_ordered(one, range(int(P["trials"])), threads)


def run_concat(C0: CodeMatrix, P: dict, seed: int, threads: int, cap) -> list:
    eps = Fraction(str(P["eps"]))
    k = int(P["inner_k"]) if P["inner_k"] is not None else max(1, math.ceil(math.log2(C0.q)))
    code = ConcatCode(C0, k)

    def one(i):
        s = derive_seed(seed, "trial", i)
        msg = int(rng_for(s).integers(0, C0.N))
        y = adversarial_corruption(code, msg, eps)
        flips = int(np.count_nonzero(y != concat_encode(code, msg)))
        res = concat_list_decode(code, y, eps, s)
        return dict(scenario_id=0, trial=i, seed=s, eps=eps, inner_k=k, message=msg,
                    corrupted_bits=flips, agreement=agreement_fraction(code, msg, res.intermediate),
                    list_size=len(res.candidates), recovered=msg in res.candidates)

    return map_ordered(one, range(int(P["trials"])), threads)


def johnson_instance(q: int, n: int, L: int, seed: int) -> dict:
    """One random code of ``L`` words: exhaustive LHS against every Johnson variant."""
    C = random_code(q, n, L, seed)
    lhs = max_agreement_sum(C, range(L))
    words = C.entries.T
    S = Fraction(sum(int(np.count_nonzero(words[a] != words[b]))
                     for a in range(L) for b in range(L) if a != b), n)
    out = dict(q=q, n=n, L=L, sum_d=S, lhs=lhs)
    out["rhs_binary"] = johnson_rhs("binary", n, L, q, S) if q == 2 else None
    out["rhs_q_eps_quarter"] = johnson_rhs("q-eps", n, L, q, S, eps=Fraction(1, 4))
    out["rhs_q_eps_half"] = johnson_rhs("q-eps", n, L, q, S, eps=Fraction(1, 2))
    out["rhs_q_sqrt"] = johnson_rhs("q-sqrt", n, L, q, S)
    rhs = [v for k, v in out.items() if k.startswith("rhs_") and v is not None]
    out["violations"] = sum(1 for v in rhs if v < lhs - 1e-9 * max(1.0, abs(v)))
    return out


def run_johnson(C0, P: dict, seed: int, threads: int, cap) -> list:
    def one(i):
        s = derive_seed(seed, "instance", i)
        rng = rng_for(s)
        q = int(rng.integers(2, int(P["q_max"]) + 1))
        n = int(rng.integers(1, int(P["n_max"]) + 1))
        L = int(rng.integers(1, int(P["L_max"]) + 1))
        return dict(scenario_id=0, instance=i, seed=s, **johnson_instance(q, n, L, derive_seed(s, "code", 0)))

    return map_ordered(one, range(int(P["instances"])), threads)


def run_replacement(C0: CodeMatrix, P: dict, seed: int, threads: int, cap) -> list:
    pair = P["pair"]
    rows = []
    for c in range(int(P["configs"])):
        s = derive_seed(seed, "config", c)
        rng = rng_for(s)
        if pair == "aggregate/fold":
            divisors = [d for d in range(1, C0.n + 1) if C0.n % d == 0]
            t = int(P["t"]) if P["t"] is not None else int(rng.choice(divisors))
            n = C0.n // t
        else:
            t = int(P["t"]) if P["t"] is not None else 1
            n = int(P["n"]) if P["n"] is not None else int(rng.integers(1, C0.n + 1))
        L = int(P["L"])
        params = {"t": t, "n": n}
        res = replacement_dominance_test(C0, pair, params, L, int(P["trials"]), s, cap=cap, threads=threads)
        dominated = res["mean_without"] <= res["mean_with"] + 3 * res["paired_std_error"]
        rows.append(dict(scenario_id=0, config=c, seed=s, pair=pair, n0=C0.n, n=n, t=t, L=L,
                         trials=res["trials"], mean_with=res["mean_with"], mean_without=res["mean_without"],
                         delta=res["delta"], paired_std_error=res["paired_std_error"],
                         z_score=res["z_score"], dominated=dominated))
    return rows


def _rowop_params(default_t=None, default_n=None):
    return {"t": default_t, "n": default_n, "L": 2, "rho": "1/4", "eps": "1/4", "trials": 10,
            "lambda_mode": "auto", "replacement": None}


SCENARIOS = {
    "estimate-E": Scenario("estimate-E", ESTIMATE_COLUMNS,
                           {"kind": REQUIRED, "t": None, "n": None, "L": 2, "trials": 20,
                            "lambda_mode": "auto", "replacement": None, "eps": None,
                            "reversed": False, "batch": 1}, run_estimate),
    "xor-ld": Scenario("xor-ld", ROWOP_COLUMNS, _rowop_params(), make_rowop_runner("xor_t")),
    "fold-ld": Scenario("fold-ld", ROWOP_COLUMNS, _rowop_params(), make_rowop_runner("fold_t")),
    "aggregate-ld": Scenario("aggregate-ld", ROWOP_COLUMNS, _rowop_params(), make_rowop_runner("aggregate_t")),
    "subcode-ld": Scenario("subcode-ld", SUBCODE_COLUMNS,
                           {"rho": "1/4", "eps": "1/4", "L0": None, "L": None, "trials": 20,
                            "replacement": "with"}, run_subcode),
    "cluster-lb": Scenario("cluster-lb", CLUSTER_COLUMNS,
                           {"rho": "1/4", "n": None, "q": 2, "alpha": "1/64", "trials": 20,
                            "replacement": "with"}, run_cluster, needs_base_code=False),
    "concat-decode": Scenario("concat-decode", CONCAT_COLUMNS,
                              {"eps": "1", "inner_k": None, "trials": 20}, run_concat),
    "johnson-audit": Scenario("johnson-audit", JOHNSON_COLUMNS,
                              {"instances": 100, "q_max": 4, "n_max": 10, "L_max": 4},
                              run_johnson, needs_base_code=False),
    "replacement-test": Scenario("replacement-test", REPLACEMENT_COLUMNS,
                                 {"pair": "sampling/puncturing", "t": None, "n": None, "L": 2,
                                  "trials": 50, "configs": 5}, run_replacement),
}


def scenario_schema() -> dict:
    """The column and parameter table shipped as ``schema.json``."""
    return {"format": "csv", "float_format": "17 significant digits",
            "header_comment": "# listop <resolved config as JSON, output path excluded>",
            "scenarios": {name: {"columns": list(sc.columns), "needs_base_code": sc.needs_base_code,
                                 "params": {k: ("<required>" if v is REQUIRED else v)
                                            for k, v in sc.params.items()}}
                          for name, sc in SCENARIOS.items()}}


def generate_base_code(spec: dict, master_seed: int) -> CodeMatrix:
    """Build a base code from a generator spec such as ``{"generator": "random_linear", ...}``."""
    spec = dict(spec)
    gen = spec.pop("generator")
    seed = int(spec.pop("seed", derive_seed(master_seed, "base_code", 0)))
    allowed = {"random": {"q", "n", "N"}, "random_linear": {"q", "n", "k"},
               "reed_solomon": {"q", "k", "points"}, "hadamard": {"k"}}
    if gen not in allowed:
        raise InputError(f"base_code.generator: unknown generator {gen!r}; expected one of {sorted(allowed)}")
    extra = set(spec) - allowed[gen]
    if extra:
        raise InputError(f"base_code: unknown keys {sorted(extra)} for generator {gen!r}")
    missing = allowed[gen] - set(spec) - {"points"}
    if missing:
        raise InputError(f"base_code: missing keys {sorted(missing)} for generator {gen!r}")
    if gen == "random":
        return random_code(int(spec["q"]), int(spec["n"]), int(spec["N"]), seed)
    if gen == "random_linear":
        return random_linear_code(int(spec["q"]), int(spec["n"]), int(spec["k"]), seed)
    if gen == "reed_solomon":
        return reed_solomon(int(spec["q"]), int(spec["k"]), spec.get("points"))
    return hadamard(int(spec["k"]))
