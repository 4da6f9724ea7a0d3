"""Closed-form bounds: q-ary entropy, average-radius Johnson bounds, Chernoff, list-size transfer."""
from __future__ import annotations

import math
from fractions import Fraction

from .codes import to_fraction
from .errors import FormulaDomainError

JOHNSON_VARIANTS = ("binary", "q-eps", "q-sqrt")


def entropy_q(q: int, x) -> float:
    """``H_q(x) = x log_q(q-1) - x log_q x - (1-x) log_q(1-x)`` with ``0 log 0 = 0``."""
    if q < 2:
        raise FormulaDomainError(f"alphabet size must be >= 2, got {q}")
    x = float(x)
    if not 0.0 <= x <= 1.0:
        raise FormulaDomainError(f"entropy argument must lie in [0, 1], got {x}")
    h = 0.0
    if x > 0:
        h += x * math.log(q - 1) - x * math.log(x)
    if x < 1:
        h -= (1 - x) * math.log(1 - x)
    return h / math.log(q)


def capacity_rate(q: int, eps) -> dict:
    """``1 - H_q(1 - 1/q - eps)`` next to the expansion ``min(eps, q eps^2 / (2 ln q))``."""
    eps = float(eps)
    if not 0 < eps <= 1 - 1 / q:
        raise FormulaDomainError(f"need 0 < eps <= 1 - 1/q, got eps={eps}")
    exact = 1 - entropy_q(q, 1 - 1 / q - eps)
    expansion = min(eps, q * eps * eps / (2 * math.log(q)))
    return {"exact": exact, "expansion": expansion}


def _sqrt_nonneg(x: Fraction, what: str) -> float:
    if x < 0:
        raise FormulaDomainError(f"negative radicand in the {what} bound: pairwise distance sum out of range")
    return math.sqrt(x)


def johnson_rhs(variant: str, n: int, L: int, q: int, sum_pairwise_relative_distance, eps=None) -> float:
    """Right-hand side of an average-radius Johnson bound.

    ``sum_pairwise_relative_distance`` runs over ordered pairs of distinct
    members of the list and uses relative distances.
    """
    S = to_fraction(sum_pairwise_relative_distance)
    if S < 0 or S > L * (L - 1):
        raise FormulaDomainError(f"pairwise distance sum must lie in [0, L(L-1)], got {S}")
    if variant == "binary":
        return n / 2 * (L + _sqrt_nonneg(Fraction(L * L) - 2 * S, "binary"))
    if variant == "q-eps":
        if eps is None:
            raise FormulaDomainError("the q-eps variant needs eps")
        e = to_fraction(eps)
        if not 0 < e < 1:
            raise FormulaDomainError(f"eps must lie in (0, 1), got {e}")
        val = (Fraction(n * L, q) + Fraction(n * L) / (2 * e) * (1 + e * e) * (1 - Fraction(1, q))
               - Fraction(n) / (2 * L * e) * S)
        return float(val)
    if variant == "q-sqrt":
        rad = Fraction(n * n) + 4 * n * n * L * (L - 1) - 4 * n * n * S
        return 0.5 * (n + _sqrt_nonneg(rad, "q-sqrt"))
    raise FormulaDomainError(f"unknown Johnson variant {variant!r}; expected one of {JOHNSON_VARIANTS}")


def chernoff_bound(p, m: int, t) -> float:
    """``(pm/t)^(t - pm)``, a bound on ``Pr[sum of m Bernoulli(p) > t]``."""
    p, t = float(p), float(t)
    if not 0 < p < 1:
        raise FormulaDomainError(f"bias must lie in (0, 1), got {p}")
    mu = p * m
    if t <= mu:
        raise FormulaDomainError(f"need t > pm = {mu}, got t={t}")
    return (mu / t) ** (t - mu)


def binomial_upper_tail(p, m: int, t) -> float:
    """Exact ``Pr[Bin(m, p) > t]``."""
    p = to_fraction(p)
    k0 = math.floor(float(t)) + 1
    return float(sum(math.comb(m, k) * p**k * (1 - p) ** (m - k) for k in range(max(0, k0), m + 1)))


def eb_transfer_bound(L: int, q: int, n: int, rho, rho_prime) -> dict:
    """``L q^(n (H_q(rho') - H_q(rho))) 2^n`` with the asymptotic correction term omitted."""
    rho, rho_prime = float(rho), float(rho_prime)
    if not 0 <= rho <= rho_prime < 1 - 1 / q:
        raise FormulaDomainError(f"need 0 <= rho <= rho' < 1 - 1/q, got rho={rho}, rho'={rho_prime}")
    exponent = n * (entropy_q(q, rho_prime) - entropy_q(q, rho))
    return {"bound": L * q**exponent * 2.0**n, "omitted": "o(1) term in the exponent dropped"}


def max_to_avg_params(rho, L: int, gamma) -> tuple:
    """``(rho - gamma, ceil(L / gamma))``."""
    rho, gamma = to_fraction(rho), to_fraction(gamma)
    if not 0 < gamma < rho:
        raise FormulaDomainError(f"need 0 < gamma < rho, got gamma={gamma}, rho={rho}")
    return rho - gamma, math.ceil(L / gamma)
