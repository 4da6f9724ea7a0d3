import itertools
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import naive_ball_max, naive_max_agreement
from listop.codes import (CodeMatrix, VERDICT_DECODABLE, VERDICT_NO_COUNTEREXAMPLE, VERDICT_VIOLATED,
                          agreement, ball_intersection_size, code_min_distance, hamming_ball_volume,
                          hamming_distance, is_avg_radius_list_decodable, is_list_decodable,
                          max_agreement_sum, max_top_agreement, plurality_center, plurality_sums,
                          plurality_vector, relabel_symbols, search_max_plurality_set)
from listop.constructions import hadamard, random_code, reed_solomon
from listop.errors import BudgetError, DegenerateCodeError, InputError


def code(q, *words):
    return CodeMatrix.from_codewords(q, [[int(c) for c in w] for w in words])


@st.composite
def small_codes(draw, q_max=3, n_max=6, N_max=6):
    q = draw(st.integers(2, q_max))
    n = draw(st.integers(1, n_max))
    N = draw(st.integers(1, N_max))
    words = draw(st.lists(st.lists(st.integers(0, q - 1), min_size=n, max_size=n), min_size=N, max_size=N))
    return CodeMatrix.from_codewords(q, words)


def test_distance_examples():
    assert hamming_distance((0, 1, 2), (0, 1, 2)) == 0
    assert hamming_distance((0, 0, 0), (1, 1, 1)) == 3
    assert hamming_distance((0, 1, 0, 1), (0, 1, 1, 1)) == 1
    assert agreement((0, 1, 0, 1), (0, 1, 1, 1)) == 3
    assert agreement((0, 0, 0), (1, 1, 1)) == 0
    assert agreement([3] * 7, [3] * 7) == 7


def test_length_mismatch():
    with pytest.raises(InputError):
        hamming_distance((0, 1), (0, 1, 1))
    with pytest.raises(InputError):
        agreement((0,), (0, 1))


@given(st.integers(2, 5), st.data())
def test_agreement_plus_distance_is_length(q, data):
    n = data.draw(st.integers(1, 12))
    x = data.draw(st.lists(st.integers(0, q - 1), min_size=n, max_size=n))
    y = data.draw(st.lists(st.integers(0, q - 1), min_size=n, max_size=n))
    assert agreement(x, y) + hamming_distance(x, y) == n
    assert hamming_distance(x, y) == hamming_distance(y, x)


def test_code_matrix_validation():
    with pytest.raises(InputError):
        CodeMatrix(2, np.array([[0, 2]]))
    with pytest.raises(InputError):
        CodeMatrix(1, np.zeros((2, 2)))
    C = code(2, "01", "01")
    assert C.N == 2  # duplicates are kept
    assert C.entries.flags.writeable is False


def test_min_distance_examples():
    assert code_min_distance(hadamard(2)) == Fraction(1, 2)
    assert code_min_distance(code(2, "000", "111")) == 1
    assert code_min_distance(reed_solomon(5, 2)) == Fraction(4, 5)
    with pytest.raises(DegenerateCodeError):
        code_min_distance(code(2, "010", "010"))


def test_plurality_examples():
    C = code(2, "0", "0", "1")
    assert plurality_vector(C, [0, 1, 2]).tolist() == [2]
    C = code(3, "012", "210")
    assert plurality_vector(C, [1]).tolist() == [1, 1, 1]
    C = code(2, "010", "101")
    assert plurality_vector(C, [0, 1]).tolist() == [1, 1, 1]
    with pytest.raises(InputError):
        plurality_vector(C, [])


def test_max_agreement_examples():
    C = code(2, "000", "111")
    assert max_agreement_sum(C, [0]) == 3
    assert max_agreement_sum(C, [0, 1]) == 3
    D = code(3, "0120", "0120", "0120")
    assert max_agreement_sum(D, [0, 1, 2]) == 12


@settings(max_examples=60, deadline=None)
@given(small_codes(), st.data())
def test_plurality_identity(C, data):
    L = data.draw(st.integers(1, min(4, C.N)))
    lam = data.draw(st.lists(st.integers(0, C.N - 1), min_size=L, max_size=L, unique=True))
    words = C.codewords()
    assert max_agreement_sum(C, lam) == naive_max_agreement(words, lam, C.q)
    z = plurality_center(C, lam)
    assert sum(agreement(words[i], z) for i in lam) == max_agreement_sum(C, lam)


def test_plurality_sums_matches_single(rng):
    C = random_code(3, 7, 9, seed=4)
    sets = np.array(list(itertools.combinations(range(9), 3)))
    got = plurality_sums(C.entries, sets)
    want = [max_agreement_sum(C, s) for s in sets]
    assert got.tolist() == want


def test_relabel_preserves_equality(rng):
    E = rng.integers(0, 50, size=(3, 4, 10)) * 1000
    ids, K = relabel_symbols(E)
    assert ids.max() < K
    assert np.array_equal(E[..., :, None] == E[..., None, :], ids[..., :, None] == ids[..., None, :])


def test_list_decodable_examples():
    rep = is_list_decodable(code(2, "000", "111"), Fraction(1, 3), 2)
    assert rep.decodable is True and rep.verdict == VERDICT_DECODABLE
    rep = is_list_decodable(code(2, "000", "001"), Fraction(1, 3), 2)
    assert rep.decodable is False and rep.verdict == VERDICT_VIOLATED
    assert rep.witness_center in {(0, 0, 0), (0, 0, 1)}
    assert rep.witness_list_size >= 2
    # fewer codewords than the list bound
    assert is_list_decodable(code(2, "000", "001"), 1, 3).decodable is True


def test_radius_floor_is_recorded():
    rep = is_list_decodable(code(2, "000", "111"), 0.5, 2)
    assert rep.abs_radius == 1 and rep.radius_integral is False and rep.notes


def test_exhaustive_budget():
    C = random_code(2, 12, 3, seed=0)
    with pytest.raises(BudgetError):
        is_list_decodable(C, Fraction(1, 4), 2, cap=100)


def test_sampled_mode_never_proves():
    C = random_code(2, 10, 4, seed=1)
    rep = is_list_decodable(C, Fraction(1, 10), 5, mode="sampled", samples=200)
    assert rep.decodable is None and rep.verdict == VERDICT_NO_COUNTEREXAMPLE
    dup = CodeMatrix.from_codewords(2, [[0] * 10] * 3)
    rep = is_list_decodable(dup, 0, 3, mode="sampled", samples=50)
    assert rep.decodable is False and rep.witness_list_size == 3


@settings(max_examples=40, deadline=None)
@given(small_codes(n_max=5), st.integers(0, 5), st.integers(1, 4))
def test_exhaustive_ld_matches_naive(C, r, L):
    r = min(r, C.n)
    rho = Fraction(r, C.n)
    rep = is_list_decodable(C, rho, L)
    assert rep.decodable == (naive_ball_max(C.codewords(), r, C.q) < L)
    if not rep.decodable:
        z = np.array(rep.witness_center)
        inside = np.count_nonzero(np.count_nonzero(C.entries.T != z, axis=1) <= r)
        assert inside >= L


def test_avg_radius_examples():
    rep = is_avg_radius_list_decodable(code(2, "000", "111"), Fraction(1, 2), 2)
    assert rep.decodable is True and rep.witness_value == 3
    C = random_code(3, 5, 6, seed=2)
    assert is_avg_radius_list_decodable(C, 0, 1).decodable is True
    dup = code(2, "0110", "0110", "0110")
    rep = is_avg_radius_list_decodable(dup, Fraction(1, 4), 3)
    assert rep.decodable is False
    assert rep.witness_value == 12 and rep.witness_center == (0, 1, 1, 0)


@settings(max_examples=60, deadline=None)
@given(small_codes(n_max=5, N_max=7), st.integers(0, 5), st.integers(1, 4))
def test_avg_radius_implies_standard(C, r, L):
    # the average condition is non-strict, so the implication covers balls of
    # radius strictly below rho*n; a strict average gap covers radius rho*n itself
    r = min(r, C.n)
    rho = Fraction(r, C.n)
    if L > C.N:
        return
    avg = is_avg_radius_list_decodable(C, rho, L)
    if avg.decodable and r >= 1:
        assert is_list_decodable(C, Fraction(r - 1, C.n), L).decodable
    if avg.witness_value < (1 - rho) * C.n * L:
        assert is_list_decodable(C, rho, L).decodable


def test_avg_radius_boundary_counterexample():
    # one word, rho = 0, L = 1: average condition holds with equality,
    # yet the radius-0 ball around the word holds L = 1 codeword
    C = code(2, "0")
    assert is_avg_radius_list_decodable(C, 0, 1).decodable is True
    assert is_list_decodable(C, 0, 1).decodable is False


def test_center_enumeration_agrees_with_set_enumeration():
    for s in range(20):
        C = random_code(2, 5, 8, seed=s)
        for L in (2, 3, 5):
            brute = max(max_agreement_sum(C, lam) for lam in itertools.combinations(range(8), L))
            assert max_top_agreement(C, L)[0] == brute
    # the checker switches to centers when sets exceed the cap
    C = random_code(2, 6, 30, seed=3)
    a = is_avg_radius_list_decodable(C, Fraction(1, 3), 10, cap=1 << 12)
    b = max_top_agreement(C, 10)[0]
    assert a.witness_value == b and a.notes == ("enumerated centers",)


def test_heuristic_mode_is_three_valued():
    C = random_code(2, 8, 20, seed=5)
    rep = is_avg_radius_list_decodable(C, Fraction(1, 8), 3, mode="heuristic")
    assert rep.decodable in (None, False)
    exact = is_avg_radius_list_decodable(C, Fraction(1, 8), 3)
    assert rep.witness_value <= exact.witness_value
    dup = CodeMatrix.from_codewords(2, [[1] * 8] * 4 + [[0] * 8])
    rep = is_avg_radius_list_decodable(dup, Fraction(1, 8), 4, mode="heuristic")
    assert rep.decodable is False


def test_search_finds_planted_set():
    rng = np.random.default_rng(0)
    words = rng.integers(0, 2, size=(40, 16))
    words[[3, 17, 29]] = words[3]
    C = CodeMatrix(2, words.T)
    res = search_max_plurality_set(C.entries, 3, seed=1)
    assert res.best_total == 48 and res.best_set == (3, 17, 29)


def test_ball_volume():
    assert hamming_ball_volume(2, 3, 1) == 4
    assert hamming_ball_volume(3, 2, 1) == 5
    assert hamming_ball_volume(7, 5, 0) == 1
    for q, n in [(2, 10), (3, 6), (5, 4)]:
        assert hamming_ball_volume(q, n, n) == q**n
    with pytest.raises(InputError):
        hamming_ball_volume(2, 3, 4)


def test_ball_intersection_examples():
    assert ball_intersection_size((0, 1, 1), (0, 1, 1), 0, 0, 2) == 1
    assert ball_intersection_size((0, 0), (1, 1), 1, 1, 2) == 2
    assert ball_intersection_size((0, 0, 0, 0, 0), (1, 1, 1, 1, 1), 1, 2, 2) == 0


def test_ball_intersection_transfer_claim():
    # holds when c lies inside the larger ball around y, as in the transfer argument
    rng = np.random.default_rng(9)
    for _ in range(200):
        q = int(rng.integers(2, 4))
        n = int(rng.integers(1, 9 if q == 2 else 7))
        r1 = int(rng.integers(0, n + 1))
        r2 = int(rng.integers(r1, n + 1))
        c = rng.integers(0, q, size=n)
        y = c.copy()
        flips = rng.choice(n, size=int(rng.integers(0, min(n - r1, r2) + 1)), replace=False)
        y[flips] = (y[flips] + 1) % q
        assert agreement(c, y) >= r1 and hamming_distance(c, y) <= r2
        assert ball_intersection_size(c, y, r1, r2, q) >= (q - 1) ** r1


def test_ball_intersection_claim_needs_c_near_y():
    # agreement alone is not enough: c = 0, y = 1, radii 0 give empty intersection
    assert ball_intersection_size((0,), (1,), 0, 0, 2) == 0
