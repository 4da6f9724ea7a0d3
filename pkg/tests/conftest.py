import itertools

import numpy as np
import pytest


def all_words(q, n):
    return itertools.product(range(q), repeat=n)


def naive_max_agreement(words, lam, q):
    """max over every center z of the total agreement with the words in lam."""
    n = len(words[0])
    return max(sum(sum(a == b for a, b in zip(words[i], z)) for i in lam) for z in all_words(q, n))


def naive_ball_max(words, r, q):
    n = len(words[0])
    return max(sum(sum(a != b for a, b in zip(w, z)) <= r for w in words) for z in all_words(q, n))


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
