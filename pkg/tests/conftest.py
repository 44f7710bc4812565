import numpy as np
import pytest

from detwitness import states


@pytest.fixture
def rng():
    return states.make_rng(12345)


def brute_partial_transpose_b(m, da, db):
    """Index-by-index partial transpose on B, independent of the reshape route."""
    out = np.zeros_like(m)
    for i in range(da):
        for j in range(db):
            for k in range(da):
                for l in range(db):
                    out[i * db + j, k * db + l] = m[i * db + l, k * db + j]
    return out


def brute_permutation_operator(perm, n, d=2):
    """Permutation operator built by enumerating basis states one at a time."""
    size = d**n
    p = np.zeros((size, size))
    for col in range(size):
        digits = []
        x = col
        for _ in range(n):
            digits.append(x % d)
            x //= d
        digits = digits[::-1]
        out = [digits[perm[j]] for j in range(n)]
        row = 0
        for o in out:
            row = row * d + o
        p[row, col] = 1
    return p


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
