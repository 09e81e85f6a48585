from fractions import Fraction

import numpy as np
import pytest
from scipy.optimize import linprog

from fairshare.simplex import UnboundedLP, maximize


def test_textbook_lp():
    sol = maximize([3, 2], [[1, 1], [1, 3], [1, 0]], [4, 6, 3])
    assert sol.x == (3, 1)
    assert sol.objective == 11


def test_exact_fractional_optimum():
    # max x + y  s.t. 3x + y <= 1, x + 3y <= 1  ->  x = y = 1/4
    sol = maximize([1, 1], [[3, 1], [1, 3]], [1, 1])
    assert sol.x == (Fraction(1, 4), Fraction(1, 4))
    assert sol.objective == Fraction(1, 2)


def test_unbounded():
    with pytest.raises(UnboundedLP):
        maximize([1, 0], [[0, 1]], [1])


def test_rejects_negative_rhs():
    with pytest.raises(ValueError):
        maximize([1], [[1]], [-1])


def test_degenerate_lp_terminates():
    # many constraints tight at the origin
    A = [[1, -1], [-1, 1], [1, 1], [2, -2], [1, 0]]
    sol = maximize([1, 1], A, [0, 0, 2, 0, 5])
    assert sol.objective == 2


@pytest.mark.parametrize("seed", range(30))
def test_matches_scipy_on_random_lps(seed):
    rng = np.random.default_rng(seed)
    n_vars, n_rows = int(rng.integers(2, 6)), int(rng.integers(2, 8))
    A = rng.integers(-3, 6, size=(n_rows, n_vars))
    A[0] = np.abs(A[0]) + 1  # keeps the feasible region bounded
    b = rng.integers(0, 10, size=n_rows)
    c = rng.integers(-2, 6, size=n_vars)
    ref = linprog(-c, A_ub=A, b_ub=b, bounds=[(0, None)] * n_vars, method="highs")
    sol = maximize(c.tolist(), A.tolist(), b.tolist())
    assert ref.status == 0
    assert float(sol.objective) == pytest.approx(-ref.fun, abs=1e-9)
    x = np.array([float(v) for v in sol.x])
    assert np.all(A @ x <= b + 1e-12) and np.all(x >= 0)
