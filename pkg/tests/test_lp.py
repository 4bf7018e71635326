import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from stuforge.lp import phase_one


def test_feasible_system():
    A = np.array([[1.0, 1.0, 0.0], [0.0, 1.0, 1.0]])
    b = np.array([1.0, 1.0])
    res = phase_one(A, b)
    assert res.feasible and res.gap == 0.0
    assert np.allclose(A @ res.x, b) and np.all(res.x >= 0)


def test_infeasible_gap():
    # x1 + x2 = 1 and x1 + x2 = 3 cannot both hold; the gap is |3 - 1|
    A = np.array([[1.0, 1.0], [1.0, 1.0]])
    res = phase_one(A, np.array([1.0, 3.0]))
    assert not res.feasible
    assert res.gap == pytest.approx(2.0, abs=1e-12)


def test_negative_rhs():
    res = phase_one(np.array([[-1.0, 0.0]]), np.array([-2.0]))
    assert res.feasible and res.x[0] == pytest.approx(2.0)


def test_sign_infeasible():
    res = phase_one(np.array([[1.0, 1.0]]), np.array([-1.0]))
    assert not res.feasible and res.gap == pytest.approx(1.0)


def test_degenerate_cycling_example():
    # Beale-type degenerate system; Bland's rule must terminate
    A = np.array([[0.25, -8, -1, 9, 1, 0, 0],
                  [0.5, -12, -0.5, 3, 0, 1, 0],
                  [0, 0, 1, 0, 0, 0, 1]], dtype=float)
    b = np.array([0.0, 0.0, 1.0])
    res = phase_one(A, b)
    assert res.feasible
    assert np.allclose(A @ res.x, b, atol=1e-12)


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 5), st.integers(1, 8), st.integers(0, 10 ** 6))
def test_constructed_feasible_points(m, extra, seed):
    rng = np.random.default_rng(seed)
    n = m + extra
    A = rng.standard_normal((m, n))
    x0 = rng.uniform(0, 1, n)
    res = phase_one(A, A @ x0)
    assert res.feasible
    assert np.allclose(A @ res.x, A @ x0, atol=1e-8)
    assert np.all(res.x >= 0)


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 6), st.integers(0, 10 ** 6))
def test_outside_simplex_is_infeasible(k, seed):
    # convex combinations of unit vectors cannot have a negative coordinate
    rng = np.random.default_rng(seed)
    V = np.eye(k)
    p = rng.dirichlet(np.ones(k))
    p[0] -= 0.5
    A = np.vstack([V, np.ones(k)])
    res = phase_one(A, np.append(p, 1.0))
    assert not res.feasible and res.gap > 1e-6
