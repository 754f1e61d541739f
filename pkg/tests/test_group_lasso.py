"""Solver correctness: proximal operator, convergence, support recovery."""

from itertools import combinations

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from langperf.errors import ModelError
from langperf.features import FeatureVector
from langperf.models import (
    GroupLassoProblem,
    block_soft_threshold,
    fit_group_lasso,
    kkt_residual,
    largest_eigenvalue,
    objective,
    smooth_gradient,
    solve_group_lasso,
    train_group_lasso,
)


# ---------------------------------------------------------------------------
# block soft-thresholding
# ---------------------------------------------------------------------------

def test_bst_closed_form():
    np.testing.assert_allclose(block_soft_threshold(np.array([3.0, 4.0]), 2.5), [1.5, 2.0])


def test_bst_inside_ball_is_zero():
    np.testing.assert_array_equal(block_soft_threshold(np.array([3.0, 4.0]), 6.0), [0.0, 0.0])


def test_bst_zero_vector():
    np.testing.assert_array_equal(block_soft_threshold(np.zeros(2), 1.0), [0.0, 0.0])


def test_bst_rejects_negative_tau():
    with pytest.raises(ModelError):
        block_soft_threshold(np.ones(2), -0.1)


vec = arrays(np.float64, 4, elements=st.floats(-50, 50, allow_nan=False))


@given(vec, vec, st.floats(0, 10, allow_nan=False))
def test_bst_non_expansive(u, v, tau):
    du = block_soft_threshold(u, tau)
    dv = block_soft_threshold(v, tau)
    assert np.linalg.norm(du - dv) <= np.linalg.norm(u - v) + 1e-9


# ---------------------------------------------------------------------------
# power iteration
# ---------------------------------------------------------------------------

@given(arrays(np.float64, (6, 4), elements=st.floats(-3, 3, allow_nan=False)))
@settings(max_examples=50)
def test_largest_eigenvalue_matches_numpy(X):
    A = X.T @ X
    expected = float(np.linalg.eigvalsh(A)[-1])
    got = largest_eigenvalue(A)
    assert got == pytest.approx(expected, rel=1e-6, abs=1e-9)


def test_largest_eigenvalue_zero_matrix():
    assert largest_eigenvalue(np.zeros((3, 3))) == 0.0


# ---------------------------------------------------------------------------
# solver
# ---------------------------------------------------------------------------

def _random_problem(rng, n=20, d=5, lambda_=0.0, tol=1e-14, max_cond=100.0):
    while True:
        X = rng.standard_normal((n, d))
        if np.linalg.cond(X) <= max_cond:
            break
    w = rng.standard_normal(d)
    y = X @ w + 0.05 * rng.standard_normal(n)
    return GroupLassoProblem(tasks=((X, y),), lambda_=lambda_, tol=tol, max_iters=50000)


def test_lambda_zero_matches_least_squares():
    rng = np.random.default_rng(7)
    for _ in range(5):
        problem = _random_problem(rng)
        solution = solve_group_lasso(problem)
        expected, *_ = np.linalg.lstsq(problem.tasks[0][0], problem.tasks[0][1], rcond=None)
        np.testing.assert_allclose(solution.weights[:, 0], expected, atol=1e-6)


def test_full_shrinkage_for_large_lambda():
    rng = np.random.default_rng(8)
    X = rng.standard_normal((15, 4))
    y = X @ np.array([1.0, -2.0, 0.5, 3.0]) + 0.1 * rng.standard_normal(15)
    y -= y.mean()
    # lambda above every block of the gradient at zero forces W = 0
    grad0 = np.abs(X.T @ (-y)) / X.shape[0]
    problem = GroupLassoProblem(tasks=((X, y),), lambda_=float(grad0.max()) * 1.01)
    solution = solve_group_lasso(problem)
    np.testing.assert_array_equal(solution.weights, 0.0)
    # with centered y and zero weights, predictions are the per-task mean
    model = fit_group_lasso(problem)
    fv = FeatureVector(tuple(f"x{i}" for i in range(4)), (1.0, 1.0, 1.0, 1.0), ("p",), "t")
    assert model.predict_detailed(fv).raw == 0.0


def test_objective_non_increasing_debug_mode():
    rng = np.random.default_rng(9)
    X = rng.standard_normal((25, 6))
    y = X @ rng.standard_normal(6) + rng.standard_normal(25)
    problem = GroupLassoProblem(tasks=((X, y - y.mean()),), lambda_=0.02, tol=1e-12)
    solution = solve_group_lasso(problem, debug=True)  # asserts internally per iteration
    objs = np.array(solution.objectives)
    assert np.all(np.diff(objs) <= objs[:-1] * 1e-12 + 1e-15)


def test_kkt_residual_small_at_convergence():
    rng = np.random.default_rng(10)
    for _ in range(3):
        X1 = rng.standard_normal((30, 5))
        X2 = rng.standard_normal((24, 5))
        w = np.array([2.0, 0.0, -1.0, 0.0, 0.5])
        tasks = ((X1, X1 @ w + 0.05 * rng.standard_normal(30)),
                 (X2, X2 @ (w * 0.8) + 0.05 * rng.standard_normal(24)))
        tasks = tuple((X, y - y.mean()) for X, y in tasks)
        problem = GroupLassoProblem(tasks=tasks, lambda_=0.05, tol=1e-12, max_iters=100000)
        solution = solve_group_lasso(problem)
        assert kkt_residual(problem, solution.weights) < 1e-4


def brute_force_best_support(tasks, support_size):
    """Exhaustive model selection oracle: the support whose per-task OLS
    restricted to it minimizes the total residual sum of squares."""
    d = tasks[0][0].shape[1]
    best_support, best_rss = None, np.inf
    for support in combinations(range(d), support_size):
        rss = 0.0
        for X, y in tasks:
            sub = X[:, support]
            w, *_ = np.linalg.lstsq(sub, y, rcond=None)
            r = y - sub @ w
            rss += float(r @ r)
        if rss < best_rss:
            best_support, best_rss = support, rss
    return set(best_support)


def test_planted_support_recovery_with_bruteforce_oracle():
    rng = np.random.default_rng(11)
    d, true_support = 5, {0, 2}
    X1 = rng.standard_normal((60, d))
    X2 = rng.standard_normal((60, d))
    w1 = np.zeros(d)
    w2 = np.zeros(d)
    w1[[0, 2]] = [1.5, -2.0]
    w2[[0, 2]] = [-1.0, 1.2]
    y1 = X1 @ w1 + 0.02 * rng.standard_normal(60)
    y2 = X2 @ w2 + 0.02 * rng.standard_normal(60)
    tasks = ((X1, y1 - y1.mean()), (X2, y2 - y2.mean()))

    assert brute_force_best_support(tasks, len(true_support)) == true_support

    problem = GroupLassoProblem(tasks=tasks, lambda_=0.05, tol=1e-12, max_iters=100000)
    solution = solve_group_lasso(problem)
    recovered = {j for j in range(d) if np.linalg.norm(solution.weights[j]) > 0.0}
    assert recovered == true_support
    # rows off the support are exactly zero (the prox produces hard zeros)
    for j in set(range(d)) - true_support:
        np.testing.assert_array_equal(solution.weights[j], 0.0)


def test_non_finite_rejected():
    X = np.ones((3, 2))
    y = np.array([1.0, np.nan, 0.0])
    with pytest.raises(ModelError, match="non-finite"):
        GroupLassoProblem(tasks=((X, y),), lambda_=0.1)


def test_zero_design_with_penalty_rejected():
    X = np.zeros((4, 2))
    y = np.ones(4)
    with pytest.raises(ModelError, match="degenerate"):
        solve_group_lasso(GroupLassoProblem(tasks=((X, y),), lambda_=0.1))


def test_zero_design_without_penalty_returns_zero():
    X = np.zeros((4, 2))
    y = np.ones(4)
    solution = solve_group_lasso(GroupLassoProblem(tasks=((X, y),), lambda_=0.0))
    np.testing.assert_array_equal(solution.weights, 0.0)


def test_dimension_mismatch_rejected():
    with pytest.raises(ModelError, match="dimension"):
        GroupLassoProblem(
            tasks=((np.ones((3, 2)), np.ones(3)), (np.ones((3, 4)), np.ones(3))),
            lambda_=0.0,
        )


# ---------------------------------------------------------------------------
# training wrapper
# ---------------------------------------------------------------------------

def _fv(names, values):
    return FeatureVector(tuple(names), tuple(values), ("p",), "t")


def test_train_group_lasso_full_shrinkage_predicts_task_mean():
    names = ("a", "b")
    rng = np.random.default_rng(12)
    pairs = [(_fv(names, rng.uniform(0, 1, 2)), s) for s in (0.4, 0.6, 0.5, 0.7)]
    model = train_group_lasso({"t1": pairs}, lambda_=100.0)
    fv = _fv(names, (0.9, 0.1))
    assert model.predict(fv, task="t1") == pytest.approx(0.55)
    assert all(w == 0.0 for w in model.params.tasks[0].weights)


def test_train_group_lasso_learns_linear_signal():
    names = ("a", "b")
    rng = np.random.default_rng(13)
    pairs = []
    for _ in range(40):
        x = rng.uniform(0, 1, 2)
        pairs.append((_fv(names, x), float(0.2 + 0.5 * x[0])))
    model = train_group_lasso({"t1": pairs}, lambda_=1e-8, tol=1e-14, max_iters=50000)
    test_point = _fv(names, (0.5, 0.5))
    assert model.predict(test_point, task="t1") == pytest.approx(0.45, abs=1e-4)


def test_smooth_gradient_matches_finite_differences():
    rng = np.random.default_rng(14)
    X = rng.standard_normal((10, 3))
    y = rng.standard_normal(10)
    problem = GroupLassoProblem(tasks=((X, y),), lambda_=0.0)
    W = rng.standard_normal((3, 1))
    G = smooth_gradient(problem, W)
    eps = 1e-6
    for j in range(3):
        d = np.zeros((3, 1))
        d[j, 0] = eps
        fd = (objective(problem, W + d) - objective(problem, W - d)) / (2 * eps)
        assert G[j, 0] == pytest.approx(fd, rel=1e-4, abs=1e-6)
