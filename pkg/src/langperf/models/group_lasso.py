"""Multi-task linear regression with an l1/l2 penalty on shared weight rows.

Minimizes

    sum_k 1/(2 n_k) ||y_k - X_k w_k||^2  +  lambda * sum_j ||W_j||_2

where W is d x K with column k the weights of task k and W_j the j-th row
(one feature across all tasks), so the penalty zeroes entire rows and the
tasks share a sparsity pattern. Solved by proximal gradient descent
(ISTA) with constant step 1/L, L the largest per-task eigenvalue of
X_k^T X_k / n_k bounded by power iteration. Intercepts are unpenalized:
the training wrapper centers y (and standardizes X) per task.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from ..errors import ModelError
from ..features import FeatureVector
from .base import (
    GroupLassoParams,
    RegressionModel,
    Standardizer,
    TaskWeights,
)


@dataclass(frozen=True)
class GroupLassoProblem:
    """Pre-standardized design matrices and centered responses, one per task."""

    tasks: tuple[tuple[np.ndarray, np.ndarray], ...]
    lambda_: float
    tol: float = 1e-6
    max_iters: int = 10000

    def __post_init__(self):
        if not self.tasks:
            raise ModelError("group lasso needs at least one task")
        if self.lambda_ < 0:
            raise ModelError(f"lambda must be >= 0, got {self.lambda_}")
        if self.max_iters < 1:
            raise ModelError("max_iters must be >= 1")
        dims = set()
        norm_tasks = []
        for X, y in self.tasks:
            X = np.asarray(X, dtype=float)
            y = np.asarray(y, dtype=float)
            if X.ndim != 2 or y.ndim != 1 or X.shape[0] != y.shape[0]:
                raise ModelError(f"bad task shapes X{X.shape} y{y.shape}")
            if X.shape[0] < 1:
                raise ModelError("each task needs at least one sample")
            if not (np.all(np.isfinite(X)) and np.all(np.isfinite(y))):
                raise ModelError("non-finite values in X or y")
            dims.add(X.shape[1])
            norm_tasks.append((X, y))
        if len(dims) != 1:
            raise ModelError(f"tasks disagree on feature dimension: {sorted(dims)}")
        object.__setattr__(self, "tasks", tuple(norm_tasks))

    @property
    def dim(self) -> int:
        return self.tasks[0][0].shape[1]


@dataclass(frozen=True)
class GroupLassoSolution:
    weights: np.ndarray              # (d, K)
    objectives: tuple[float, ...]    # objective after each iteration, [0] = at start
    n_iters: int
    converged: bool
    step: float


def block_soft_threshold(v: np.ndarray, tau: float) -> np.ndarray:
    """Proximal operator of tau * ||.||_2: shrink toward 0, zero inside the ball."""
    if tau < 0:
        raise ModelError(f"tau must be >= 0, got {tau}")
    v = np.asarray(v, dtype=float)
    norm = float(np.linalg.norm(v))
    if norm <= tau:
        return np.zeros_like(v)
    return v * (1.0 - tau / norm)


def _row_soft_threshold(V: np.ndarray, tau: float) -> np.ndarray:
    norms = np.linalg.norm(V, axis=1)
    scale = np.zeros_like(norms)
    nz = norms > tau
    scale[nz] = 1.0 - tau / norms[nz]
    return V * scale[:, None]


def largest_eigenvalue(A: np.ndarray, tol: float = 1e-14, max_iters: int = 5000) -> float:
    """Largest eigenvalue of a symmetric PSD matrix by power iteration."""
    A = np.asarray(A, dtype=float)
    d = A.shape[0]
    if not np.any(A):
        return 0.0
    v = 1.0 + 0.01 * np.arange(d)
    v /= np.linalg.norm(v)
    lam = 0.0
    for _ in range(max_iters):
        Av = A @ v
        norm = np.linalg.norm(Av)
        if norm == 0.0:
            # v landed in the nullspace; restart from the largest diagonal axis
            v = np.zeros(d)
            v[int(np.argmax(np.diag(A)))] = 1.0
            continue
        v = Av / norm
        new_lam = float(v @ A @ v)
        if abs(new_lam - lam) <= tol * max(abs(new_lam), 1.0):
            lam = new_lam
            break
        lam = new_lam
    # power iteration approaches lambda_max from below; never less than max diag
    return max(lam, float(np.max(np.diag(A))))


def objective(problem: GroupLassoProblem, W: np.ndarray) -> float:
    smooth = 0.0
    for k, (X, y) in enumerate(problem.tasks):
        r = y - X @ W[:, k]
        smooth += float(r @ r) / (2.0 * X.shape[0])
    penalty = problem.lambda_ * float(np.sum(np.linalg.norm(W, axis=1)))
    return smooth + penalty


def smooth_gradient(problem: GroupLassoProblem, W: np.ndarray) -> np.ndarray:
    G = np.empty_like(W)
    for k, (X, y) in enumerate(problem.tasks):
        G[:, k] = X.T @ (X @ W[:, k] - y) / X.shape[0]
    return G


def kkt_residual(problem: GroupLassoProblem, W: np.ndarray) -> float:
    """Max violation of the subgradient optimality conditions at W.

    Zero rows must satisfy ||grad_j|| <= lambda; nonzero rows must have
    grad_j + lambda * W_j / ||W_j|| = 0.
    """
    G = smooth_gradient(problem, W)
    worst = 0.0
    for j in range(W.shape[0]):
        row = W[j]
        norm = float(np.linalg.norm(row))
        if norm == 0.0:
            worst = max(worst, max(0.0, float(np.linalg.norm(G[j])) - problem.lambda_))
        else:
            worst = max(worst, float(np.linalg.norm(G[j] + problem.lambda_ * row / norm)))
    return worst


def solve_group_lasso(
    problem: GroupLassoProblem,
    w0: np.ndarray | None = None,
    debug: bool = False,
) -> GroupLassoSolution:
    """Run ISTA until the relative objective change drops below tol.

    With ``debug=True`` the solver asserts the objective is non-increasing
    at every iteration (a guarantee of the 1/L step in exact arithmetic;
    a microscopic relative slack absorbs float rounding).
    """
    d = problem.dim
    K = len(problem.tasks)
    L = max(
        largest_eigenvalue(X.T @ X / X.shape[0]) for X, _ in problem.tasks
    )
    if L == 0.0:
        if problem.lambda_ > 0:
            raise ModelError("degenerate all-zero design: L = 0 with lambda > 0")
        W = np.zeros((d, K)) if w0 is None else np.array(w0, dtype=float)
        obj = objective(problem, W)
        return GroupLassoSolution(W, (obj,), 0, True, 0.0)

    # small inflation keeps step <= 1/lambda_max even if power iteration
    # stopped a hair below the true eigenvalue (it approaches from below)
    step = 1.0 / (L * (1.0 + 1e-6))
    W = np.zeros((d, K)) if w0 is None else np.array(w0, dtype=float)
    objs = [objective(problem, W)]
    converged = False
    it = 0
    for it in range(1, problem.max_iters + 1):
        G = smooth_gradient(problem, W)
        W = _row_soft_threshold(W - step * G, step * problem.lambda_)
        obj = objective(problem, W)
        if debug:
            assert obj <= objs[-1] * (1.0 + 1e-12) + 1e-15, (
                f"objective increased at iteration {it}: {objs[-1]} -> {obj}"
            )
        prev = objs[-1]
        objs.append(obj)
        if abs(prev - obj) <= problem.tol * max(abs(prev), 1e-12):
            converged = True
            break
    return GroupLassoSolution(W, tuple(objs), it, converged, step)


def fit_group_lasso(
    problem: GroupLassoProblem,
    feature_order: Sequence[str] | None = None,
    task_ids: Sequence[str] | None = None,
    debug: bool = False,
) -> RegressionModel:
    """Solve the (pre-standardized, pre-centered) problem and wrap the result.

    The returned model carries identity standardizers and zero intercepts;
    use ``train_group_lasso`` to fit from raw feature/score pairs.
    """
    solution = solve_group_lasso(problem, debug=debug)
    K = len(problem.tasks)
    ids = list(task_ids) if task_ids is not None else [f"task{k}" for k in range(K)]
    if len(ids) != K:
        raise ModelError(f"{len(ids)} task ids for {K} tasks")
    order = tuple(feature_order) if feature_order is not None else tuple(
        f"x{j}" for j in range(problem.dim)
    )
    identity = Standardizer.identity(problem.dim)
    tasks = tuple(
        TaskWeights(
            task_id=ids[k],
            weights=tuple(solution.weights[:, k].tolist()),
            intercept=0.0,
            standardizer=identity,
        )
        for k in range(K)
    )
    params = GroupLassoParams(
        tasks=tasks,
        lambda_=problem.lambda_,
        n_iters=solution.n_iters,
        objective=solution.objectives[-1],
    )
    return RegressionModel(kind="group_lasso", feature_order=order, params=params)


def train_group_lasso(
    task_data: Mapping[str, Sequence[tuple[FeatureVector, float]]],
    lambda_: float = 0.005,
    tol: float = 1e-6,
    max_iters: int = 10000,
    debug: bool = False,
) -> RegressionModel:
    """Standardize per task, center responses, solve, and package the model.

    Task order inside the model follows the sorted task ids so the fit is
    independent of mapping iteration order.
    """
    if not task_data:
        raise ModelError("no tasks to fit")
    ids = sorted(task_data)
    order = None
    raw = []
    for task_id in ids:
        pairs = list(task_data[task_id])
        if not pairs:
            raise ModelError(f"task {task_id!r} has no training records")
        names = pairs[0][0].names
        if order is None:
            order = names
        elif names != order:
            raise ModelError(f"task {task_id!r} features {names} != {order}")
        X = np.array([fv.values for fv, _ in pairs], dtype=float)
        y = np.array([score for _, score in pairs], dtype=float)
        raw.append((X, y))

    standardizers = [Standardizer.fit(X) for X, _ in raw]
    y_means = [float(y.mean()) for _, y in raw]
    problem = GroupLassoProblem(
        tasks=tuple(
            (np.array([s.transform(row) for row in X]), y - ym)
            for (X, y), s, ym in zip(raw, standardizers, y_means)
        ),
        lambda_=lambda_,
        tol=tol,
        max_iters=max_iters,
    )
    solution = solve_group_lasso(problem, debug=debug)
    tasks = tuple(
        TaskWeights(
            task_id=task_id,
            weights=tuple(solution.weights[:, k].tolist()),
            intercept=y_means[k],
            standardizer=standardizers[k],
        )
        for k, task_id in enumerate(ids)
    )
    params = GroupLassoParams(
        tasks=tasks,
        lambda_=lambda_,
        n_iters=solution.n_iters,
        objective=solution.objectives[-1],
    )
    return RegressionModel(kind="group_lasso", feature_order=order, params=params)
