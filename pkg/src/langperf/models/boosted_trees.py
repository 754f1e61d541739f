"""Gradient-boosted regression trees with exact greedy splits.

Squared-error boosting in its minimal deterministic form: the ensemble
starts at the training mean, and each round fits one regression tree to
the current residuals and adds ``learning_rate`` times its predictions.
Split search is exact: every midpoint between consecutive distinct
feature values is scored by the reduction in the sum of squared errors,
and ties break toward the lowest feature index, then the lowest
threshold. There is no row/column subsampling and no leaf regularization,
so identical inputs always produce identical ensembles.

Defaults: 100 trees, maximum depth 10, learning rate 0.1.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

from ..errors import ModelError
from ..features import FeatureVector
from .base import BoostedTreesParams, RegressionModel, Standardizer, TreeNode, _tree_value

DEFAULT_N_TREES = 100
DEFAULT_MAX_DEPTH = 10
DEFAULT_LEARNING_RATE = 0.1


def _best_split(X: np.ndarray, r: np.ndarray, rows: np.ndarray):
    """Best (feature, threshold, gain) over all exact splits, or None.

    Gain is the decrease in total SSE. Features are scanned in index
    order and only strictly better gains replace the incumbent, so equal
    gains resolve to the lowest feature index; within a feature,
    ``argmax`` takes the first (lowest-threshold) maximizer.
    """
    n = rows.size
    if n < 2:
        return None
    y = r[rows]
    total = y.sum()
    total_sq = (y * y).sum()
    parent_sse = total_sq - total * total / n
    if parent_sse <= 0.0:
        return None

    best = None
    best_gain = 0.0
    for f in range(X.shape[1]):
        order = np.argsort(X[rows, f], kind="stable")
        xs = X[rows[order], f]
        ys = y[order]
        valid = xs[:-1] != xs[1:]
        if not valid.any():
            continue
        csum = np.cumsum(ys)[:-1]
        csq = np.cumsum(ys * ys)[:-1]
        nl = np.arange(1, n, dtype=float)
        nr = n - nl
        sse_left = csq - csum * csum / nl
        sse_right = (total_sq - csq) - (total - csum) ** 2 / nr
        gain = np.where(valid, parent_sse - sse_left - sse_right, -np.inf)
        i = int(np.argmax(gain))
        if gain[i] > best_gain:
            best_gain = float(gain[i])
            best = (f, float((xs[i] + xs[i + 1]) / 2.0), best_gain)
    return best


def _fit_tree(X: np.ndarray, r: np.ndarray, max_depth: int) -> tuple[tuple[TreeNode, ...], np.ndarray]:
    """Greedy least-squares tree on residuals r; also returns its
    predictions on the training rows (from the leaf assignments)."""
    nodes: list[TreeNode] = []
    train_pred = np.zeros(X.shape[0])

    def build(rows: np.ndarray, depth: int) -> int:
        index = len(nodes)
        nodes.append(TreeNode(-1, 0.0, -1, -1, 0.0))  # placeholder
        split = _best_split(X, r, rows) if depth < max_depth else None
        if split is None:
            value = float(r[rows].mean())
            nodes[index] = TreeNode(-1, 0.0, -1, -1, value)
            train_pred[rows] = value
            return index
        f, threshold, _ = split
        mask = X[rows, f] < threshold
        left = build(rows[mask], depth + 1)
        right = build(rows[~mask], depth + 1)
        nodes[index] = TreeNode(f, threshold, left, right, 0.0)
        return index

    build(np.arange(X.shape[0]), 0)
    return tuple(nodes), train_pred


def fit_boosted_trees(
    records: Sequence[tuple[FeatureVector, float]],
    n_trees: int = DEFAULT_N_TREES,
    max_depth: int = DEFAULT_MAX_DEPTH,
    learning_rate: float = DEFAULT_LEARNING_RATE,
) -> RegressionModel:
    """Fit the ensemble on (feature vector, score) pairs."""
    if not records:
        raise ModelError("cannot fit boosted trees on empty input")
    if n_trees < 1:
        raise ModelError(f"n_trees must be >= 1, got {n_trees}")
    if max_depth < 0:
        raise ModelError(f"max_depth must be >= 0, got {max_depth}")
    if not 0.0 < learning_rate <= 1.0:
        raise ModelError(f"learning_rate must be in (0, 1], got {learning_rate}")

    order = records[0][0].names
    for fv, _ in records:
        if fv.names != order:
            raise ModelError(f"inconsistent feature names: {fv.names} != {order}")
    X_raw = np.array([fv.values for fv, _ in records], dtype=float)
    y = np.array([score for _, score in records], dtype=float)
    if not (np.all(np.isfinite(X_raw)) and np.all(np.isfinite(y))):
        raise ModelError("non-finite values in training data")

    standardizer = Standardizer.fit(X_raw)
    X = np.array([standardizer.transform(row) for row in X_raw])

    init = float(y.mean())
    F = np.full(y.shape, init)
    trees = []
    for _ in range(n_trees):
        tree, pred = _fit_tree(X, y - F, max_depth)
        F = F + learning_rate * pred
        trees.append(tree)

    params = BoostedTreesParams(
        init=init,
        trees=tuple(trees),
        learning_rate=learning_rate,
        n_trees=n_trees,
        max_depth=max_depth,
        standardizer=standardizer,
    )
    return RegressionModel(kind="boosted_trees", feature_order=order, params=params)


def staged_training_mse(
    model: RegressionModel, records: Sequence[tuple[FeatureVector, float]]
) -> list[float]:
    """Training MSE after each boosting round, recomputed from the stored
    trees (independent of the incremental predictions used during the fit)."""
    if model.kind != "boosted_trees":
        raise ModelError("staged_training_mse expects a boosted_trees model")
    p = model.params
    X = np.array([p.standardizer.transform(np.asarray(fv.values, dtype=float))
                  for fv, _ in records])
    y = np.array([score for _, score in records], dtype=float)
    F = np.full(y.shape, p.init)
    curve = []
    for tree in p.trees:
        F = F + p.learning_rate * np.array([_tree_value(tree, x) for x in X])
        curve.append(float(np.mean((y - F) ** 2)))
    return curve
