"""Shared model types: standardization, the fit/predict contract, serialization.

A trained predictor is a ``RegressionModel`` with ``kind`` one of
``mean``, ``group_lasso`` or ``boosted_trees``. Prediction standardizes
the incoming feature vector with the statistics stored at fit time,
applies the predictor, and clamps the result to [0, 1] (scores are
bounded metrics); the unclamped value is available via
``predict_detailed``. Models serialize to versioned JSON with every float
written as a 17-significant-digit decimal string, which round-trips IEEE
doubles exactly.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from ..errors import ModelError
from ..features import FeatureVector

SERIALIZATION_VERSION = 1


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


@dataclass(frozen=True)
class Standardizer:
    """Per-feature (mean, stddev) fitted on training data only.

    Constant features (zero variance) keep ``std=1`` and are flagged, so
    they pass through centered instead of dividing by zero.
    """

    means: tuple[float, ...]
    stds: tuple[float, ...]
    constant: tuple[bool, ...]

    @classmethod
    def fit(cls, X: np.ndarray) -> "Standardizer":
        X = np.asarray(X, dtype=float)
        means = X.mean(axis=0)
        stds = X.std(axis=0)
        constant = stds == 0.0
        stds = np.where(constant, 1.0, stds)
        return cls(tuple(means.tolist()), tuple(stds.tolist()), tuple(bool(c) for c in constant))

    @classmethod
    def identity(cls, dim: int) -> "Standardizer":
        return cls((0.0,) * dim, (1.0,) * dim, (False,) * dim)

    def transform(self, x: np.ndarray) -> np.ndarray:
        return (np.asarray(x, dtype=float) - np.asarray(self.means)) / np.asarray(self.stds)


@dataclass(frozen=True)
class ModelSpec:
    """Declarative model choice plus hyperparameters (unused fields ignored)."""

    kind: str
    lambda_: float = 0.005
    tol: float = 1e-6
    max_iters: int = 10000
    n_trees: int = 100
    max_depth: int = 10
    learning_rate: float = 0.1

    def __post_init__(self):
        if self.kind not in ("mean", "group_lasso", "boosted_trees"):
            raise ModelError(f"unknown model kind {self.kind!r}")


@dataclass(frozen=True)
class TreeNode:
    """One node of a regression tree; ``feature == -1`` marks a leaf."""

    feature: int
    threshold: float
    left: int
    right: int
    value: float


@dataclass(frozen=True)
class MeanParams:
    mean: float


@dataclass(frozen=True)
class TaskWeights:
    """One task's slice of a (possibly multi-task) linear model."""

    task_id: str
    weights: tuple[float, ...]
    intercept: float
    standardizer: Standardizer


@dataclass(frozen=True)
class GroupLassoParams:
    tasks: tuple[TaskWeights, ...]
    lambda_: float
    n_iters: int
    objective: float

    def task(self, task_id: str) -> TaskWeights:
        for t in self.tasks:
            if t.task_id == task_id:
                return t
        raise ModelError(f"model has no task {task_id!r}; knows {[t.task_id for t in self.tasks]}")


@dataclass(frozen=True)
class BoostedTreesParams:
    init: float
    trees: tuple[tuple[TreeNode, ...], ...]
    learning_rate: float
    n_trees: int
    max_depth: int
    standardizer: Standardizer


@dataclass(frozen=True)
class Prediction:
    value: float   # clamped to [0, 1]
    raw: float     # unclamped predictor output


@dataclass(frozen=True)
class RegressionModel:
    kind: str
    feature_order: tuple[str, ...] | None
    params: MeanParams | GroupLassoParams | BoostedTreesParams

    def predict(self, features: FeatureVector | None, task: str | None = None) -> float:
        return self.predict_detailed(features, task).value

    def predict_detailed(self, features: FeatureVector | None, task: str | None = None) -> Prediction:
        """Standardize, apply the predictor, clamp to [0, 1].

        The mean baseline ignores features entirely (``features`` may be
        ``None``); every other kind rejects vectors whose names or order
        differ from the fit-time ``feature_order``.
        """
        if self.kind == "mean":
            raw = self.params.mean
            return Prediction(value=min(1.0, max(0.0, raw)), raw=raw)
        if features is None:
            raise ModelError(f"{self.kind} model requires a feature vector")
        if self.feature_order is not None and features.names != self.feature_order:
            raise ModelError(
                f"feature order mismatch: model expects {self.feature_order}, "
                f"got {features.names}"
            )
        x = np.asarray(features.values, dtype=float)
        if not np.all(np.isfinite(x)):
            raise ModelError(f"non-finite feature value in {features.values}")

        if self.kind == "group_lasso":
            tasks = self.params.tasks
            if task is None:
                if len(tasks) != 1:
                    raise ModelError("multi-task model: predict needs a task id")
                tw = tasks[0]
            else:
                tw = self.params.task(task)
            z = tw.standardizer.transform(x)
            raw = float(np.dot(z, np.asarray(tw.weights)) + tw.intercept)
        elif self.kind == "boosted_trees":
            p = self.params
            z = p.standardizer.transform(x)
            raw = p.init
            for tree in p.trees:
                raw += p.learning_rate * _tree_value(tree, z)
        else:
            raise ModelError(f"unknown model kind {self.kind!r}")
        return Prediction(value=min(1.0, max(0.0, raw)), raw=raw)


def _tree_value(tree: Sequence[TreeNode], z: np.ndarray) -> float:
    node = tree[0]
    while node.feature >= 0:
        node = tree[node.left] if z[node.feature] < node.threshold else tree[node.right]
    return node.value


def predict(model: RegressionModel, features: FeatureVector | None, task: str | None = None) -> float:
    return model.predict(features, task)


# ---------------------------------------------------------------------------
# mean baseline
# ---------------------------------------------------------------------------

def fit_mean_baseline(records: Sequence[tuple[FeatureVector | None, float]]) -> RegressionModel:
    """Predict the arithmetic mean of the training scores for every input."""
    if not records:
        raise ModelError("cannot fit mean baseline on empty input")
    scores = [score for _, score in records]
    return RegressionModel(
        kind="mean",
        feature_order=None,
        params=MeanParams(mean=sum(scores) / len(scores)),
    )


# ---------------------------------------------------------------------------
# serialization
# ---------------------------------------------------------------------------

def _standardizer_to_json(s: Standardizer) -> dict:
    return {
        "means": [_fmt(v) for v in s.means],
        "stds": [_fmt(v) for v in s.stds],
        "constant": list(s.constant),
    }


def _standardizer_from_json(obj: Mapping) -> Standardizer:
    return Standardizer(
        means=tuple(float(v) for v in obj["means"]),
        stds=tuple(float(v) for v in obj["stds"]),
        constant=tuple(bool(v) for v in obj["constant"]),
    )


def model_to_json(model: RegressionModel) -> str:
    doc: dict = {
        "version": SERIALIZATION_VERSION,
        "kind": model.kind,
        "feature_order": None if model.feature_order is None else list(model.feature_order),
    }
    p = model.params
    if model.kind == "mean":
        doc["mean"] = _fmt(p.mean)
    elif model.kind == "group_lasso":
        doc["lambda"] = _fmt(p.lambda_)
        doc["n_iters"] = p.n_iters
        doc["objective"] = _fmt(p.objective)
        doc["tasks"] = [
            {
                "task_id": t.task_id,
                "weights": [_fmt(w) for w in t.weights],
                "intercept": _fmt(t.intercept),
                "standardizer": _standardizer_to_json(t.standardizer),
            }
            for t in p.tasks
        ]
    elif model.kind == "boosted_trees":
        doc["init"] = _fmt(p.init)
        doc["learning_rate"] = _fmt(p.learning_rate)
        doc["n_trees"] = p.n_trees
        doc["max_depth"] = p.max_depth
        doc["standardizer"] = _standardizer_to_json(p.standardizer)
        doc["trees"] = [
            [
                [n.feature, None if n.feature < 0 else _fmt(n.threshold),
                 n.left, n.right, _fmt(n.value) if n.feature < 0 else None]
                for n in tree
            ]
            for tree in p.trees
        ]
    return json.dumps(doc, indent=2, sort_keys=True)


def model_from_json(text: str) -> RegressionModel:
    doc = json.loads(text)
    version = doc.get("version")
    if version != SERIALIZATION_VERSION:
        raise ModelError(f"unsupported model serialization version {version!r}")
    kind = doc["kind"]
    order = None if doc["feature_order"] is None else tuple(doc["feature_order"])
    if kind == "mean":
        return RegressionModel(kind, order, MeanParams(mean=float(doc["mean"])))
    if kind == "group_lasso":
        tasks = tuple(
            TaskWeights(
                task_id=t["task_id"],
                weights=tuple(float(w) for w in t["weights"]),
                intercept=float(t["intercept"]),
                standardizer=_standardizer_from_json(t["standardizer"]),
            )
            for t in doc["tasks"]
        )
        params = GroupLassoParams(
            tasks=tasks,
            lambda_=float(doc["lambda"]),
            n_iters=int(doc["n_iters"]),
            objective=float(doc["objective"]),
        )
        return RegressionModel(kind, order, params)
    if kind == "boosted_trees":
        trees = tuple(
            tuple(
                TreeNode(
                    feature=int(n[0]),
                    threshold=0.0 if n[1] is None else float(n[1]),
                    left=int(n[2]),
                    right=int(n[3]),
                    value=0.0 if n[4] is None else float(n[4]),
                )
                for n in tree
            )
            for tree in doc["trees"]
        )
        params = BoostedTreesParams(
            init=float(doc["init"]),
            trees=trees,
            learning_rate=float(doc["learning_rate"]),
            n_trees=int(doc["n_trees"]),
            max_depth=int(doc["max_depth"]),
            standardizer=_standardizer_from_json(doc["standardizer"]),
        )
        return RegressionModel(kind, order, params)
    raise ModelError(f"unknown model kind {kind!r}")
