"""Predictors with a uniform fit/predict contract."""

from .base import (
    BoostedTreesParams,
    GroupLassoParams,
    MeanParams,
    ModelSpec,
    Prediction,
    RegressionModel,
    Standardizer,
    TaskWeights,
    TreeNode,
    fit_mean_baseline,
    model_from_json,
    model_to_json,
    predict,
)
from .boosted_trees import fit_boosted_trees, staged_training_mse
from .group_lasso import (
    GroupLassoProblem,
    GroupLassoSolution,
    block_soft_threshold,
    fit_group_lasso,
    kkt_residual,
    largest_eigenvalue,
    objective,
    smooth_gradient,
    solve_group_lasso,
    train_group_lasso,
)

__all__ = [
    "BoostedTreesParams",
    "GroupLassoParams",
    "GroupLassoProblem",
    "GroupLassoSolution",
    "MeanParams",
    "ModelSpec",
    "Prediction",
    "RegressionModel",
    "Standardizer",
    "TaskWeights",
    "TreeNode",
    "block_soft_threshold",
    "fit_boosted_trees",
    "fit_group_lasso",
    "fit_mean_baseline",
    "kkt_residual",
    "largest_eigenvalue",
    "model_from_json",
    "model_to_json",
    "objective",
    "predict",
    "smooth_gradient",
    "solve_group_lasso",
    "staged_training_mse",
    "train_group_lasso",
]
