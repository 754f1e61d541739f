"""Pivot-language selection: which training language maximizes predicted
performance on each target.

The optimization is solved exactly by a linear scan over all (pivot,
target) pairs. Ties in the argmax break toward the lexicographically
smallest pivot code so results are reproducible. Candidate pivots without
a known training-set size get a configured default (the median of the
known sizes unless an explicit number is given); the grid output flags
which pivots were filled in this way.
"""

from __future__ import annotations

import json
import statistics
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from typing import Mapping, Sequence

from .errors import FeatureError
from .features import FeatureConfig, FeatureContext, assemble_features
from .models import RegressionModel


@dataclass(frozen=True)
class PivotSelection:
    target: str
    best_pivot: str
    predicted: float
    full_row: Mapping[str, float]


@dataclass(frozen=True)
class PivotGrid:
    pivots: tuple[str, ...]
    targets: tuple[str, ...]
    scores: Mapping[str, Mapping[str, float]]   # pivot -> target -> predicted
    per_pivot_average: Mapping[str, float]
    selections: Mapping[str, PivotSelection]    # target -> selection
    assumed_train_sizes: Mapping[str, float]    # pivots filled with the default


def fill_train_sizes(
    context: FeatureContext,
    candidates: Sequence[str],
    default: float | str = "median",
) -> tuple[FeatureContext, dict[str, float]]:
    """Return a context whose train_sizes covers every candidate pivot.

    ``default`` is an explicit size or ``"median"`` (median of the known
    sizes). The second element lists the pivots that were filled.
    """
    missing = [p for p in candidates if p not in context.train_sizes]
    if not missing:
        return context, {}
    if default == "median":
        known = sorted(float(v) for v in context.train_sizes.values())
        if not known:
            raise FeatureError(
                "no known training sizes to take a median from; "
                "configure an explicit default size"
            )
        value = float(statistics.median(known))
    else:
        value = float(default)
    filled = {p: value for p in missing}
    sizes = dict(context.train_sizes)
    sizes.update(filled)
    return replace(context, train_sizes=sizes), filled


def _predict_pair(model, pivot, target, context, config, task):
    try:
        fv = assemble_features(target, (pivot,), context, config)
    except FeatureError as exc:
        raise FeatureError(f"pair (pivot={pivot!r}, target={target!r}): {exc}") from exc
    return model.predict(fv, task=task)


def select_best_pivot(
    model: RegressionModel,
    target: str,
    candidates: Sequence[str],
    context: FeatureContext,
    config: FeatureConfig | None = None,
    task: str | None = None,
) -> PivotSelection:
    """Argmax of predicted performance over single-pivot candidates."""
    if not candidates:
        raise FeatureError("candidate pivot set must be non-empty")
    config = config or FeatureConfig()
    full_row = {
        p: _predict_pair(model, p, target, context, config, task)
        for p in sorted(set(candidates))
    }
    best_pivot, predicted = None, None
    for p in sorted(full_row):  # lexicographic scan; strict > keeps the first maximizer
        if predicted is None or full_row[p] > predicted:
            best_pivot, predicted = p, full_row[p]
    return PivotSelection(
        target=target, best_pivot=best_pivot, predicted=predicted, full_row=full_row
    )


def pivot_matrix(
    model: RegressionModel,
    targets: Sequence[str],
    candidates: Sequence[str],
    context: FeatureContext,
    config: FeatureConfig | None = None,
    task: str | None = None,
    default_train_size: float | str = "median",
    jobs: int = 1,
) -> PivotGrid:
    """Full pivot x target prediction grid with per-pivot averages and
    per-target best pivots."""
    if not targets or not candidates:
        raise FeatureError("targets and candidates must be non-empty")
    config = config or FeatureConfig()
    pivots = tuple(sorted(set(candidates)))
    target_list = tuple(sorted(set(targets)))
    context, filled = fill_train_sizes(context, pivots, default_train_size)

    def run_target(t: str) -> tuple[str, PivotSelection]:
        return t, select_best_pivot(model, t, pivots, context, config, task)

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            selections = dict(pool.map(run_target, target_list))
    else:
        selections = dict(run_target(t) for t in target_list)

    scores = {
        p: {t: selections[t].full_row[p] for t in target_list} for p in pivots
    }
    averages = {
        p: sum(scores[p][t] for t in target_list) / len(target_list) for p in pivots
    }
    return PivotGrid(
        pivots=pivots,
        targets=target_list,
        scores=scores,
        per_pivot_average=averages,
        selections=selections,
        assumed_train_sizes=filled,
    )


def grid_csv_rows(grid: PivotGrid) -> list[tuple[str, str, float]]:
    return [(p, t, grid.scores[p][t]) for p in grid.pivots for t in grid.targets]


def grid_summary_json(grid: PivotGrid) -> str:
    doc = {
        "pivots": list(grid.pivots),
        "targets": list(grid.targets),
        "per_pivot_average": {p: grid.per_pivot_average[p] for p in grid.pivots},
        "selections": {
            t: {
                "best_pivot": s.best_pivot,
                "predicted": s.predicted,
            }
            for t, s in sorted(grid.selections.items())
        },
        "assumed_train_sizes": dict(sorted(grid.assumed_train_sizes.items())),
    }
    return json.dumps(doc, indent=2, sort_keys=True)
