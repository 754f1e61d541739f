"""Leave-One-Language-Out evaluation and method comparison.

Each fold withholds every record whose *target* is one language, fits the
configured predictor on the rest, and scores the withheld records. A
language with several pivot rows is a single fold: its per-record
absolute errors are averaged first, and the reported MAE averages over
folds (per-target). A per-record aggregation over all rows is also
emitted for reference. MAE values are reported scaled by 100.

Records whose pivot set merely *contains* the held-out language stay in
the training split by default; ``strict_lolo=True`` removes those too.
In multi-task mode (group lasso fitted jointly over several tasks) the
held-out target is excluded from every task's training split
simultaneously.

Folds are independent pure computations; ``jobs > 1`` evaluates them in a
thread pool with a deterministic, order-independent reduction.
"""

from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .datastore import PerformanceRecord
from .errors import EvaluationError
from .features import FeatureConfig, FeatureContext, FeatureVector, assemble_features
from .models import (
    ModelSpec,
    RegressionModel,
    fit_boosted_trees,
    fit_mean_baseline,
    train_group_lasso,
)


@dataclass(frozen=True)
class PerLanguage:
    predicted: float
    actual: float
    abs_error: float


@dataclass(frozen=True)
class EvaluationReport:
    task_id: str
    method: str
    per_language: Mapping[str, PerLanguage]
    mae_x100: float
    n_folds: int
    mae_x100_per_record: float


@dataclass(frozen=True)
class MethodRow:
    method: str
    mae_x100: float
    per_language: Mapping[str, float | None]  # abs error (fraction) per target
    n_covered: int


@dataclass(frozen=True)
class ComparisonTable:
    task_id: str
    targets: tuple[str, ...]
    rows: tuple[MethodRow, ...]


def mae_x100(pairs: Sequence[tuple[float, float]]) -> float:
    """100 x mean absolute error over (predicted, actual) pairs in [0, 1]."""
    if not pairs:
        raise EvaluationError("mae_x100 needs at least one pair")
    for pred, actual in pairs:
        if not (0.0 <= pred <= 1.0 and 0.0 <= actual <= 1.0):
            raise EvaluationError(f"pair ({pred}, {actual}) outside [0, 1]")
    return 100.0 * sum(abs(p - a) for p, a in pairs) / len(pairs)


def _canonical(records: Iterable[PerformanceRecord]) -> list[PerformanceRecord]:
    return sorted(records, key=lambda r: (r.target, r.pivots, r.model_id, r.metric))


def _train_split(
    records: Sequence[PerformanceRecord], held_out: str, strict: bool
) -> list[PerformanceRecord]:
    out = [r for r in records if r.target != held_out]
    if strict:
        out = [r for r in out if held_out not in r.pivots]
    return out


TaskData = tuple[Sequence[PerformanceRecord], FeatureContext]


def lolo_evaluate(
    records: Sequence[PerformanceRecord],
    model_spec: ModelSpec,
    context: FeatureContext | None = None,
    feature_config: FeatureConfig | None = None,
    *,
    strict_lolo: bool = False,
    aux_tasks: Mapping[str, TaskData] | None = None,
    jobs: int = 1,
) -> EvaluationReport:
    """Run LOLO cross-validation for one task and one predictor.

    ``aux_tasks`` maps additional task ids to (records, context) pairs
    that join a group-lasso fit; they contribute training data only.
    """
    records = _canonical(records)
    if not records:
        raise EvaluationError("no records to evaluate")
    task_ids = {r.task_id for r in records}
    if len(task_ids) > 1:
        raise EvaluationError(f"records span several tasks: {sorted(task_ids)}")
    task_id = records[0].task_id
    targets = sorted({r.target for r in records})
    if len(targets) < 2:
        raise EvaluationError(f"LOLO needs at least 2 target languages, got {targets}")
    if aux_tasks and task_id in aux_tasks:
        raise EvaluationError(f"aux task {task_id!r} duplicates the evaluated task")

    needs_features = model_spec.kind != "mean"
    feature_config = feature_config or FeatureConfig()
    feat: dict[tuple, FeatureVector] = {}
    if needs_features:
        if context is None:
            raise EvaluationError(f"{model_spec.kind} evaluation requires a feature context")
        for r in records:
            feat[r.key] = assemble_features(r.target, r.pivots, context, feature_config)
    aux = []
    if aux_tasks and model_spec.kind == "group_lasso":
        for aux_id in sorted(aux_tasks):
            aux_records, aux_context = aux_tasks[aux_id]
            aux_records = _canonical(aux_records)
            aux_feat = {
                r.key: assemble_features(r.target, r.pivots, aux_context, feature_config)
                for r in aux_records
            }
            aux.append((aux_id, aux_records, aux_feat))

    def run_fold(held_out: str) -> tuple[str, PerLanguage]:
        train = _train_split(records, held_out, strict_lolo)
        fold = [r for r in records if r.target == held_out]
        try:
            if model_spec.kind == "mean":
                model = fit_mean_baseline([(None, r.score) for r in train])
                predictions = [model.predict(None) for _ in fold]
            elif model_spec.kind == "boosted_trees":
                model = fit_boosted_trees(
                    [(feat[r.key], r.score) for r in train],
                    n_trees=model_spec.n_trees,
                    max_depth=model_spec.max_depth,
                    learning_rate=model_spec.learning_rate,
                )
                predictions = [model.predict(feat[r.key]) for r in fold]
            elif model_spec.kind == "group_lasso":
                task_data = {task_id: [(feat[r.key], r.score) for r in train]}
                for aux_id, aux_records, aux_feat in aux:
                    aux_train = _train_split(aux_records, held_out, strict_lolo)
                    if aux_train:
                        task_data[aux_id] = [(aux_feat[r.key], r.score) for r in aux_train]
                model = train_group_lasso(
                    task_data,
                    lambda_=model_spec.lambda_,
                    tol=model_spec.tol,
                    max_iters=model_spec.max_iters,
                )
                predictions = [model.predict(feat[r.key], task=task_id) for r in fold]
            else:
                raise EvaluationError(f"unknown model kind {model_spec.kind!r}")
        except Exception as exc:
            raise EvaluationError(f"fold {held_out!r}: {exc}") from exc
        errors = [abs(p - r.score) for p, r in zip(predictions, fold)]
        entry = PerLanguage(
            predicted=sum(predictions) / len(predictions),
            actual=sum(r.score for r in fold) / len(fold),
            abs_error=sum(errors) / len(errors),
        )
        return held_out, entry

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(run_fold, targets))
    else:
        results = [run_fold(t) for t in targets]

    per_language = dict(results)  # results follow sorted target order
    fold_errors = [per_language[t].abs_error for t in targets]
    # the per-record aggregate weights each fold by its number of rows
    fold_sizes = {t: sum(1 for r in records if r.target == t) for t in targets}
    weighted = sum(per_language[t].abs_error * fold_sizes[t] for t in targets)
    n_records = sum(fold_sizes.values())

    return EvaluationReport(
        task_id=task_id,
        method=model_spec.kind,
        per_language=per_language,
        mae_x100=100.0 * sum(fold_errors) / len(fold_errors),
        n_folds=len(targets),
        mae_x100_per_record=100.0 * weighted / n_records,
    )


def compare_methods(
    reports: Sequence[EvaluationReport],
    external_scores: Mapping[str, Mapping[str, float]] | None = None,
) -> ComparisonTable:
    """Side-by-side method table, optionally with externally supplied
    predictions (e.g. translate-based estimates).

    All reports must share the task and target-language set. External
    methods may cover a subset of the targets; uncovered cells are absent
    and the method's MAE averages over the covered languages only. Row
    order is mean baselines first, then external methods, then the
    remaining reports in input order.
    """
    if not reports:
        raise EvaluationError("compare_methods needs at least one report")
    task_ids = {r.task_id for r in reports}
    if len(task_ids) > 1:
        raise EvaluationError(f"reports span several tasks: {sorted(task_ids)}")
    task_id = reports[0].task_id
    targets = tuple(sorted(reports[0].per_language))
    actuals = {t: reports[0].per_language[t].actual for t in targets}
    for rep in reports[1:]:
        if tuple(sorted(rep.per_language)) != targets:
            raise EvaluationError(
                f"report {rep.method!r} covers different targets than {reports[0].method!r}"
            )
        for t in targets:
            if rep.per_language[t].actual != actuals[t]:
                raise EvaluationError(f"reports disagree on the actual score for {t!r}")

    rows: list[MethodRow] = []

    def report_row(rep: EvaluationReport) -> MethodRow:
        return MethodRow(
            method=rep.method,
            mae_x100=rep.mae_x100,
            per_language={t: rep.per_language[t].abs_error for t in targets},
            n_covered=len(targets),
        )

    baseline_rows = [report_row(r) for r in reports if r.method == "mean"]
    other_rows = [report_row(r) for r in reports if r.method != "mean"]

    external_rows: list[MethodRow] = []
    for method in sorted(external_scores or {}):
        preds = external_scores[method]
        unknown = sorted(set(preds) - set(targets))
        if unknown:
            raise EvaluationError(f"external method {method!r} has unknown targets {unknown}")
        per_lang: dict[str, float | None] = {}
        covered = []
        for t in targets:
            if t in preds:
                err = abs(preds[t] - actuals[t])
                per_lang[t] = err
                covered.append(err)
            else:
                per_lang[t] = None
        if not covered:
            raise EvaluationError(f"external method {method!r} covers no target languages")
        external_rows.append(MethodRow(
            method=method,
            mae_x100=100.0 * sum(covered) / len(covered),
            per_language=per_lang,
            n_covered=len(covered),
        ))

    rows = baseline_rows + external_rows + other_rows
    return ComparisonTable(task_id=task_id, targets=targets, rows=tuple(rows))


# ---------------------------------------------------------------------------
# report emitters
# ---------------------------------------------------------------------------

def report_to_dict(report: EvaluationReport) -> dict:
    return {
        "task_id": report.task_id,
        "method": report.method,
        "mae_x100": report.mae_x100,
        "mae_x100_per_record": report.mae_x100_per_record,
        "n_folds": report.n_folds,
        "per_language": {
            t: {"predicted": e.predicted, "actual": e.actual, "abs_error": e.abs_error}
            for t, e in sorted(report.per_language.items())
        },
    }


def report_to_json(report: EvaluationReport) -> str:
    return json.dumps(report_to_dict(report), indent=2, sort_keys=True)


def comparison_to_text(table: ComparisonTable) -> str:
    """Aligned-column text table: MAE x100 plus per-language errors x100."""
    headers = ["method", "mae_x100", "coverage"] + list(table.targets)
    lines = [headers]
    for row in table.rows:
        cells = [row.method, f"{row.mae_x100:.2f}", f"{row.n_covered}/{len(table.targets)}"]
        for t in table.targets:
            err = row.per_language[t]
            cells.append("-" if err is None else f"{100.0 * err:.2f}")
        lines.append(cells)
    widths = [max(len(line[i]) for line in lines) for i in range(len(headers))]
    out = []
    for n, line in enumerate(lines):
        out.append("  ".join(cell.ljust(w) for cell, w in zip(line, widths)).rstrip())
        if n == 0:
            out.append("  ".join("-" * w for w in widths))
    return f"task: {table.task_id}\n" + "\n".join(out) + "\n"


def per_language_error_rows(table: ComparisonTable) -> list[tuple[str, str, float]]:
    """Plot-ready (target, method, abs_error_x100) rows; absent cells skipped."""
    rows = []
    for t in table.targets:
        for row in table.rows:
            err = row.per_language[t]
            if err is not None:
                rows.append((t, row.method, 100.0 * err))
    return rows
