"""Command-line front end.

Subcommands:

* ``validate``  load and validate every referenced input, write a summary
* ``featurize`` dump assembled feature vectors to CSV
* ``train``     fit the configured models and serialize them
* ``lolo``      leave-one-language-out evaluation plus method comparison
* ``predict``   score (pivots, target) pairs with a serialized model
* ``pivot``     pivot x target prediction grid and best-pivot selection
* ``audit``     benchmark coverage report and plot-ready CSVs

Exit codes: 0 success, 1 validation failure, 2 runtime/model failure.
Outputs land in the run directory alongside ``resolved_config.json`` (the
provenance snapshot) and ``run_metadata.json`` (the only file carrying a
timestamp, so repeated runs are byte-identical elsewhere).
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import json
import sys
import time
from pathlib import Path

from . import audit as audit_mod
from . import evaluation, pivot as pivot_mod
from .config import RunConfig, config_to_dict, load_config, load_run_data
from .errors import IngestError, LangperfError
from .features import FeatureConfig, assemble_features
from .models import (
    ModelSpec,
    fit_boosted_trees,
    fit_mean_baseline,
    model_from_json,
    model_to_json,
    train_group_lasso,
)

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_RUNTIME = 2


def _write_json(path: Path, doc) -> None:
    path.write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def _write_csv(path: Path, header, rows) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


def _prepare_run_dir(config: RunConfig) -> Path:
    out = Path(config.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    _write_json(out / "resolved_config.json", config_to_dict(config))
    _write_json(out / "run_metadata.json", {
        "started_unix": time.time(),
        "argv": sys.argv,
    })
    return out


def _apply_overrides(config: RunConfig, args: argparse.Namespace) -> RunConfig:
    updates = {}
    if args.output_dir is not None:
        updates["output_dir"] = args.output_dir
    if args.jobs is not None:
        updates["jobs"] = args.jobs
    if args.seed is not None:
        updates["seed"] = args.seed
    if args.percent_mode is not None:
        updates["percent_mode"] = args.percent_mode
    if args.delimiter is not None:
        updates["delimiter"] = args.delimiter
    if args.strict_lolo:
        updates["strict_lolo"] = True
    if args.imputation is not None:
        updates["features"] = dataclasses.replace(config.features, imputation=args.imputation)
    return dataclasses.replace(config, **updates) if updates else config


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def cmd_validate(config: RunConfig) -> int:
    out = _prepare_run_dir(config)
    data = load_run_data(config)
    by_task = {}
    for task in sorted({r.task_id for r in data.records}):
        task_records = data.task_records(task)
        by_task[task] = {
            "records": len(task_records),
            "target_languages": sorted({r.target for r in task_records}),
            "pivot_languages": sorted({p for r in task_records for p in r.pivots}),
        }
    summary = {
        "status": "ok",
        "records": len(data.records),
        "tasks": by_task,
        "profiles": len(data.profiles),
        "vocabularies": len(data.vocabularies),
        "matrices": sorted(data.matrices),
        "registry_tasks": None if data.registry is None else len(data.registry.tasks),
        "train_size_tasks": sorted(data.train_sizes),
        "tokenizer_stats": len(data.tokenizer_stats),
    }
    _write_json(out / "validation.json", summary)
    print(f"validate: ok ({len(data.records)} records, {len(data.profiles)} profiles)")
    return EXIT_OK


def cmd_featurize(config: RunConfig) -> int:
    out = _prepare_run_dir(config)
    data = load_run_data(config)
    names = list(config.features.enabled)
    rows = []
    for task in data.task_ids(config):
        context = data.context_for(task)
        for r in sorted(data.task_records(task),
                        key=lambda r: (r.target, r.pivots, r.model_id, r.metric)):
            fv = assemble_features(r.target, r.pivots, context, config.features)
            rows.append(
                [r.model_id, r.task_id, ";".join(r.pivots), r.target, r.metric]
                + [repr(v) for v in fv.values]
            )
    _write_csv(out / "features.csv", ["model", "task", "pivots", "target", "metric"] + names,
               rows)
    print(f"featurize: wrote {len(rows)} vectors to {out / 'features.csv'}")
    return EXIT_OK


def _fit_on_task(spec: ModelSpec, data, task: str, config: RunConfig):
    records = data.task_records(task)
    if spec.kind == "mean":
        return fit_mean_baseline([(None, r.score) for r in records])
    context = data.context_for(task)
    pairs = [
        (assemble_features(r.target, r.pivots, context, config.features), r.score)
        for r in sorted(records, key=lambda r: (r.target, r.pivots, r.model_id, r.metric))
    ]
    if spec.kind == "boosted_trees":
        return fit_boosted_trees(pairs, spec.n_trees, spec.max_depth, spec.learning_rate)
    return train_group_lasso({task: pairs}, spec.lambda_, spec.tol, spec.max_iters)


def cmd_train(config: RunConfig) -> int:
    out = _prepare_run_dir(config)
    data = load_run_data(config)
    tasks = data.task_ids(config)
    written = []
    for spec in config.models:
        if spec.kind == "group_lasso" and config.multitask and len(tasks) > 1:
            task_data = {}
            for task in tasks:
                context = data.context_for(task)
                task_data[task] = [
                    (assemble_features(r.target, r.pivots, context, config.features), r.score)
                    for r in sorted(data.task_records(task),
                                    key=lambda r: (r.target, r.pivots, r.model_id, r.metric))
                ]
            model = train_group_lasso(task_data, spec.lambda_, spec.tol, spec.max_iters)
            path = out / "model_group_lasso_multitask.json"
            path.write_text(model_to_json(model) + "\n", encoding="utf-8")
            written.append(path.name)
            continue
        for task in tasks:
            model = _fit_on_task(spec, data, task, config)
            path = out / f"model_{spec.kind}_{task}.json"
            path.write_text(model_to_json(model) + "\n", encoding="utf-8")
            written.append(path.name)
    print(f"train: wrote {', '.join(written)}")
    return EXIT_OK


def cmd_lolo(config: RunConfig) -> int:
    out = _prepare_run_dir(config)
    data = load_run_data(config)
    tasks = data.task_ids(config)
    report_doc = {}
    comparison_texts = []
    per_language_rows = []
    for task in tasks:
        records = data.task_records(task)
        context = data.context_for(task)
        aux = None
        if config.multitask and len(tasks) > 1:
            aux = {
                other: (data.task_records(other), data.context_for(other))
                for other in tasks if other != task
            }
        reports = []
        for spec in config.models:
            reports.append(evaluation.lolo_evaluate(
                records,
                spec,
                context,
                config.features,
                strict_lolo=config.strict_lolo,
                aux_tasks=aux if spec.kind == "group_lasso" else None,
                jobs=config.jobs,
            ))
        external = data.external_scores.get(task)
        table = evaluation.compare_methods(reports, external)
        report_doc[task] = {rep.method: evaluation.report_to_dict(rep) for rep in reports}
        comparison_texts.append(evaluation.comparison_to_text(table))
        per_language_rows.append((task, evaluation.per_language_error_rows(table)))

    _write_json(out / "report.json", report_doc)
    (out / "comparison.txt").write_text("\n".join(comparison_texts), encoding="utf-8")
    if len(per_language_rows) == 1:
        _, rows = per_language_rows[0]
        _write_csv(out / "per_language.csv", ["target", "method", "abs_error_x100"],
                   [(t, m, repr(e)) for t, m, e in rows])
    else:
        _write_csv(
            out / "per_language.csv", ["task", "target", "method", "abs_error_x100"],
            [(task, t, m, repr(e)) for task, rows in per_language_rows for t, m, e in rows],
        )
    for task in tasks:
        maes = ", ".join(
            f"{method}={doc['mae_x100']:.2f}" for method, doc in report_doc[task].items()
        )
        print(f"lolo[{task}]: MAE x100 {maes}")
    return EXIT_OK


def cmd_predict(config: RunConfig, model_path: str, pairs_path: str,
                task: str | None) -> int:
    out = _prepare_run_dir(config)
    data = load_run_data(config)
    model = model_from_json(Path(model_path).read_text(encoding="utf-8"))
    from .datastore import _cell, _column_index, _open_rows
    header, rows = _open_rows(pairs_path, config.delimiter)
    i_pivots = _column_index(header, "pivots")
    i_target = _column_index(header, "target")
    i_task = _column_index(header, "task", required=False)
    out_rows = []
    for line_no, cells in rows:
        pivots = tuple(p for p in _cell(cells, i_pivots).split(";") if p)
        target = _cell(cells, i_target)
        row_task = _cell(cells, i_task) or task
        context = data.context_for(row_task)
        fv = assemble_features(target, pivots, context, config.features)
        pred = model.predict(fv, task=row_task if model.kind == "group_lasso" else None)
        out_rows.append([";".join(pivots), target, repr(pred)])
    _write_csv(out / "predictions.csv", ["pivots", "target", "predicted"], out_rows)
    print(f"predict: wrote {len(out_rows)} predictions to {out / 'predictions.csv'}")
    return EXIT_OK


def cmd_pivot(config: RunConfig) -> int:
    out = _prepare_run_dir(config)
    data = load_run_data(config)
    settings = config.pivot
    if not settings.candidates:
        raise IngestError("pivot requires a non-empty candidates list in the config")
    targets = settings.targets or tuple(sorted(data.profiles))
    if not targets:
        raise IngestError("pivot requires targets (or profiles to derive them from)")

    task = settings.task
    if settings.model_path:
        model = model_from_json(Path(settings.model_path).read_text(encoding="utf-8"))
    else:
        tasks = data.task_ids(config)
        if task is None:
            if len(tasks) != 1:
                raise IngestError(
                    f"pivot.task must pick one of the available tasks {tasks}"
                )
            task = tasks[0]
        spec = config.models[settings.spec_index]
        if spec.kind == "mean":
            raise IngestError("pivot ranking with the mean baseline is degenerate; "
                              "configure a feature-based model")
        model = _fit_on_task(spec, data, task, config)

    context = data.context_for(task)
    grid = pivot_mod.pivot_matrix(
        model,
        targets,
        settings.candidates,
        context,
        config.features,
        task=task if model.kind == "group_lasso" else None,
        default_train_size=settings.default_train_size,
        jobs=config.jobs,
    )
    _write_csv(out / "pivot_grid.csv", ["pivot", "target", "predicted"],
               [(p, t, repr(v)) for p, t, v in pivot_mod.grid_csv_rows(grid)])
    (out / "pivot_summary.json").write_text(
        pivot_mod.grid_summary_json(grid) + "\n", encoding="utf-8"
    )
    ranked = sorted(grid.per_pivot_average.items(), key=lambda kv: (-kv[1], kv[0]))
    top = ", ".join(f"{p}={v:.3f}" for p, v in ranked[:3])
    print(f"pivot: {len(grid.pivots)}x{len(grid.targets)} grid; best averages: {top}")
    return EXIT_OK


def cmd_audit(config: RunConfig) -> int:
    out = _prepare_run_dir(config)
    data = load_run_data(config)
    if data.registry is None:
        raise IngestError("audit requires a registry path in the config")
    report = audit_mod.coverage_report(
        data.registry, data.profiles, config.low_coverage_threshold
    )
    (out / "audit_report.json").write_text(
        audit_mod.report_to_json(report) + "\n", encoding="utf-8"
    )
    _write_csv(out / "yearwise.csv", ["year", "cumulative_tasks"],
               audit_mod.yearwise_csv_rows(report))
    _write_csv(out / "rcdf.csv", ["min_languages", "n_tasks"],
               audit_mod.rcdf_csv_rows(report))
    _write_csv(out / "language_coverage.csv", ["language", "task_count", "joshi_class"],
               audit_mod.language_coverage_csv_rows(report))
    _write_csv(out / "family_fractions.csv", ["task_id", "family", "fraction"],
               [(t, f, repr(v)) for t, f, v in audit_mod.family_fraction_csv_rows(report)])
    print(
        f"audit: {report.n_tasks} tasks, median {report.median_languages:g} languages/task, "
        f"max {report.max_languages}"
    )
    return EXIT_OK


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="langperf",
        description="Performance prediction, pivot selection and benchmark "
                    "coverage auditing for multilingual models.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ("validate", "featurize", "train", "lolo", "predict", "pivot", "audit"):
        p = sub.add_parser(name)
        p.add_argument("-c", "--config", required=True, help="JSON or YAML run config")
        p.add_argument("--output-dir", default=None)
        p.add_argument("--jobs", type=int, default=None)
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--strict-lolo", action="store_true")
        p.add_argument("--imputation", choices=("strict", "mean", "zero"), default=None)
        p.add_argument("--percent-mode", choices=("auto", "percent", "fraction"),
                       default=None)
        p.add_argument("--delimiter", choices=("auto", "comma", "tab"), default=None)
        if name == "predict":
            p.add_argument("--model", required=True, help="serialized model JSON")
            p.add_argument("--pairs", required=True,
                           help="CSV of pivots,target[,task] rows to score")
            p.add_argument("--task", default=None,
                           help="task whose training sizes apply when the pairs "
                                "file has no task column")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = _apply_overrides(load_config(args.config), args)
    except (IngestError, LangperfError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION

    try:
        if args.command == "validate":
            return cmd_validate(config)
        if args.command == "featurize":
            return cmd_featurize(config)
        if args.command == "train":
            return cmd_train(config)
        if args.command == "lolo":
            return cmd_lolo(config)
        if args.command == "predict":
            return cmd_predict(config, args.model, args.pairs, args.task)
        if args.command == "pivot":
            return cmd_pivot(config)
        if args.command == "audit":
            return cmd_audit(config)
        raise AssertionError(f"unhandled command {args.command}")
    except IngestError as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except FileNotFoundError as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except LangperfError as exc:
        print(f"runtime error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
