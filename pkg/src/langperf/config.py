"""Declarative run configuration and data loading for the CLI.

A run is described by a single JSON or YAML file; command-line flags
override individual fields. Paths are resolved relative to the config
file, and the prefix ``bundled:`` resolves into the package's bundled
data directory (e.g. ``bundled:benchmark_registry.csv``). Every command
writes the resolved configuration next to its outputs for provenance.
"""

from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping

import yaml

from . import data as bundled_data
from .datastore import (
    BenchmarkRegistry,
    DistanceMatrix,
    LanguageProfile,
    PerformanceRecord,
    Vocabulary,
    _cell,
    _column_index,
    _open_rows,
    _parse_float,
    ingest_benchmark_registry,
    ingest_distance_matrix,
    ingest_language_profiles,
    ingest_performance_table,
    ingest_vocabularies,
    normalize_score,
)
from .errors import IngestError
from .features import FeatureConfig, FeatureContext, TokenizerQuality
from .models import ModelSpec


@dataclass(frozen=True)
class PivotSettings:
    candidates: tuple[str, ...] = ()
    targets: tuple[str, ...] = ()      # empty: every profiled language
    task: str | None = None            # task providing training records / sizes
    model_path: str | None = None      # serialized model; trained fresh when unset
    spec_index: int = 0                # which entry of models to train when unset
    default_train_size: float | str = "median"


@dataclass(frozen=True)
class RunConfig:
    performance: tuple[str, ...] = ()
    profiles: str | None = None
    vocabularies: str | None = None
    matrices: Mapping[str, str] = field(default_factory=dict)
    registry: str | None = None
    train_sizes: str | None = None
    tokenizer_stats: str | None = None
    external_scores: str | None = None
    features: FeatureConfig = field(default_factory=FeatureConfig)
    models: tuple[ModelSpec, ...] = (ModelSpec(kind="mean"),)
    tasks: tuple[str, ...] = ()        # empty: every task in the table
    multitask: bool = False
    strict_lolo: bool = False
    percent_mode: str = "auto"
    delimiter: str = "auto"
    seed: int = 0
    jobs: int = 1
    output_dir: str = "runs/out"
    pivot: PivotSettings = field(default_factory=PivotSettings)
    low_coverage_threshold: int = 20


def _resolve_path(raw: str, base: Path) -> str:
    if raw.startswith("bundled:"):
        return str(bundled_data.bundled_path(raw[len("bundled:"):]))
    path = Path(raw)
    return str(path if path.is_absolute() else base / path)


def _model_spec_from_dict(obj: Mapping) -> ModelSpec:
    known = {f.name for f in dataclasses.fields(ModelSpec)}
    kwargs = {}
    for key, value in obj.items():
        name = "lambda_" if key == "lambda" else key
        if name not in known:
            raise IngestError(f"unknown model spec field {key!r}")
        kwargs[name] = value
    if "kind" not in kwargs:
        raise IngestError("model spec needs a 'kind'")
    return ModelSpec(**kwargs)


def _feature_config_from_dict(obj: Mapping) -> FeatureConfig:
    known = {f.name for f in dataclasses.fields(FeatureConfig)}
    unknown = set(obj) - known
    if unknown:
        raise IngestError(f"unknown feature config fields {sorted(unknown)}")
    kwargs = dict(obj)
    if "enabled" in kwargs:
        kwargs["enabled"] = tuple(kwargs["enabled"])
    return FeatureConfig(**kwargs)


def load_config(path: str | Path) -> RunConfig:
    """Parse a JSON or YAML run configuration, resolving relative paths."""
    path = Path(path)
    if not path.exists():
        raise IngestError(f"config file not found: {path}")
    text = path.read_text(encoding="utf-8")
    if path.suffix in (".yaml", ".yml"):
        raw = yaml.safe_load(text)
    else:
        raw = json.loads(text)
    if not isinstance(raw, dict):
        raise IngestError(f"config root must be a mapping, got {type(raw).__name__}")
    return config_from_dict(raw, base=path.parent)


def config_from_dict(raw: Mapping, base: Path | None = None) -> RunConfig:
    base = base or Path.cwd()
    known = {f.name for f in dataclasses.fields(RunConfig)}
    unknown = set(raw) - known
    if unknown:
        raise IngestError(f"unknown config fields {sorted(unknown)}")
    kwargs: dict = dict(raw)

    perf = kwargs.get("performance", ())
    if isinstance(perf, str):
        perf = [perf]
    kwargs["performance"] = tuple(_resolve_path(p, base) for p in perf)
    for key in ("profiles", "vocabularies", "registry", "train_sizes",
                "tokenizer_stats", "external_scores"):
        if kwargs.get(key):
            kwargs[key] = _resolve_path(kwargs[key], base)
    if "matrices" in kwargs:
        kwargs["matrices"] = {
            facet: _resolve_path(p, base) for facet, p in kwargs["matrices"].items()
        }
    if "features" in kwargs:
        kwargs["features"] = _feature_config_from_dict(kwargs["features"])
    if "models" in kwargs:
        kwargs["models"] = tuple(_model_spec_from_dict(m) for m in kwargs["models"])
    if "tasks" in kwargs:
        kwargs["tasks"] = tuple(kwargs["tasks"])
    if "pivot" in kwargs:
        p = dict(kwargs["pivot"])
        if "candidates" in p:
            p["candidates"] = tuple(p["candidates"])
        if "targets" in p:
            p["targets"] = tuple(p["targets"])
        if p.get("model_path"):
            p["model_path"] = _resolve_path(p["model_path"], base)
        kwargs["pivot"] = PivotSettings(**p)
    return RunConfig(**kwargs)


def config_to_dict(config: RunConfig) -> dict:
    """Plain-dict view of the resolved configuration (JSON-serializable)."""
    doc = dataclasses.asdict(config)
    doc["performance"] = list(config.performance)
    doc["matrices"] = dict(config.matrices)
    doc["models"] = [
        {("lambda" if k == "lambda_" else k): v for k, v in dataclasses.asdict(m).items()}
        for m in config.models
    ]
    doc["features"]["enabled"] = list(config.features.enabled)
    doc["tasks"] = list(config.tasks)
    doc["pivot"]["candidates"] = list(config.pivot.candidates)
    doc["pivot"]["targets"] = list(config.pivot.targets)
    return doc


# ---------------------------------------------------------------------------
# auxiliary tabular loaders (CLI plumbing)
# ---------------------------------------------------------------------------

def load_train_sizes(source, delimiter: str = "auto") -> dict[str, dict[str, float]]:
    """``task,code,size`` rows -> task -> pivot code -> examples."""
    header, rows = _open_rows(source, delimiter)
    i_task = _column_index(header, "task")
    i_code = _column_index(header, "code")
    i_size = _column_index(header, "size")
    out: dict[str, dict[str, float]] = {}
    for line_no, cells in rows:
        task, code = _cell(cells, i_task), _cell(cells, i_code)
        size = _parse_float(_cell(cells, i_size), line_no, "size")
        if size < 0:
            raise IngestError(f"row {line_no}: negative training size {size}")
        bucket = out.setdefault(task, {})
        if code in bucket:
            raise IngestError(f"row {line_no}: duplicate training size for ({task}, {code})")
        bucket[code] = size
    return out


def load_tokenizer_stats(source, delimiter: str = "auto") -> dict[str, TokenizerQuality]:
    """``code,fertility,continued_pct`` rows -> per-language tokenizer quality."""
    header, rows = _open_rows(source, delimiter)
    i_code = _column_index(header, "code")
    i_fert = _column_index(header, "fertility")
    i_cont = _column_index(header, "continued_pct")
    out: dict[str, TokenizerQuality] = {}
    for line_no, cells in rows:
        code = _cell(cells, i_code)
        if code in out:
            raise IngestError(f"row {line_no}: duplicate tokenizer stats for {code!r}")
        out[code] = TokenizerQuality(
            fertility=_parse_float(_cell(cells, i_fert), line_no, "fertility"),
            continued_pct=_parse_float(_cell(cells, i_cont), line_no, "continued_pct"),
        )
    return out


def load_external_scores(
    source, percent_mode: str = "auto", delimiter: str = "auto"
) -> dict[str, dict[str, dict[str, float]]]:
    """``task,method,target,score`` rows -> task -> method -> target -> score.

    Scores follow the same percent/fraction normalization as performance
    tables.
    """
    header, rows = _open_rows(source, delimiter)
    i_task = _column_index(header, "task")
    i_method = _column_index(header, "method")
    i_target = _column_index(header, "target")
    i_score = _column_index(header, "score")
    out: dict[str, dict[str, dict[str, float]]] = {}
    for line_no, cells in rows:
        task = _cell(cells, i_task)
        method, target = _cell(cells, i_method), _cell(cells, i_target)
        raw = _parse_float(_cell(cells, i_score), line_no, "score")
        try:
            score = normalize_score(raw, percent_mode)
        except IngestError as exc:
            raise IngestError(f"row {line_no}: {exc}") from None
        bucket = out.setdefault(task, {}).setdefault(method, {})
        if target in bucket:
            raise IngestError(
                f"row {line_no}: duplicate external score for ({task}, {method}, {target})"
            )
        bucket[target] = score
    return out


# ---------------------------------------------------------------------------
# assembled run data
# ---------------------------------------------------------------------------

@dataclass
class RunData:
    records: list[PerformanceRecord]
    profiles: dict[str, LanguageProfile]
    vocabularies: dict[str, Vocabulary]
    matrices: dict[str, DistanceMatrix]
    registry: BenchmarkRegistry | None
    train_sizes: dict[str, dict[str, float]]
    tokenizer_stats: dict[str, TokenizerQuality]
    external_scores: dict[str, dict[str, dict[str, float]]]

    def task_ids(self, config: RunConfig) -> list[str]:
        present = sorted({r.task_id for r in self.records})
        if not config.tasks:
            return present
        missing = [t for t in config.tasks if t not in present]
        if missing:
            raise IngestError(f"configured tasks not in the performance table: {missing}")
        return list(config.tasks)

    def task_records(self, task_id: str) -> list[PerformanceRecord]:
        return [r for r in self.records if r.task_id == task_id]

    def context_for(self, task_id: str | None) -> FeatureContext:
        sizes: dict[str, float] = {}
        if task_id is None:
            for bucket in self.train_sizes.values():
                sizes.update(bucket)
        else:
            sizes = dict(self.train_sizes.get(task_id, {}))
        return FeatureContext(
            profiles=self.profiles,
            matrices=self.matrices,
            vocabularies=self.vocabularies,
            train_sizes=sizes,
            tokenizer_stats=self.tokenizer_stats,
        )


def load_run_data(config: RunConfig) -> RunData:
    """Load and validate everything the configuration references."""
    records: list[PerformanceRecord] = []
    seen: dict[tuple, str] = {}
    for path in config.performance:
        batch = ingest_performance_table(
            path, percent_mode=config.percent_mode, delimiter=config.delimiter
        )
        for record in batch:
            if record.key in seen:
                raise IngestError(
                    f"duplicate record key {record.key} across {seen[record.key]} and {path}"
                )
            seen[record.key] = str(path)
        records.extend(batch)

    profiles = (
        ingest_language_profiles(config.profiles, delimiter=config.delimiter)
        if config.profiles else {}
    )
    vocabularies = (
        ingest_vocabularies(config.vocabularies, delimiter=config.delimiter)
        if config.vocabularies else {}
    )
    matrices = {
        facet: ingest_distance_matrix(path, facet, delimiter=config.delimiter)
        for facet, path in sorted(config.matrices.items())
    }
    registry = (
        ingest_benchmark_registry(config.registry, delimiter=config.delimiter)
        if config.registry else None
    )
    train_sizes = (
        load_train_sizes(config.train_sizes, delimiter=config.delimiter)
        if config.train_sizes else {}
    )
    tokenizer_stats = (
        load_tokenizer_stats(config.tokenizer_stats, delimiter=config.delimiter)
        if config.tokenizer_stats else {}
    )
    external = (
        load_external_scores(config.external_scores, config.percent_mode, config.delimiter)
        if config.external_scores else {}
    )
    return RunData(
        records=records,
        profiles=profiles,
        vocabularies=vocabularies,
        matrices=matrices,
        registry=registry,
        train_sizes=train_sizes,
        tokenizer_stats=tokenizer_stats,
        external_scores=external,
    )
