"""Benchmark coverage and diversity statistics.

Reproduces the survey-style views of a task registry: cumulative task
counts by release year, the reverse cumulative distribution of languages
per task, per-language task coverage annotated with resource class, and
per-task language-family composition. Family labels come from the fixed
six-family taxonomy plus "Other"; languages without a profiled family are
counted as "Other" and surfaced in the report's data-quality section.
"""

from __future__ import annotations

import json
import statistics
import warnings
from dataclasses import dataclass
from typing import Mapping

from .datastore import BenchmarkRegistry, LanguageProfile
from .errors import EvaluationError


@dataclass(frozen=True)
class CoverageReport:
    n_tasks: int
    yearwise_cumulative: Mapping[int, int]
    langcount_rcdf: Mapping[int, int]
    per_language_task_count: Mapping[str, tuple[int, int | None]]
    family_fractions: Mapping[str, Mapping[str, float]]
    median_languages: float
    max_languages: int
    tasks_below_threshold: int
    low_coverage_threshold: int
    excluded_tasks: tuple[str, ...]       # tasks without explicit language lists
    unprofiled_languages: tuple[str, ...]  # listed languages lacking a profile


def language_task_counts(
    registry: BenchmarkRegistry,
    profiles: Mapping[str, LanguageProfile],
) -> dict[str, tuple[int, int | None]]:
    """Per-language task counts over tasks with explicit language lists.

    Each count is annotated with the language's resource class (``None``
    when unprofiled). Tasks without lists are excluded with a warning.
    """
    excluded = [t.task_id for t in registry.tasks if t.languages is None]
    if excluded:
        warnings.warn(
            f"tasks without language lists excluded from coverage counts: "
            f"{', '.join(excluded)}",
            stacklevel=2,
        )
    counts: dict[str, int] = {}
    for task in registry.tasks:
        if task.languages is None:
            continue
        for code in task.languages:
            counts[code] = counts.get(code, 0) + 1
    return {
        code: (n, profiles[code].joshi_class if code in profiles else None)
        for code, n in sorted(counts.items())
    }


def coverage_report(
    registry: BenchmarkRegistry,
    profiles: Mapping[str, LanguageProfile],
    low_coverage_threshold: int = 20,
) -> CoverageReport:
    """All four coverage statistics plus summary scalars."""
    if not registry.tasks:
        raise EvaluationError("empty registry")

    years = sorted(t.release_year for t in registry.tasks)
    yearwise = {}
    for year in range(years[0], years[-1] + 1):
        yearwise[year] = sum(1 for t in registry.tasks if t.release_year <= year)

    counts = [t.n_languages for t in registry.tasks]
    max_langs = max(counts)
    rcdf = {k: sum(1 for c in counts if c >= k) for k in range(1, max_langs + 1)}

    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        per_language = language_task_counts(registry, profiles)
    excluded = tuple(t.task_id for t in registry.tasks if t.languages is None)

    fractions: dict[str, dict[str, float]] = {}
    unprofiled: set[str] = set()
    for task in registry.tasks:
        if task.languages is None:
            continue
        tally: dict[str, int] = {}
        for code in task.languages:
            profile = profiles.get(code)
            if profile is None or profile.family is None:
                if profile is None:
                    unprofiled.add(code)
                family = "Other"
            else:
                family = profile.family
            tally[family] = tally.get(family, 0) + 1
        total = len(task.languages)
        fractions[task.task_id] = {
            fam: n / total for fam, n in sorted(tally.items())
        }

    return CoverageReport(
        n_tasks=len(registry.tasks),
        yearwise_cumulative=yearwise,
        langcount_rcdf=rcdf,
        per_language_task_count=per_language,
        family_fractions=fractions,
        median_languages=float(statistics.median(counts)),
        max_languages=max_langs,
        tasks_below_threshold=sum(1 for c in counts if c < low_coverage_threshold),
        low_coverage_threshold=low_coverage_threshold,
        excluded_tasks=excluded,
        unprofiled_languages=tuple(sorted(unprofiled)),
    )


# ---------------------------------------------------------------------------
# emitters (JSON report + one plot-ready CSV per figure shape)
# ---------------------------------------------------------------------------

def report_to_json(report: CoverageReport) -> str:
    doc = {
        "n_tasks": report.n_tasks,
        "median_languages_per_task": report.median_languages,
        "max_languages": report.max_languages,
        "tasks_below_threshold": report.tasks_below_threshold,
        "low_coverage_threshold": report.low_coverage_threshold,
        "yearwise_cumulative": {str(y): n for y, n in report.yearwise_cumulative.items()},
        "langcount_rcdf": {str(k): n for k, n in report.langcount_rcdf.items()},
        "per_language_task_count": {
            code: {"task_count": n, "joshi_class": cls}
            for code, (n, cls) in report.per_language_task_count.items()
        },
        "family_fractions": {t: dict(f) for t, f in sorted(report.family_fractions.items())},
        "data_quality": {
            "tasks_without_language_lists": list(report.excluded_tasks),
            "unprofiled_languages": list(report.unprofiled_languages),
        },
    }
    return json.dumps(doc, indent=2, sort_keys=True)


def yearwise_csv_rows(report: CoverageReport) -> list[tuple[int, int]]:
    return sorted(report.yearwise_cumulative.items())


def rcdf_csv_rows(report: CoverageReport) -> list[tuple[int, int]]:
    return sorted(report.langcount_rcdf.items())


def language_coverage_csv_rows(report: CoverageReport) -> list[tuple[str, int, str]]:
    return [
        (code, n, "" if cls is None else str(cls))
        for code, (n, cls) in report.per_language_task_count.items()
    ]


def family_fraction_csv_rows(report: CoverageReport) -> list[tuple[str, str, float]]:
    rows = []
    for task_id in sorted(report.family_fractions):
        for family, frac in sorted(report.family_fractions[task_id].items()):
            rows.append((task_id, family, frac))
    return rows
