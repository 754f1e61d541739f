"""Feature computation for (pivot set, target) language pairs.

The canonical feature order for a single pivot p and target t is:

==  ========================  ===================================================
 1  target_pretrain           log10(1 + pre-training size of t)
 2  target_fertility          avg subwords per tokenized word of t
 3  target_continued_pct      fraction of t's words split into >= 2 subwords
 4  pivot_pretrain            log10(1 + pre-training size of p)
 5  subword_overlap           Jaccard index of the two subword vocabularies
 6  syntactic_similarity      typological similarity, syntactic facet
 7  phonological_similarity   typological similarity, phonological facet
 8  genetic_similarity        typological similarity, genetic facet
 9  geographic_similarity     1 / (1 + d_geo / d_max)  (raw distance optional)
10  train_size                log10(1 + fine-tuning examples in p)
==  ========================  ===================================================

With several pivots, the per-pivot features (4-9) are reduced over the
pivot set (arithmetic mean by default) and the training-size feature is
the log of the summed sizes, so the vector dimension is fixed.

Missing inputs are resolved by the imputation policy before assembly
(``strict`` errors, ``mean`` substitutes the mean of the observed values
for that feature, ``zero`` substitutes 0), so assembled vectors never
contain NaN. All operations are pure over immutable inputs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from itertools import combinations
from typing import Mapping, Sequence

from .datastore import DistanceMatrix, LanguageProfile, Vocabulary
from .errors import FeatureError

CANONICAL_FEATURES = (
    "target_pretrain",
    "target_fertility",
    "target_continued_pct",
    "pivot_pretrain",
    "subword_overlap",
    "syntactic_similarity",
    "phonological_similarity",
    "genetic_similarity",
    "geographic_similarity",
    "train_size",
)

_FACET_FEATURES = {
    "syntactic_similarity": "syntactic",
    "phonological_similarity": "phonological",
    "genetic_similarity": "genetic",
    "geographic_similarity": "geographic",
}

IMPUTATION_POLICIES = ("strict", "mean", "zero")


@dataclass(frozen=True)
class FeatureConfig:
    """Declarative feature configuration.

    ``enabled`` is canonicalized to the documented order at construction,
    so identical configurations always yield identical feature orderings.
    """

    enabled: tuple[str, ...] = CANONICAL_FEATURES
    imputation: str = "mean"
    aggregation: str = "mean"          # multi-pivot reduction: mean | min | max
    size_transform: str = "log10p1"    # log10p1 | raw
    geographic_mode: str = "similarity"  # similarity | raw_distance

    def __post_init__(self):
        unknown = [f for f in self.enabled if f not in CANONICAL_FEATURES]
        if unknown:
            raise FeatureError(f"unknown feature names: {unknown}")
        if len(set(self.enabled)) != len(self.enabled):
            raise FeatureError("duplicate feature names in config")
        if self.imputation not in IMPUTATION_POLICIES:
            raise FeatureError(f"unknown imputation policy {self.imputation!r}")
        if self.aggregation not in ("mean", "min", "max"):
            raise FeatureError(f"unknown aggregation mode {self.aggregation!r}")
        if self.size_transform not in ("log10p1", "raw"):
            raise FeatureError(f"unknown size transform {self.size_transform!r}")
        if self.geographic_mode not in ("similarity", "raw_distance"):
            raise FeatureError(f"unknown geographic mode {self.geographic_mode!r}")
        ordered = tuple(f for f in CANONICAL_FEATURES if f in self.enabled)
        object.__setattr__(self, "enabled", ordered)


@dataclass(frozen=True)
class TokenizerQuality:
    fertility: float
    continued_pct: float

    def __post_init__(self):
        if self.fertility < 1.0:
            raise FeatureError(f"fertility {self.fertility} < 1")
        if not 0.0 <= self.continued_pct <= 1.0:
            raise FeatureError(f"continued_pct {self.continued_pct} outside [0, 1]")


@dataclass(frozen=True)
class FeatureVector:
    names: tuple[str, ...]
    values: tuple[float, ...]
    pivot_set: tuple[str, ...]
    target: str

    def __post_init__(self):
        if len(self.names) != len(self.values):
            raise FeatureError("names/values length mismatch")
        if len(set(self.names)) != len(self.names):
            raise FeatureError("duplicate feature names")
        if any(math.isnan(v) for v in self.values):
            raise FeatureError("NaN feature value")

    def as_dict(self) -> dict[str, float]:
        return dict(zip(self.names, self.values))


@dataclass
class FeatureContext:
    """Immutable bundle of everything feature assembly reads.

    ``train_sizes`` maps pivot code -> number of fine-tuning examples for
    the task at hand. Mean-imputation statistics are derived lazily and
    cached; the underlying stores must not be mutated after construction.
    """

    profiles: Mapping[str, LanguageProfile] = field(default_factory=dict)
    matrices: Mapping[str, DistanceMatrix] = field(default_factory=dict)
    vocabularies: Mapping[str, Vocabulary] = field(default_factory=dict)
    train_sizes: Mapping[str, float] = field(default_factory=dict)
    tokenizer_stats: Mapping[str, TokenizerQuality] = field(default_factory=dict)

    @cached_property
    def mean_log_pretrain(self) -> float | None:
        vals = [math.log10(1.0 + p.pretrain_tokens) for p in self.profiles.values()]
        return sum(vals) / len(vals) if vals else None

    @cached_property
    def mean_fertility(self) -> float | None:
        vals = [t.fertility for t in self.tokenizer_stats.values()]
        return sum(vals) / len(vals) if vals else None

    @cached_property
    def mean_continued(self) -> float | None:
        vals = [t.continued_pct for t in self.tokenizer_stats.values()]
        return sum(vals) / len(vals) if vals else None

    @cached_property
    def mean_overlap(self) -> float | None:
        """Mean Jaccard over all unordered pairs of loaded vocabularies."""
        codes = sorted(self.vocabularies)
        pairs = list(combinations(codes, 2))
        if not pairs:
            return None
        total = sum(
            subword_overlap(self.vocabularies[a], self.vocabularies[b]) for a, b in pairs
        )
        return total / len(pairs)


# ---------------------------------------------------------------------------
# elementary features
# ---------------------------------------------------------------------------

def subword_overlap(vp: Vocabulary, vt: Vocabulary) -> float:
    """Jaccard index of the two subword vocabularies (0 when both empty)."""
    union = len(vp.subwords | vt.subwords)
    if union == 0:
        return 0.0
    return len(vp.subwords & vt.subwords) / union


def tokenizer_quality(tokenized_words: Sequence[tuple[str, int]]) -> TokenizerQuality:
    """Fertility and continued-word rate from (word, subword count) pairs."""
    if not tokenized_words:
        raise FeatureError("tokenizer_quality needs at least one tokenized word")
    counts = []
    for word, n in tokenized_words:
        if n < 1:
            raise FeatureError(f"word {word!r} has subword count {n} < 1")
        counts.append(n)
    fertility = sum(counts) / len(counts)
    continued = sum(1 for n in counts if n >= 2) / len(counts)
    return TokenizerQuality(fertility=fertility, continued_pct=continued)


def geographic_to_similarity(distance: float, d_max: float) -> float:
    """Map a raw geographic distance to (0, 1], higher = closer."""
    if d_max <= 0.0:
        return 1.0 if distance == 0.0 else 0.0
    return 1.0 / (1.0 + distance / d_max)


def typological_similarity(
    p: str,
    t: str,
    facet: str,
    matrix: DistanceMatrix,
    policy: str = "mean",
    geographic_mode: str = "similarity",
) -> float:
    """Relatedness of (p, t) under one facet, on the emitted scale.

    Geographic distances are converted to similarities via
    ``1 / (1 + d / d_max)`` unless ``geographic_mode="raw_distance"``.
    Missing pairs resolve per the imputation policy; the mean policy uses
    the facet-matrix mean on the same scale as the returned value.
    """
    if matrix.facet != facet:
        raise FeatureError(f"matrix facet {matrix.facet!r} does not match requested {facet!r}")
    transform = facet == "geographic" and geographic_mode == "similarity"
    d_max = matrix.max_entry() if transform else 0.0

    raw = matrix.lookup(p, t)
    if raw is not None:
        return geographic_to_similarity(raw, d_max) if transform else raw

    if policy == "strict":
        missing = [c for c in (p, t) if c not in matrix.codes]
        raise FeatureError(
            f"no {facet} entry for pair ({p}, {t}); unknown codes: {missing or 'none'}"
        )
    if policy == "zero":
        return 0.0
    mean = matrix.mean_entry()
    if mean is None:
        raise FeatureError(f"cannot mean-impute from an empty {facet} matrix")
    if transform:
        values = [geographic_to_similarity(v, d_max) for v in matrix.entries.values()]
        return sum(values) / len(values)
    return mean


# ---------------------------------------------------------------------------
# assembly
# ---------------------------------------------------------------------------

def _size_feature(size: float, config: FeatureConfig) -> float:
    if config.size_transform == "raw":
        return float(size)
    return math.log10(1.0 + size)


def _impute(name: str, mean_value: float | None, policy: str, detail: str) -> float:
    if policy == "strict":
        raise FeatureError(f"{name}: {detail}")
    if policy == "zero":
        return 0.0
    if mean_value is None:
        raise FeatureError(f"{name}: {detail} and no observed values to mean-impute from")
    return mean_value


def _log_pretrain(code: str, ctx: FeatureContext, config: FeatureConfig, name: str) -> float:
    profile = ctx.profiles.get(code)
    if profile is None:
        return _impute(name, ctx.mean_log_pretrain, config.imputation,
                       f"no profile for language {code!r}")
    return math.log10(1.0 + profile.pretrain_tokens)


def _overlap(p: str, t: str, ctx: FeatureContext, config: FeatureConfig) -> float:
    vp, vt = ctx.vocabularies.get(p), ctx.vocabularies.get(t)
    if vp is None or vt is None:
        missing = [c for c, v in ((p, vp), (t, vt)) if v is None]
        return _impute("subword_overlap", ctx.mean_overlap, config.imputation,
                       f"no vocabulary for {missing}")
    return subword_overlap(vp, vt)


def _aggregate(values: list[float], mode: str) -> float:
    if mode == "mean":
        return sum(values) / len(values)
    return min(values) if mode == "min" else max(values)


def assemble_features(
    target: str,
    pivots: Sequence[str],
    context: FeatureContext,
    config: FeatureConfig | None = None,
) -> FeatureVector:
    """Build the fixed-order feature vector for (pivots, target).

    Pure: identical inputs produce bitwise-identical outputs. Raises
    ``FeatureError`` when a required input is missing under the strict
    policy, when train_sizes does not cover every pivot, or when the mean
    policy has nothing to average over.
    """
    config = config or FeatureConfig()
    pivots = tuple(pivots)
    if not pivots:
        raise FeatureError("pivot set must be non-empty")
    if len(set(pivots)) != len(pivots):
        raise FeatureError(f"duplicate pivots in {pivots}")

    values: dict[str, float] = {}
    enabled = set(config.enabled)

    if "target_pretrain" in enabled:
        values["target_pretrain"] = _log_pretrain(target, context, config, "target_pretrain")
    if "target_fertility" in enabled or "target_continued_pct" in enabled:
        stats = context.tokenizer_stats.get(target)
        if "target_fertility" in enabled:
            values["target_fertility"] = (
                stats.fertility if stats is not None
                else _impute("target_fertility", context.mean_fertility, config.imputation,
                             f"no tokenizer stats for {target!r}")
            )
        if "target_continued_pct" in enabled:
            values["target_continued_pct"] = (
                stats.continued_pct if stats is not None
                else _impute("target_continued_pct", context.mean_continued, config.imputation,
                             f"no tokenizer stats for {target!r}")
            )

    if "pivot_pretrain" in enabled:
        values["pivot_pretrain"] = _aggregate(
            [_log_pretrain(p, context, config, "pivot_pretrain") for p in pivots],
            config.aggregation,
        )
    if "subword_overlap" in enabled:
        values["subword_overlap"] = _aggregate(
            [_overlap(p, target, context, config) for p in pivots], config.aggregation
        )
    for name, facet in _FACET_FEATURES.items():
        if name not in enabled:
            continue
        matrix = context.matrices.get(facet)
        if matrix is None:
            raise FeatureError(f"{name} enabled but no {facet} matrix loaded")
        values[name] = _aggregate(
            [
                typological_similarity(p, target, facet, matrix, config.imputation,
                                       config.geographic_mode)
                for p in pivots
            ],
            config.aggregation,
        )
    if "train_size" in enabled:
        missing = [p for p in pivots if p not in context.train_sizes]
        if missing:
            raise FeatureError(f"train_sizes does not cover pivots {missing}")
        total = sum(float(context.train_sizes[p]) for p in pivots)
        values["train_size"] = _size_feature(total, config)

    return FeatureVector(
        names=config.enabled,
        values=tuple(values[name] for name in config.enabled),
        pivot_set=pivots,
        target=target,
    )
