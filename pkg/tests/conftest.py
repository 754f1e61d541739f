"""Shared fixtures: bundled data paths and a small synthetic feature context."""

from __future__ import annotations

import pytest

from langperf.data import SCORE_TABLES, bundled_path
from langperf.datastore import DistanceMatrix, LanguageProfile, Vocabulary
from langperf.features import FeatureContext, TokenizerQuality


@pytest.fixture(scope="session")
def bundled_registry_path():
    return bundled_path("benchmark_registry.csv")

@pytest.fixture(scope="session")
def score_table_paths():
    return {task: bundled_path(name) for task, name in SCORE_TABLES.items()}


@pytest.fixture(scope="session")
def sample_config_path():
    return bundled_path("sample/config.json")


def build_context(codes=("en", "de", "sw")) -> FeatureContext:
    """Tiny hand-written context covering en/de/sw with easy numbers."""
    profiles = {
        "en": LanguageProfile("en", 21e9, 5, "Indo-European"),
        "de": LanguageProfile("de", 8e9, 5, "Indo-European"),
        "sw": LanguageProfile("sw", 10e6, 2, "Niger-Congo"),
    }
    vocabularies = {
        "en": Vocabulary("en", frozenset({"a", "b", "c", "d"})),
        "de": Vocabulary("de", frozenset({"b", "c", "d", "e"})),
        "sw": Vocabulary("sw", frozenset({"a", "x"})),
    }
    matrices = {
        "syntactic": DistanceMatrix(
            "syntactic", {("de", "en"): 0.8, ("en", "sw"): 0.3, ("de", "sw"): 0.25},
            frozenset({"en", "de", "sw"})),
        "phonological": DistanceMatrix(
            "phonological", {("de", "en"): 0.7, ("en", "sw"): 0.4, ("de", "sw"): 0.35},
            frozenset({"en", "de", "sw"})),
        "genetic": DistanceMatrix(
            "genetic", {("de", "en"): 0.75, ("en", "sw"): 0.05, ("de", "sw"): 0.05},
            frozenset({"en", "de", "sw"})),
        "geographic": DistanceMatrix(
            "geographic", {("de", "en"): 900.0, ("en", "sw"): 7500.0, ("de", "sw"): 7000.0},
            frozenset({"en", "de", "sw"})),
    }
    tokenizer_stats = {
        "en": TokenizerQuality(1.2, 0.15),
        "de": TokenizerQuality(1.5, 0.3),
        "sw": TokenizerQuality(1.9, 0.5),
    }
    train_sizes = {"en": 50000.0, "de": 20000.0, "sw": 3000.0}
    return FeatureContext(
        profiles={c: profiles[c] for c in codes},
        matrices=matrices,
        vocabularies={c: vocabularies[c] for c in codes},
        train_sizes={c: train_sizes[c] for c in codes},
        tokenizer_stats={c: tokenizer_stats[c] for c in codes},
    )


@pytest.fixture
def small_context():
    return build_context()
