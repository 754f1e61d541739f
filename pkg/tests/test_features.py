"""Feature computation: overlap, tokenizer quality, typology, assembly."""

import math

import pytest
from hypothesis import given, strategies as st

from langperf.datastore import DistanceMatrix, Vocabulary
from langperf.errors import FeatureError
from langperf.features import (
    CANONICAL_FEATURES,
    FeatureConfig,
    FeatureContext,
    FeatureVector,
    assemble_features,
    geographic_to_similarity,
    subword_overlap,
    tokenizer_quality,
    typological_similarity,
)

from conftest import build_context


def vocab(*subwords):
    return Vocabulary("x", frozenset(subwords))


# ---------------------------------------------------------------------------
# subword overlap
# ---------------------------------------------------------------------------

def test_overlap_identity():
    assert subword_overlap(vocab("a", "b", "c"), vocab("a", "b", "c")) == 1.0


def test_overlap_closed_form():
    assert subword_overlap(vocab("a", "b", "c"), vocab("b", "c", "d")) == 0.5


def test_overlap_disjoint_and_empty():
    assert subword_overlap(vocab(), vocab("a")) == 0.0
    assert subword_overlap(vocab(), vocab()) == 0.0


subword_sets = st.frozensets(st.text("abcdefg", min_size=1, max_size=2), max_size=8)


@given(subword_sets, subword_sets)
def test_overlap_symmetric_and_bounded(a, b):
    va, vb = Vocabulary("a", a), Vocabulary("b", b)
    o = subword_overlap(va, vb)
    assert o == subword_overlap(vb, va)
    assert 0.0 <= o <= 1.0


@given(subword_sets.filter(lambda s: s))
def test_overlap_self_is_one(a):
    v = Vocabulary("a", a)
    assert subword_overlap(v, v) == 1.0


# ---------------------------------------------------------------------------
# tokenizer quality
# ---------------------------------------------------------------------------

def test_tokenizer_quality_all_single():
    q = tokenizer_quality([("cat", 1), ("dog", 1)])
    assert q.fertility == 1.0 and q.continued_pct == 0.0


def test_tokenizer_quality_single_word():
    q = tokenizer_quality([("unhappiness", 3)])
    assert q.fertility == 3.0 and q.continued_pct == 1.0


def test_tokenizer_quality_mixed():
    q = tokenizer_quality([("a", 1), ("bc", 2), ("def", 3)])
    assert q.fertility == 2.0
    assert q.continued_pct == pytest.approx(2 / 3)


def test_tokenizer_quality_empty_errors():
    with pytest.raises(FeatureError):
        tokenizer_quality([])
    with pytest.raises(FeatureError):
        tokenizer_quality([("bad", 0)])


# ---------------------------------------------------------------------------
# typological similarity
# ---------------------------------------------------------------------------

SYN = DistanceMatrix("syntactic", {("de", "en"): 0.8, ("en", "fr"): 0.4},
                     frozenset({"en", "de", "fr"}))


def test_similarity_diagonal():
    assert typological_similarity("en", "en", "syntactic", SYN) == 1.0
    # the diagonal is defined even for codes the matrix has never seen
    assert typological_similarity("zz", "zz", "syntactic", SYN) == 1.0


def test_similarity_lookup():
    assert typological_similarity("en", "de", "syntactic", SYN) == 0.8


def test_similarity_mean_imputation_matches_matrix_mean():
    # oracle: the mean of the stored entries, computed independently
    expected = (0.8 + 0.4) / 2
    assert typological_similarity("en", "zz", "syntactic", SYN, policy="mean") == expected


def test_similarity_strict_policy_errors():
    with pytest.raises(FeatureError, match="zz"):
        typological_similarity("en", "zz", "syntactic", SYN, policy="strict")


def test_similarity_zero_policy():
    assert typological_similarity("en", "zz", "syntactic", SYN, policy="zero") == 0.0


def test_geographic_transform():
    geo = DistanceMatrix("geographic", {("de", "en"): 500.0, ("en", "fr"): 1000.0},
                         frozenset({"en", "de", "fr"}))
    # d_max = 1000: sim(en,de) = 1/(1+0.5), sim(en,fr) = 1/2, diagonal = 1
    assert typological_similarity("en", "de", "geographic", geo) == pytest.approx(1 / 1.5)
    assert typological_similarity("en", "fr", "geographic", geo) == pytest.approx(0.5)
    assert typological_similarity("en", "en", "geographic", geo) == 1.0
    # raw mode preserves the stored distance
    raw = typological_similarity("en", "fr", "geographic", geo, geographic_mode="raw_distance")
    assert raw == 1000.0
    # mean imputation happens on the emitted (similarity) scale
    expected = (geographic_to_similarity(500.0, 1000.0) + geographic_to_similarity(1000.0, 1000.0)) / 2
    assert typological_similarity("en", "zz", "geographic", geo, policy="mean") == expected


# ---------------------------------------------------------------------------
# assembly
# ---------------------------------------------------------------------------

def test_assemble_shape_and_order(small_context):
    fv = assemble_features("de", ("en",), small_context)
    assert fv.names == CANONICAL_FEATURES
    assert len(fv.values) == 10
    assert fv.pivot_set == ("en",) and fv.target == "de"


def test_assemble_self_transfer_is_all_ones(small_context):
    fv = assemble_features("en", ("en",), small_context)
    d = fv.as_dict()
    assert d["subword_overlap"] == 1.0
    assert d["syntactic_similarity"] == 1.0
    assert d["phonological_similarity"] == 1.0
    assert d["genetic_similarity"] == 1.0
    assert d["geographic_similarity"] == 1.0


def test_assemble_values_match_hand_computation(small_context):
    fv = assemble_features("sw", ("en",), small_context).as_dict()
    assert fv["target_pretrain"] == math.log10(1 + 10e6)
    assert fv["target_fertility"] == 1.9
    assert fv["target_continued_pct"] == 0.5
    assert fv["pivot_pretrain"] == math.log10(1 + 21e9)
    assert fv["subword_overlap"] == 0.2  # {a} over {a,b,c,d,x}
    assert fv["syntactic_similarity"] == 0.3
    assert fv["geographic_similarity"] == pytest.approx(1 / (1 + 7500 / 7500))
    assert fv["train_size"] == math.log10(1 + 50000)


def test_assemble_multi_pivot_mean_matches_single_pivot_average(small_context):
    # oracle: compute both single-pivot vectors by hand and average the
    # per-pivot features; training size is the log of the summed sizes
    single_en = assemble_features("sw", ("en",), small_context).as_dict()
    single_de = assemble_features("sw", ("de",), small_context).as_dict()
    multi = assemble_features("sw", ("en", "de"), small_context).as_dict()
    for name in ("pivot_pretrain", "subword_overlap", "syntactic_similarity",
                 "phonological_similarity", "genetic_similarity", "geographic_similarity"):
        assert multi[name] == pytest.approx((single_en[name] + single_de[name]) / 2), name
    for name in ("target_pretrain", "target_fertility", "target_continued_pct"):
        assert multi[name] == single_en[name], name
    assert multi["train_size"] == math.log10(1 + 50000 + 20000)


def test_assemble_is_pure(small_context):
    a = assemble_features("sw", ("en", "de"), small_context)
    b = assemble_features("sw", ("en", "de"), small_context)
    assert a == b
    assert a.values == b.values  # bitwise-identical floats


def test_assemble_missing_train_size_errors(small_context):
    with pytest.raises(FeatureError, match="train_sizes"):
        assemble_features("de", ("zz",), small_context,
                          FeatureConfig(imputation="zero"))


def test_assemble_strict_missing_profile_errors(small_context):
    config = FeatureConfig(imputation="strict")
    with pytest.raises(FeatureError, match="profile"):
        assemble_features("zz", ("en",), small_context, config)


def test_assemble_mean_imputation_for_missing_vocabulary():
    ctx = build_context()
    dropped = FeatureContext(
        profiles=ctx.profiles,
        matrices=ctx.matrices,
        vocabularies={c: v for c, v in ctx.vocabularies.items() if c != "sw"},
        train_sizes=ctx.train_sizes,
        tokenizer_stats=ctx.tokenizer_stats,
    )
    fv = assemble_features("sw", ("en",), dropped).as_dict()
    # only the (en, de) pair is computable: |{b,c,d}| / |{a,b,c,d,e}|
    assert fv["subword_overlap"] == pytest.approx(3 / 5)


def test_assemble_zero_policy_for_missing_vocabulary():
    ctx = build_context()
    dropped = FeatureContext(
        profiles=ctx.profiles,
        matrices=ctx.matrices,
        vocabularies={},
        train_sizes=ctx.train_sizes,
        tokenizer_stats=ctx.tokenizer_stats,
    )
    fv = assemble_features("sw", ("en",), dropped, FeatureConfig(imputation="zero"))
    assert fv.as_dict()["subword_overlap"] == 0.0
    with pytest.raises(FeatureError, match="mean-impute"):
        assemble_features("sw", ("en",), dropped, FeatureConfig(imputation="mean"))


def test_enabled_subset_preserves_canonical_order(small_context):
    config = FeatureConfig(enabled=("subword_overlap", "target_pretrain"))
    fv = assemble_features("de", ("en",), small_context, config)
    assert fv.names == ("target_pretrain", "subword_overlap")


def test_missing_matrix_for_enabled_feature_errors(small_context):
    ctx = FeatureContext(
        profiles=small_context.profiles,
        matrices={},
        vocabularies=small_context.vocabularies,
        train_sizes=small_context.train_sizes,
        tokenizer_stats=small_context.tokenizer_stats,
    )
    with pytest.raises(FeatureError, match="syntactic"):
        assemble_features("de", ("en",), ctx)


@given(st.floats(min_value=0, max_value=1e12), st.floats(min_value=0, max_value=1e12))
def test_log_pretrain_is_monotone(a, b):
    from langperf.datastore import LanguageProfile

    lo, hi = sorted((a, b))
    ctx = build_context()
    config = FeatureConfig(enabled=("target_pretrain",))

    def feature(size):
        patched = FeatureContext(
            profiles={**ctx.profiles, "xx": LanguageProfile("xx", size)},
            matrices=ctx.matrices,
            vocabularies=ctx.vocabularies,
            train_sizes=ctx.train_sizes,
            tokenizer_stats=ctx.tokenizer_stats,
        )
        return assemble_features("xx", ("en",), patched, config).values[0]

    assert feature(lo) <= feature(hi)


def test_feature_vector_invariants():
    with pytest.raises(FeatureError):
        FeatureVector(("a", "b"), (1.0,), ("en",), "de")
    with pytest.raises(FeatureError):
        FeatureVector(("a", "a"), (1.0, 2.0), ("en",), "de")
    with pytest.raises(FeatureError):
        FeatureVector(("a",), (float("nan"),), ("en",), "de")


def test_feature_config_validation():
    with pytest.raises(FeatureError):
        FeatureConfig(enabled=("not_a_feature",))
    with pytest.raises(FeatureError):
        FeatureConfig(imputation="maybe")
    with pytest.raises(FeatureError):
        FeatureConfig(aggregation="median")
