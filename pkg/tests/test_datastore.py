"""Ingest validation, normalization and round-trip serialization."""

import io
import warnings

import pytest
from hypothesis import given, strategies as st

from langperf.datastore import (
    BenchmarkRegistry,
    BenchmarkTask,
    DistanceMatrix,
    LanguageProfile,
    PerformanceRecord,
    Vocabulary,
    ingest_benchmark_registry,
    ingest_distance_matrix,
    ingest_language_profiles,
    ingest_performance_table,
    ingest_vocabularies,
    normalize_score,
    write_benchmark_registry,
    write_distance_matrix,
    write_language_profiles,
    write_performance_table,
    write_vocabularies,
)
from langperf.errors import IngestError

PERF_HEADER = "model,task,pivots,target,metric,score\n"


def perf_table(*rows):
    return PERF_HEADER + "\n".join(",".join(map(str, r)) for r in rows) + "\n"


# ---------------------------------------------------------------------------
# performance tables
# ---------------------------------------------------------------------------

def test_percent_score_normalized():
    records = ingest_performance_table(perf_table(("mbert", "xnli", "en", "sw", "acc", 50.3)))
    assert records[0].score == pytest.approx(0.503)


def test_fractional_score_kept():
    records = ingest_performance_table(perf_table(("mbert", "xnli", "en", "sw", "acc", 0.503)))
    assert records[0].score == 0.503


def test_duplicate_key_names_both_rows():
    table = perf_table(
        ("mbert", "xnli", "en", "sw", "acc", 50.0),
        ("mbert", "xnli", "en", "de", "acc", 70.0),
        ("mbert", "xnli", "en", "sw", "acc", 51.0),
    )
    with pytest.raises(IngestError, match=r"rows 2 and 4"):
        ingest_performance_table(table)


def test_score_out_of_range_rejected():
    with pytest.raises(IngestError, match="outside"):
        ingest_performance_table(perf_table(("m", "t", "en", "sw", "acc", 101.0)))
    with pytest.raises(IngestError, match="outside"):
        ingest_performance_table(perf_table(("m", "t", "en", "sw", "acc", -0.2)))


def test_malformed_row_reports_line():
    with pytest.raises(IngestError, match="row 2"):
        ingest_performance_table(perf_table(("m", "t", "en", "sw", "acc", "not-a-number")))


def test_multi_pivot_cell_and_row_order():
    table = perf_table(
        ("m", "t", "fi;ru", "sw", "f1", 55.0),
        ("m", "t", "en", "sw", "f1", 50.0),
    )
    records = ingest_performance_table(table)
    assert records[0].pivots == ("fi", "ru")
    assert [r.score for r in records] == [0.55, 0.50]  # row order preserved


def test_percent_mode_forces_interpretation():
    assert normalize_score(1.0, "percent") == 0.01
    assert normalize_score(1.0, "fraction") == 1.0
    assert normalize_score(1.0, "auto") == 1.0
    with pytest.raises(IngestError):
        normalize_score(2.0, "fraction")


@given(st.floats(min_value=0.0, max_value=100.0, allow_nan=False))
def test_normalization_idempotent(raw):
    once = normalize_score(raw, "auto")
    assert normalize_score(once, "auto") == once


# ---------------------------------------------------------------------------
# profiles
# ---------------------------------------------------------------------------

PROFILE_HEADER = "code,pretrain_tokens,joshi_class,family,latitude,longitude\n"


def test_profiles_ingest_basic():
    src = PROFILE_HEADER + "en,21000000000,5,Indo-European,51.5,-0.13\n"
    profiles = ingest_language_profiles(src)
    assert profiles["en"].pretrain_tokens == 21e9
    assert profiles["en"].joshi_class == 5
    assert profiles["en"].coords == (51.5, -0.13)


def test_swahili_class_two_profile():
    src = PROFILE_HEADER + "sw,10000000,2,Niger-Congo,,\n"
    profiles = ingest_language_profiles(src)
    assert profiles["sw"].joshi_class == 2
    assert profiles["sw"].family == "Niger-Congo"


def test_negative_pretrain_rejected():
    with pytest.raises(IngestError, match="negative"):
        ingest_language_profiles(PROFILE_HEADER + "xx,-5,,,,\n")


def test_duplicate_code_rejected():
    src = PROFILE_HEADER + "en,1,,,,\nen,2,,,,\n"
    with pytest.raises(IngestError, match="duplicate"):
        ingest_language_profiles(src)


def test_optional_fields_stay_absent():
    profiles = ingest_language_profiles("code,pretrain_tokens\nen,5\n")
    p = profiles["en"]
    assert p.joshi_class is None and p.family is None and p.coords is None
    assert p.typology == {}


def test_typology_vectors_and_missing_markers():
    src = (
        "code,pretrain_tokens,typology_syntax\n"
        "en,5,1;0;--;1\n"
        "de,4,0;1;1;--\n"
    )
    profiles = ingest_language_profiles(src)
    assert profiles["en"].typology["syntax"] == (1.0, 0.0, None, 1.0)


def test_typology_dimension_mismatch_rejected():
    src = "code,pretrain_tokens,typology_syntax\nen,5,1;0\nde,4,1;0;1\n"
    with pytest.raises(IngestError, match="dims"):
        ingest_language_profiles(src)


def test_mixed_pretrain_units_rejected():
    src = "code,pretrain_tokens,pretrain_unit\nen,5,tokens\nde,4,sentences\n"
    with pytest.raises(IngestError, match="mixed"):
        ingest_language_profiles(src)


# ---------------------------------------------------------------------------
# vocabularies
# ---------------------------------------------------------------------------

def test_vocabulary_dedup_and_empty_flag():
    src = "code,subword\nen,abc\nen,abc\nen,xyz\nzz,\n"
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        vocabs = ingest_vocabularies(src)
    assert vocabs["en"].subwords == frozenset({"abc", "xyz"})
    assert vocabs["zz"].subwords == frozenset()
    assert any("empty" in str(w.message) for w in caught)


# ---------------------------------------------------------------------------
# distance matrices
# ---------------------------------------------------------------------------

def test_symmetric_closure():
    m = ingest_distance_matrix("lang_a,lang_b,value\nen,de,0.8\n", "syntactic")
    assert m.lookup("de", "en") == 0.8
    assert m.lookup("en", "de") == 0.8


def test_diagonal_override_with_warning():
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        m = ingest_distance_matrix("lang_a,lang_b,value\nen,en,0.9\n", "syntactic")
    assert m.lookup("en", "en") == 1.0
    assert any("overridden" in str(w.message) for w in caught)


def test_similarity_range_error():
    with pytest.raises(IngestError, match="outside"):
        ingest_distance_matrix("lang_a,lang_b,value\nen,de,1.3\n", "syntactic")


def test_asymmetric_conflict_rejected():
    src = "lang_a,lang_b,value\nen,de,0.8\nde,en,0.7\n"
    with pytest.raises(IngestError, match="asymmetric"):
        ingest_distance_matrix(src, "syntactic")


def test_geographic_diagonal_and_negative():
    m = ingest_distance_matrix("lang_a,lang_b,value\nen,de,900\n", "geographic")
    assert m.lookup("en", "en") == 0.0
    with pytest.raises(IngestError, match="negative"):
        ingest_distance_matrix("lang_a,lang_b,value\nen,de,-1\n", "geographic")


def test_tab_delimiter_autodetect():
    m = ingest_distance_matrix("lang_a\tlang_b\tvalue\nen\tde\t0.5\n", "genetic")
    assert m.lookup("en", "de") == 0.5


# ---------------------------------------------------------------------------
# benchmark registry
# ---------------------------------------------------------------------------

REGISTRY_HEADER = "task_id,type,year,n_languages,n_families,language_list\n"


def test_bundled_registry_shape(bundled_registry_path):
    registry = ingest_benchmark_registry(bundled_registry_path)
    assert len(registry.tasks) == 18
    assert max(t.n_languages for t in registry.tasks) == 100
    assert registry.task("WikiANN").n_languages == 100
    assert registry.task("WikiANN").n_families == 15
    assert registry.task("XCOPA").release_year == 2020


def test_language_list_count_mismatch():
    src = REGISTRY_HEADER + "T1,Classification,2020,3,1,en;de\n"
    with pytest.raises(IngestError, match="declared count"):
        ingest_benchmark_registry(src)


def test_unparseable_year():
    src = REGISTRY_HEADER + "T1,Classification,notayear,3,1,\n"
    with pytest.raises(IngestError, match="year"):
        ingest_benchmark_registry(src)


def test_year_before_1990_rejected():
    src = REGISTRY_HEADER + "T1,Classification,1985,3,1,\n"
    with pytest.raises(IngestError, match="1990"):
        ingest_benchmark_registry(src)


# ---------------------------------------------------------------------------
# round trips
# ---------------------------------------------------------------------------

def _roundtrip(write, ingest, value, **kwargs):
    buf = io.StringIO()
    write(value, buf)
    return ingest(buf.getvalue(), **kwargs)


def test_performance_roundtrip_identity():
    records = ingest_performance_table(perf_table(
        ("mbert", "xnli", "en", "sw", "acc", 50.3),
        ("mbert", "xnli", "fi;ru", "sw", "acc", 0.61),
    ))
    assert _roundtrip(write_performance_table, ingest_performance_table, records) == records


codes_st = st.text(alphabet="abcdefgh", min_size=2, max_size=3)


@given(st.lists(
    st.tuples(codes_st, codes_st, st.floats(0.0, 1.0, allow_nan=False)),
    min_size=1, max_size=20,
))
def test_performance_roundtrip_fuzz(rows):
    records = []
    seen = set()
    for pivot, target, score in rows:
        r = PerformanceRecord("m", "t", (pivot,), target, "acc", score)
        if r.key not in seen:
            seen.add(r.key)
            records.append(r)
    assert _roundtrip(write_performance_table, ingest_performance_table, records) == records


def test_profile_roundtrip_identity():
    profiles = {
        "en": LanguageProfile("en", 21e9, 5, "Indo-European",
                              {"syntax": (1.0, None, 0.5)}, (51.5, -0.13)),
        "sw": LanguageProfile("sw", 10e6, 2, "Niger-Congo"),
        "zz": LanguageProfile("zz", 0),
    }
    assert _roundtrip(write_language_profiles, ingest_language_profiles, profiles) == profiles


def test_vocabulary_roundtrip_identity():
    vocabs = {
        "en": Vocabulary("en", frozenset({"a", "b,c", 'quo"te'})),
        "zz": Vocabulary("zz", frozenset()),
    }
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        assert _roundtrip(write_vocabularies, ingest_vocabularies, vocabs) == vocabs


def test_matrix_roundtrip_identity():
    matrix = DistanceMatrix(
        "syntactic", {("de", "en"): 0.8125, ("en", "sw"): 0.3}, frozenset({"en", "de", "sw", "xx"})
    )
    got = _roundtrip(write_distance_matrix, ingest_distance_matrix, matrix, facet="syntactic")
    assert got == matrix


def test_registry_roundtrip_identity(bundled_registry_path):
    registry = ingest_benchmark_registry(bundled_registry_path)
    assert _roundtrip(write_benchmark_registry, ingest_benchmark_registry, registry) == registry


def test_registry_with_lists_roundtrip():
    registry = BenchmarkRegistry((
        BenchmarkTask("T1", "Classification", 2020, 2, 1, frozenset({"en", "de"})),
    ))
    assert _roundtrip(write_benchmark_registry, ingest_benchmark_registry, registry) == registry
