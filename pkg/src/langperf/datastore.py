"""Ingestion, validation and serialization of all external data.

Five stores are supported, each backed by a delimited text format (UTF-8,
comma or tab separated, header row):

* performance tables   -> ``PerformanceRecord`` lists
* language profiles    -> ``LanguageProfile`` maps
* subword vocabularies -> ``Vocabulary`` maps
* typology matrices    -> ``DistanceMatrix`` (one file per facet,
                          ``lang_a,lang_b,value`` rows)
* benchmark registries -> ``BenchmarkRegistry``
                          (``task_id,type,year,n_languages,n_families[,language_list]``)

Scores are stored internally as fractions in [0, 1]; any ingested score in
(1, 100] is treated as a percentage and divided by 100 (a score of exactly
1.0 is ambiguous and read as a fraction unless ``percent_mode`` forces an
interpretation). All stores are immutable after load.
"""

from __future__ import annotations

import csv
import io
import math
import warnings
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Sequence, TextIO

from .errors import IngestError

FAMILIES = (
    "Indo-European",
    "Sino-Tibetan",
    "Niger-Congo",
    "Afro-Asiatic",
    "Austronesian",
    "Trans-New-Guinea",
    "Other",
)

SIMILARITY_FACETS = ("syntactic", "phonological", "genetic")
FACETS = SIMILARITY_FACETS + ("geographic",)

#: marker for a missing dimension inside a typology vector column
MISSING_MARKER = "--"

_SYMMETRY_TOL = 1e-9


# ---------------------------------------------------------------------------
# domain types
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LanguageProfile:
    """Per-language metadata.

    ``pretrain_tokens`` counts pre-training data in the unit declared by
    ``pretrain_unit`` (tokens by default; a dataset may declare sentences
    instead, but never mixes units within one file). Optional fields are
    ``None``/empty when the source does not provide them; they are never
    silently zero-filled. Typology vectors are tri-state per dimension:
    a float value or ``None`` for a missing dimension.
    """

    code: str
    pretrain_tokens: float
    joshi_class: int | None = None
    family: str | None = None
    typology: Mapping[str, tuple[float | None, ...]] = field(default_factory=dict)
    coords: tuple[float, float] | None = None
    pretrain_unit: str = "tokens"

    def __post_init__(self):
        if not self.code:
            raise IngestError("language code must be non-empty")
        if self.pretrain_tokens < 0:
            raise IngestError(f"{self.code}: negative pre-training size {self.pretrain_tokens}")
        if self.joshi_class is not None and self.joshi_class not in range(6):
            raise IngestError(f"{self.code}: joshi_class {self.joshi_class} outside 0..5")
        if self.family is not None and self.family not in FAMILIES:
            raise IngestError(f"{self.code}: unknown family {self.family!r}")


@dataclass(frozen=True)
class PerformanceRecord:
    """One observed score for (model, task, pivot set, target, metric)."""

    model_id: str
    task_id: str
    pivots: tuple[str, ...]
    target: str
    metric: str
    score: float

    def __post_init__(self):
        if not self.pivots:
            raise IngestError("pivot set must be non-empty")
        if not self.target:
            raise IngestError("target must be non-empty")
        if not 0.0 <= self.score <= 1.0:
            raise IngestError(f"score {self.score} outside [0, 1] after normalization")

    @property
    def key(self) -> tuple:
        return (self.model_id, self.task_id, self.pivots, self.target, self.metric)


@dataclass(frozen=True)
class Vocabulary:
    """A language's subword vocabulary (deduplicated, possibly empty)."""

    code: str
    subwords: frozenset[str]


@dataclass(frozen=True)
class DistanceMatrix:
    """Pairwise typological values for one facet.

    Entries are stored once per unordered pair (lexicographically ordered
    key), off-diagonal only; the diagonal is implied by the facet kind
    (1.0 for similarities, 0.0 for the geographic distance facet).
    """

    facet: str
    entries: Mapping[tuple[str, str], float]
    codes: frozenset[str]

    def __post_init__(self):
        if self.facet not in FACETS:
            raise IngestError(f"unknown facet {self.facet!r}; expected one of {FACETS}")

    @property
    def is_similarity(self) -> bool:
        return self.facet in SIMILARITY_FACETS

    @property
    def diagonal_value(self) -> float:
        return 1.0 if self.is_similarity else 0.0

    def lookup(self, a: str, b: str) -> float | None:
        """Raw stored value for the (a, b) pair, or ``None`` if absent.

        The diagonal is always defined, even for codes the matrix has
        never seen (self-similarity is 1 by definition).
        """
        if a == b:
            return self.diagonal_value
        key = (a, b) if a <= b else (b, a)
        return self.entries.get(key)

    def mean_entry(self) -> float | None:
        """Mean over stored off-diagonal entries; ``None`` when empty."""
        if not self.entries:
            return None
        return sum(self.entries.values()) / len(self.entries)

    def max_entry(self) -> float:
        return max(self.entries.values(), default=0.0)


@dataclass(frozen=True)
class BenchmarkTask:
    task_id: str
    task_type: str
    release_year: int
    n_languages: int
    n_families: int
    languages: frozenset[str] | None = None

    def __post_init__(self):
        if self.release_year < 1990:
            raise IngestError(f"{self.task_id}: release year {self.release_year} < 1990")
        if self.n_languages < 1:
            raise IngestError(f"{self.task_id}: language count must be >= 1")
        if self.n_families < 1:
            raise IngestError(f"{self.task_id}: family count must be >= 1")
        if self.languages is not None and len(self.languages) != self.n_languages:
            raise IngestError(
                f"{self.task_id}: language list has {len(self.languages)} entries "
                f"but declared count is {self.n_languages}"
            )


@dataclass(frozen=True)
class BenchmarkRegistry:
    tasks: tuple[BenchmarkTask, ...]

    def __post_init__(self):
        seen = set()
        for task in self.tasks:
            if task.task_id in seen:
                raise IngestError(f"duplicate task id {task.task_id!r} in registry")
            seen.add(task.task_id)

    def task(self, task_id: str) -> BenchmarkTask:
        for t in self.tasks:
            if t.task_id == task_id:
                return t
        raise KeyError(task_id)


# ---------------------------------------------------------------------------
# delimited-text plumbing
# ---------------------------------------------------------------------------

def _open_rows(source, delimiter: str = "auto") -> tuple[list[str], list[tuple[int, list[str]]]]:
    """Read (header, [(line_no, cells), ...]) from a path, file object or string.

    ``delimiter`` is ``auto`` (tab if the header contains one, else comma),
    ``comma`` or ``tab``. Line numbers are 1-based with the header on line 1.
    """
    if isinstance(source, (str, Path)) and "\n" not in str(source):
        path = Path(source)
        if not path.exists():
            raise IngestError(f"input file not found: {path}")
        text = path.read_text(encoding="utf-8")
    elif isinstance(source, str):
        text = source
    elif isinstance(source, Path):
        raise IngestError(f"input file not found: {source}")
    else:
        text = source.read()

    lines = text.splitlines()
    if not lines or not lines[0].strip():
        raise IngestError("empty input: missing header row")
    if delimiter == "auto":
        sep = "\t" if "\t" in lines[0] else ","
    elif delimiter in ("comma", ","):
        sep = ","
    elif delimiter in ("tab", "\t"):
        sep = "\t"
    else:
        raise IngestError(f"unknown delimiter option {delimiter!r}")

    reader = csv.reader(io.StringIO(text), delimiter=sep)
    header = [h.strip() for h in next(reader)]
    rows = []
    for line_no, cells in enumerate(reader, start=2):
        if not cells or all(not c.strip() for c in cells):
            continue
        rows.append((line_no, [c.strip() for c in cells]))
    return header, rows


def _column_index(header: Sequence[str], name: str, required: bool = True) -> int | None:
    try:
        return header.index(name)
    except ValueError:
        if required:
            raise IngestError(f"missing required column {name!r}; header is {list(header)}")
        return None


def _cell(cells: Sequence[str], idx: int | None) -> str:
    if idx is None or idx >= len(cells):
        return ""
    return cells[idx]


def _parse_float(text: str, line_no: int, what: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise IngestError(f"row {line_no}: cannot parse {what} from {text!r}") from None
    if not math.isfinite(value):
        raise IngestError(f"row {line_no}: non-finite {what} {text!r}")
    return value


def _parse_int(text: str, line_no: int, what: str) -> int:
    try:
        return int(text)
    except ValueError:
        raise IngestError(f"row {line_no}: cannot parse {what} from {text!r}") from None


def _fmt_number(x) -> str:
    if isinstance(x, int):
        return str(x)
    if float(x).is_integer() and abs(x) < 1e16:
        return str(int(x))
    return repr(float(x))


# ---------------------------------------------------------------------------
# score normalization
# ---------------------------------------------------------------------------

def normalize_score(raw: float, percent_mode: str = "auto") -> float:
    """Map a raw score to the internal [0, 1] fraction scale.

    auto: values in (1, 100] are percentages; values in [0, 1] are
    fractions (1.0 itself is read as a fraction). percent/fraction force
    one interpretation. Idempotent in auto mode.
    """
    if percent_mode == "percent":
        if not 0.0 <= raw <= 100.0:
            raise IngestError(f"score {raw} outside [0, 100]")
        return raw / 100.0
    if percent_mode == "fraction":
        if not 0.0 <= raw <= 1.0:
            raise IngestError(f"score {raw} outside [0, 1]")
        return raw
    if percent_mode != "auto":
        raise IngestError(f"unknown percent_mode {percent_mode!r}")
    if raw < 0.0 or raw > 100.0:
        raise IngestError(f"score {raw} outside [0, 100]")
    return raw / 100.0 if raw > 1.0 else raw


# ---------------------------------------------------------------------------
# performance tables
# ---------------------------------------------------------------------------

DEFAULT_PERFORMANCE_SCHEMA = {
    "model_id": "model",
    "task_id": "task",
    "pivots": "pivots",
    "target": "target",
    "metric": "metric",
    "score": "score",
}


def ingest_performance_table(
    source,
    schema: Mapping[str, str] | None = None,
    percent_mode: str = "auto",
    delimiter: str = "auto",
) -> list[PerformanceRecord]:
    """Parse and validate a performance table, preserving row order.

    ``schema`` maps record fields to column names (defaults to
    ``model,task,pivots,target,metric,score``). Pivot cells hold one or
    more ``;``-separated language codes.
    """
    schema = dict(DEFAULT_PERFORMANCE_SCHEMA, **(schema or {}))
    header, rows = _open_rows(source, delimiter)
    idx = {f: _column_index(header, col) for f, col in schema.items()}

    records: list[PerformanceRecord] = []
    seen: dict[tuple, int] = {}
    for line_no, cells in rows:
        if len(cells) < len(header):
            raise IngestError(f"row {line_no}: expected {len(header)} cells, got {len(cells)}")
        pivot_cell = _cell(cells, idx["pivots"])
        pivots = tuple(p.strip() for p in pivot_cell.split(";") if p.strip())
        if len(set(pivots)) != len(pivots):
            raise IngestError(f"row {line_no}: duplicate pivot code in {pivot_cell!r}")
        raw = _parse_float(_cell(cells, idx["score"]), line_no, "score")
        try:
            record = PerformanceRecord(
                model_id=_cell(cells, idx["model_id"]),
                task_id=_cell(cells, idx["task_id"]),
                pivots=pivots,
                target=_cell(cells, idx["target"]),
                metric=_cell(cells, idx["metric"]),
                score=normalize_score(raw, percent_mode),
            )
        except IngestError as exc:
            raise IngestError(f"row {line_no}: {exc}") from None
        if record.key in seen:
            raise IngestError(
                f"duplicate record key {record.key} on rows {seen[record.key]} and {line_no}"
            )
        seen[record.key] = line_no
        records.append(record)
    return records


def write_performance_table(records: Iterable[PerformanceRecord], dest: str | Path | TextIO):
    _write_csv(
        dest,
        ["model", "task", "pivots", "target", "metric", "score"],
        [
            [r.model_id, r.task_id, ";".join(r.pivots), r.target, r.metric, repr(r.score)]
            for r in records
        ],
    )


# ---------------------------------------------------------------------------
# language profiles
# ---------------------------------------------------------------------------

def ingest_language_profiles(source, delimiter: str = "auto") -> dict[str, LanguageProfile]:
    """Load profiles keyed by language code.

    Required columns: ``code``, ``pretrain_tokens``. Optional:
    ``joshi_class``, ``family``, ``latitude``/``longitude``,
    ``pretrain_unit`` (must be uniform across rows) and any number of
    ``typology_<facet>`` columns holding ``;``-separated vectors with
    ``--`` marking missing dimensions.
    """
    header, rows = _open_rows(source, delimiter)
    i_code = _column_index(header, "code")
    i_size = _column_index(header, "pretrain_tokens")
    i_class = _column_index(header, "joshi_class", required=False)
    i_family = _column_index(header, "family", required=False)
    i_lat = _column_index(header, "latitude", required=False)
    i_lon = _column_index(header, "longitude", required=False)
    i_unit = _column_index(header, "pretrain_unit", required=False)
    typology_cols = {
        h[len("typology_"):]: n for n, h in enumerate(header) if h.startswith("typology_")
    }

    profiles: dict[str, LanguageProfile] = {}
    facet_dims: dict[str, int] = {}
    units_seen: set[str] = set()
    for line_no, cells in rows:
        code = _cell(cells, i_code)
        if code in profiles:
            raise IngestError(f"row {line_no}: duplicate language code {code!r}")
        size = _parse_float(_cell(cells, i_size), line_no, "pretrain_tokens")
        if size < 0:
            raise IngestError(f"row {line_no}: negative pre-training size {size} for {code!r}")

        joshi = None
        if (raw := _cell(cells, i_class)):
            joshi = _parse_int(raw, line_no, "joshi_class")
        family = _cell(cells, i_family) or None

        coords = None
        lat_raw, lon_raw = _cell(cells, i_lat), _cell(cells, i_lon)
        if lat_raw or lon_raw:
            if not (lat_raw and lon_raw):
                raise IngestError(f"row {line_no}: latitude/longitude must both be present")
            coords = (
                _parse_float(lat_raw, line_no, "latitude"),
                _parse_float(lon_raw, line_no, "longitude"),
            )

        unit = _cell(cells, i_unit) or "tokens"
        units_seen.add(unit)

        typology: dict[str, tuple[float | None, ...]] = {}
        for facet, col in typology_cols.items():
            raw = _cell(cells, col)
            if not raw:
                continue
            vector = tuple(
                None if v == MISSING_MARKER else _parse_float(v, line_no, f"typology_{facet}")
                for v in raw.split(";")
            )
            if facet in facet_dims and facet_dims[facet] != len(vector):
                raise IngestError(
                    f"row {line_no}: typology facet {facet!r} has {len(vector)} dims, "
                    f"expected {facet_dims[facet]}"
                )
            facet_dims.setdefault(facet, len(vector))
            typology[facet] = vector

        try:
            profiles[code] = LanguageProfile(
                code=code,
                pretrain_tokens=size,
                joshi_class=joshi,
                family=family,
                typology=typology,
                coords=coords,
                pretrain_unit=unit,
            )
        except IngestError as exc:
            raise IngestError(f"row {line_no}: {exc}") from None

    if len(units_seen) > 1:
        raise IngestError(f"mixed pretrain units in one profile file: {sorted(units_seen)}")
    return profiles


def write_language_profiles(profiles: Mapping[str, LanguageProfile], dest: str | Path | TextIO):
    facets = sorted({f for p in profiles.values() for f in p.typology})
    header = ["code", "pretrain_tokens", "joshi_class", "family", "latitude", "longitude",
              "pretrain_unit"] + [f"typology_{f}" for f in facets]
    rows = []
    for code in sorted(profiles):
        p = profiles[code]
        row = [
            p.code,
            _fmt_number(p.pretrain_tokens),
            "" if p.joshi_class is None else str(p.joshi_class),
            p.family or "",
            "" if p.coords is None else repr(p.coords[0]),
            "" if p.coords is None else repr(p.coords[1]),
            p.pretrain_unit,
        ]
        for facet in facets:
            vec = p.typology.get(facet)
            row.append(
                "" if vec is None
                else ";".join(MISSING_MARKER if v is None else _fmt_number(v) for v in vec)
            )
        rows.append(row)
    _write_csv(dest, header, rows)


# ---------------------------------------------------------------------------
# vocabularies
# ---------------------------------------------------------------------------

def ingest_vocabularies(source, delimiter: str = "auto") -> dict[str, Vocabulary]:
    """Load subword vocabularies from ``code,subword`` rows.

    A row with an empty subword cell declares a language with an empty
    vocabulary; empty vocabularies are flagged with a warning.
    """
    header, rows = _open_rows(source, delimiter)
    i_code = _column_index(header, "code")
    i_sub = _column_index(header, "subword")
    collected: dict[str, set[str]] = {}
    for line_no, cells in rows:
        code = _cell(cells, i_code)
        if not code:
            raise IngestError(f"row {line_no}: empty language code")
        sub = _cell(cells, i_sub)
        bucket = collected.setdefault(code, set())
        if sub:
            bucket.add(sub)
    vocabs = {code: Vocabulary(code, frozenset(subs)) for code, subs in collected.items()}
    empty = sorted(c for c, v in vocabs.items() if not v.subwords)
    if empty:
        warnings.warn(f"empty vocabularies ingested for: {', '.join(empty)}", stacklevel=2)
    return vocabs


def write_vocabularies(vocabs: Mapping[str, Vocabulary], dest: str | Path | TextIO):
    rows = []
    for code in sorted(vocabs):
        subs = sorted(vocabs[code].subwords)
        if not subs:
            rows.append([code, ""])
        rows.extend([code, s] for s in subs)
    _write_csv(dest, ["code", "subword"], rows)


# ---------------------------------------------------------------------------
# distance matrices
# ---------------------------------------------------------------------------

def ingest_distance_matrix(source, facet: str, delimiter: str = "auto") -> DistanceMatrix:
    """Load a facet matrix from ``lang_a,lang_b,value`` rows.

    Symmetric closure is applied; entries listed in both orders must
    agree within 1e-9. Diagonal rows are validated against the facet's
    fixed diagonal (1 for similarities, 0 for geographic distance) and
    overridden with a warning when they disagree.
    """
    if facet not in FACETS:
        raise IngestError(f"unknown facet {facet!r}; expected one of {FACETS}")
    is_similarity = facet in SIMILARITY_FACETS
    header, rows = _open_rows(source, delimiter)
    i_a = _column_index(header, "lang_a")
    i_b = _column_index(header, "lang_b")
    i_v = _column_index(header, "value")

    entries: dict[tuple[str, str], float] = {}
    first_seen: dict[tuple[str, str], int] = {}
    codes: set[str] = set()
    diagonal = 1.0 if is_similarity else 0.0
    for line_no, cells in rows:
        a, b = _cell(cells, i_a), _cell(cells, i_b)
        if not a or not b:
            raise IngestError(f"row {line_no}: empty language code")
        value = _parse_float(_cell(cells, i_v), line_no, "value")
        if is_similarity and not 0.0 <= value <= 1.0:
            raise IngestError(f"row {line_no}: similarity {value} outside [0, 1]")
        if not is_similarity and value < 0.0:
            raise IngestError(f"row {line_no}: negative geographic distance {value}")
        codes.update((a, b))
        if a == b:
            if abs(value - diagonal) > _SYMMETRY_TOL:
                warnings.warn(
                    f"row {line_no}: diagonal entry ({a},{a})={value} overridden to "
                    f"{diagonal} for facet {facet}",
                    stacklevel=2,
                )
            continue
        key = (a, b) if a <= b else (b, a)
        if key in entries:
            if abs(entries[key] - value) > _SYMMETRY_TOL:
                raise IngestError(
                    f"asymmetric entries for pair {key}: {entries[key]} (row "
                    f"{first_seen[key]}) vs {value} (row {line_no})"
                )
            continue
        entries[key] = value
        first_seen[key] = line_no
    return DistanceMatrix(facet=facet, entries=entries, codes=frozenset(codes))


def write_distance_matrix(matrix: DistanceMatrix, dest: str | Path | TextIO):
    rows = [[a, b, repr(v)] for (a, b), v in sorted(matrix.entries.items())]
    paired = {c for pair in matrix.entries for c in pair}
    for code in sorted(matrix.codes - paired):
        rows.append([code, code, repr(matrix.diagonal_value)])
    rows.sort(key=lambda r: (r[0], r[1]))
    _write_csv(dest, ["lang_a", "lang_b", "value"], rows)


# ---------------------------------------------------------------------------
# benchmark registry
# ---------------------------------------------------------------------------

def ingest_benchmark_registry(source, delimiter: str = "auto") -> BenchmarkRegistry:
    """Load a task registry: ``task_id,type,year,n_languages,n_families[,language_list]``."""
    header, rows = _open_rows(source, delimiter)
    i_id = _column_index(header, "task_id")
    i_type = _column_index(header, "type")
    i_year = _column_index(header, "year")
    i_nlang = _column_index(header, "n_languages")
    i_nfam = _column_index(header, "n_families")
    i_list = _column_index(header, "language_list", required=False)

    tasks = []
    for line_no, cells in rows:
        lang_list = _cell(cells, i_list)
        languages = (
            frozenset(c.strip() for c in lang_list.split(";") if c.strip())
            if lang_list else None
        )
        try:
            tasks.append(BenchmarkTask(
                task_id=_cell(cells, i_id),
                task_type=_cell(cells, i_type),
                release_year=_parse_int(_cell(cells, i_year), line_no, "year"),
                n_languages=_parse_int(_cell(cells, i_nlang), line_no, "n_languages"),
                n_families=_parse_int(_cell(cells, i_nfam), line_no, "n_families"),
                languages=languages,
            ))
        except IngestError as exc:
            raise IngestError(f"row {line_no}: {exc}") from None
    return BenchmarkRegistry(tasks=tuple(tasks))


def write_benchmark_registry(registry: BenchmarkRegistry, dest: str | Path | TextIO):
    rows = []
    for t in registry.tasks:
        rows.append([
            t.task_id, t.task_type, str(t.release_year), str(t.n_languages),
            str(t.n_families),
            "" if t.languages is None else ";".join(sorted(t.languages)),
        ])
    _write_csv(dest, ["task_id", "type", "year", "n_languages", "n_families", "language_list"],
               rows)


# ---------------------------------------------------------------------------
# shared CSV writer
# ---------------------------------------------------------------------------

def _write_csv(dest, header: list[str], rows: Iterable[Sequence[str]]):
    if isinstance(dest, (str, Path)):
        with open(dest, "w", encoding="utf-8", newline="") as fh:
            _write_csv(fh, header, rows)
        return
    writer = csv.writer(dest, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
