"""Bundled data files.

``benchmark_registry.csv`` holds the 18-task survey registry (counts
only; per-task language lists are user-supplied). The ``mbert_*.csv``
score tables hold zero-shot mBERT scores per target language for the four
case-study tasks, and ``sample/`` carries a small self-contained feature
dataset (profiles, typology matrices, vocabularies, tokenizer statistics,
training sizes) for the same languages, suitable for demos and tests.
"""

from importlib.resources import files
from pathlib import Path

SCORE_TABLES = {
    "pawsx": "mbert_pawsx.csv",
    "xnli": "mbert_xnli.csv",
    "xquad": "mbert_xquad.csv",
    "tydiqa_goldp": "mbert_tydiqa_goldp.csv",
}


def bundled_path(name: str) -> Path:
    """Filesystem path of a bundled data file (e.g. ``benchmark_registry.csv``
    or ``sample/profiles.csv``)."""
    path = Path(str(files(__package__).joinpath(name)))
    if not path.exists():
        raise FileNotFoundError(f"no bundled data file {name!r}")
    return path
