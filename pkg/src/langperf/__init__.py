"""langperf: performance prediction for massively multilingual models.

Predicts per-language scores from typological and dataset features,
evaluates predictors with leave-one-language-out cross-validation, ranks
fine-tuning pivot languages, and audits multilingual benchmarks for
language coverage and diversity.
"""

from .audit import CoverageReport, coverage_report, language_task_counts
from .datastore import (
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
)
from .errors import (
    EvaluationError,
    FeatureError,
    IngestError,
    LangperfError,
    ModelError,
)
from .evaluation import (
    ComparisonTable,
    EvaluationReport,
    compare_methods,
    lolo_evaluate,
    mae_x100,
)
from .features import (
    FeatureConfig,
    FeatureContext,
    FeatureVector,
    TokenizerQuality,
    assemble_features,
    subword_overlap,
    tokenizer_quality,
    typological_similarity,
)
from .models import (
    ModelSpec,
    RegressionModel,
    fit_boosted_trees,
    fit_group_lasso,
    fit_mean_baseline,
    model_from_json,
    model_to_json,
    predict,
    train_group_lasso,
)
from .pivot import PivotGrid, PivotSelection, pivot_matrix, select_best_pivot

__version__ = "0.1.0"
