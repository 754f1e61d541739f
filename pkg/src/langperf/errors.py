"""Exception types shared across the toolkit."""


class LangperfError(Exception):
    """Base class for all toolkit errors."""


class IngestError(LangperfError):
    """An input file violated its schema or a datastore invariant."""


class FeatureError(LangperfError):
    """Feature assembly failed (missing data under strict policy, bad config)."""


class ModelError(LangperfError):
    """Model fitting or prediction failed."""


class EvaluationError(LangperfError):
    """Cross-validation setup or report assembly failed."""
