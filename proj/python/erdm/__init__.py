"""Entity-relationship retrieval: early-fusion indexes and ERDM ranking."""

from ._erdm import (
    ErdmError,
    Index,
    ParseError,
    ScoringParams,
    ValidationError,
    evaluate,
    feature_names,
    generate_benchmark,
    models,
    query_metrics,
    train,
)

__all__ = [
    "ErdmError",
    "Index",
    "ParseError",
    "ScoringParams",
    "ValidationError",
    "evaluate",
    "feature_names",
    "generate_benchmark",
    "models",
    "query_metrics",
    "train",
]
