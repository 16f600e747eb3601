"""Streaming anomaly detection on dynamic graphs."""

from ._core import (
    AnomalyRecord,
    DeleteNonexistentEdge,
    EdgeEvent,
    EmptyGroundTruth,
    Error,
    InvalidConfig,
    KTooLarge,
    MisalignedWindows,
    OutOfOrderTimestamp,
    ParseError,
    UnknownNode,
    bound_structural_delta,
    bound_theorem_s,
    bound_theorem_w,
    bound_weight_delta,
    detect,
    generate,
    inject,
    label_windows,
    precision_at_k,
    run_score,
    score_s,
    score_w,
)

__all__ = [
    "AnomalyRecord",
    "DeleteNonexistentEdge",
    "EdgeEvent",
    "EmptyGroundTruth",
    "Error",
    "InvalidConfig",
    "KTooLarge",
    "MisalignedWindows",
    "OutOfOrderTimestamp",
    "ParseError",
    "UnknownNode",
    "bound_structural_delta",
    "bound_theorem_s",
    "bound_theorem_w",
    "bound_weight_delta",
    "detect",
    "generate",
    "inject",
    "label_windows",
    "precision_at_k",
    "run_score",
    "score_s",
    "score_w",
]
