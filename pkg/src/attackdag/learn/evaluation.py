"""Prediction scoring and search-space bookkeeping."""

from __future__ import annotations

from typing import Sequence

from ..model import Metrics


class LengthMismatch(ValueError):
    pass


def evaluate(predictions: Sequence[int], truth: Sequence[int]) -> Metrics:
    """Confusion-count metrics for +1/-1 label sequences."""
    if len(predictions) != len(truth):
        raise LengthMismatch(f"{len(predictions)} predictions vs {len(truth)} labels")
    if not predictions:
        raise LengthMismatch("nothing to evaluate")
    tp = fp = tn = fn = 0
    for pred, actual in zip(predictions, truth):
        if pred not in (1, -1) or actual not in (1, -1):
            raise ValueError(f"labels must be +1 or -1, got ({pred!r}, {actual!r})")
        if actual == 1:
            if pred == 1:
                tp += 1
            else:
                fn += 1
        else:
            if pred == 1:
                fp += 1
            else:
                tn += 1
    return Metrics.from_counts(tp=tp, fp=fp, tn=tn, fn=fn)


def search_space_reduction(n_predicted_positive: int, n_candidates: int) -> float:
    """Fraction of the candidate space a human no longer has to review."""
    if n_candidates <= 0:
        raise ValueError("candidate count must be positive")
    if not 0 <= n_predicted_positive <= n_candidates:
        raise ValueError("positive count outside 0..candidates")
    return 1.0 - n_predicted_positive / n_candidates


def format_reduction(n_predicted_positive: int, n_candidates: int) -> str:
    return f"{100.0 * search_space_reduction(n_predicted_positive, n_candidates):.1f}%"
