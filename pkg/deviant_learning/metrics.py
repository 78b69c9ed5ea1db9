"""Accuracy metric shared by the deviant learning engine and the HTM baseline."""

from typing import Sequence

import numpy as np

from .datasets import QuantizationSpec, dequantize
from .exceptions import DeviantLearningError


def mapca(y: Sequence[float], yhat: Sequence[float], tol: float) -> float:
    """
    Mean absolute percentage classification accuracy.

    100 * (number of positions with |y_i - yhat_i| < tol) / n. The comparison
    is strict, so tol = 0 scores 0 even for exact matches.
    """
    y = np.asarray(y, dtype=np.float64).reshape(-1)
    yhat = np.asarray(yhat, dtype=np.float64).reshape(-1)
    if y.size == 0:
        raise DeviantLearningError("cannot score an empty prediction vector")
    if y.size != yhat.size:
        raise DeviantLearningError(f"length mismatch: {y.size} observations, {yhat.size} predictions")
    hits = np.count_nonzero(np.abs(y - yhat) < tol)
    return 100.0 * hits / y.size


def mapca_records(records: Sequence, spec: QuantizationSpec, tol: float) -> float:
    """
    Score prediction records (anything with ``actual`` and ``predicted``)
    after mapping both back to original feature units.
    """
    if not records:
        raise DeviantLearningError("no prediction records to score")
    actual = dequantize(np.vstack([record.actual for record in records]), spec)
    predicted = dequantize(np.vstack([record.predicted for record in records]), spec)
    return mapca(actual, predicted, tol)
