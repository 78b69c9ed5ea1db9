"""
Backward Additive Deviant Computing (BADC)
==========================================

Feed-forward extrapolation from memorised deviants: the latest memorised
chunk is treated as the deviant and every earlier chunk as a standard. The
mean absolute deviation between them is added to the latest chunk.

Absolute deviations are never negative, so the extrapolation can only stay
level or move upward.
"""

from typing import Sequence

import numpy as np

from .exceptions import DeviantLearningError
from .inference_memory import MemoryStore, PostPredictionResult


def aggregated_deviant(chunks: Sequence[float]) -> float:
    """K_avg = sum_{j<n} |K_n - K_j| / n (the j = n term contributes 0)."""
    sequence = np.asarray(chunks, dtype=np.float64).reshape(-1)
    if sequence.size == 0:
        raise DeviantLearningError("cannot aggregate an empty deviant sequence")
    latest = sequence[-1]
    return float(np.abs(latest - sequence[:-1]).sum() / sequence.size)


def numeric_prediction(k_avg: float, k_n: float) -> float:
    return float(k_avg) + float(k_n)


def extrapolate(memory: MemoryStore, column: int) -> float:
    """BADC forecast for one feature column of the memory store."""
    if len(memory) == 0:
        raise DeviantLearningError("cannot extrapolate from an empty memory store")
    if not 0 <= column < memory.width:
        raise DeviantLearningError(f"feature column {column} out of range for width {memory.width}")
    chunks = memory.rows[:, column]
    return numeric_prediction(aggregated_deviant(chunks), chunks[-1])


def extrapolate_all(memory: MemoryStore) -> np.ndarray:
    return np.array([extrapolate(memory, column) for column in range(memory.width)], dtype=np.float64)


def memory_field_effect(badc_prediction: float, post_match: PostPredictionResult, column: int) -> float:
    """
    Combine the BADC forecast with the first post-prediction match: the mean
    of the two, or the BADC forecast alone when nothing matched.
    """
    matched_row = post_match.first_row()
    if matched_row is None:
        return float(badc_prediction)
    return (float(badc_prediction) + float(matched_row[column])) / 2.0
