"""
Inference and Memory
====================

Pre-prediction inference (predictive interpolation), the memorisation store
and post-prediction extraction of memorised rows.
"""

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence, Tuple, Union

import numpy as np

from .exceptions import DeviantLearningError
from .mismatch import third_order_mismatch_rows
from .overlap_learning import WinnerSet


@dataclass(frozen=True)
class Prediction:
    p_r: int
    p_r_t: float
    source_index: int


@dataclass(frozen=True, eq=False)
class MemoryStore:
    """Memorised prediction vectors, one row per time step."""
    rows: np.ndarray
    counter: int = 0

    @classmethod
    def empty(cls, width: int) -> 'MemoryStore':
        return cls(rows=np.zeros((0, width), dtype=np.int64), counter=0)

    @property
    def width(self) -> int:
        return int(self.rows.shape[1])

    def __len__(self) -> int:
        return int(self.rows.shape[0])

    def row(self, index: int) -> np.ndarray:
        return self.rows[index].copy()


@dataclass(frozen=True, eq=False)
class PostPredictionResult:
    matched_rows: Tuple[int, ...] = ()
    matched_vectors: np.ndarray = field(default_factory=lambda: np.zeros((0, 0), dtype=np.int64))
    overlaps: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=np.int64))
    threshold: int = 0

    @property
    def empty(self) -> bool:
        return len(self.matched_rows) == 0

    def first_row(self) -> Optional[np.ndarray]:
        if self.empty:
            return None
        return self.matched_vectors[0]


def predictive_interpolation(winners: Union[WinnerSet, Sequence[int]], k2: Sequence[int],
                             input_element: int) -> Prediction:
    """
    Pick the winner at the first index attaining min(k2) and interpolate it
    halfway towards the observed input element.
    """
    integers = winners.integers if isinstance(winners, WinnerSet) else np.asarray(winners, dtype=np.int64)
    k2 = np.asarray(k2).reshape(-1)
    if integers.size == 0:
        raise DeviantLearningError("no winners learned")
    if integers.size != k2.size:
        raise DeviantLearningError(
            f"length mismatch: {integers.size} winners, {k2.size} mismatch values"
        )
    index = int(np.argmin(k2))  # argmin returns the first minimum
    p_r = int(integers[index])
    return Prediction(p_r=p_r, p_r_t=(p_r + int(input_element)) / 2.0, source_index=index)


def memorize(store: MemoryStore, prediction_vector: Sequence[int]) -> MemoryStore:
    vector = np.asarray(prediction_vector, dtype=np.int64).reshape(-1)
    if vector.size != store.width:
        raise DeviantLearningError(
            f"length mismatch: memory rows hold {store.width} features, got {vector.size}"
        )
    rows = np.vstack([store.rows, vector[np.newaxis, :]])
    return MemoryStore(rows=rows, counter=store.counter + 1)


def row_overlap(k3_rows: Sequence[Sequence[int]]) -> np.ndarray:
    """Number of 1s per level-3 mismatch row."""
    if isinstance(k3_rows, np.ndarray):
        if k3_rows.ndim != 2:
            raise DeviantLearningError(f"expected a 2-D matrix of rows, got shape {k3_rows.shape}")
        return k3_rows.sum(axis=1, dtype=np.int64)
    rows = list(k3_rows)
    if not rows:
        return np.zeros(0, dtype=np.int64)
    widths = {len(row) for row in rows}
    if len(widths) != 1:
        raise DeviantLearningError(f"ragged rows: found widths {sorted(widths)}")
    return np.asarray(rows, dtype=np.int64).sum(axis=1)


def compute_th3(lo: int, rounding: str = 'floor') -> int:
    """Integer row-overlap threshold: half the deviant length."""
    if lo < 1:
        raise DeviantLearningError(f"deviant length must be >= 1, got {lo}")
    if rounding == 'floor':
        return lo // 2
    if rounding == 'ceil':
        return math.ceil(lo / 2)
    raise DeviantLearningError(f"unknown rounding {rounding!r}")


def extract_memory(store: MemoryStore, current_input: Sequence[int], rho2: float, rho2_lim: float,
                   rounding: str = 'floor') -> PostPredictionResult:
    """
    Prefix-search extraction: scan memory rows in ascending order and keep
    every row whose level-3 overlap with the current input reaches T_h3.
    """
    current = np.asarray(current_input, dtype=np.int64).reshape(-1)
    k3 = third_order_mismatch_rows(current, store.rows, rho2, rho2_lim)
    threshold = compute_th3(current.size, rounding)
    if k3.shape[0] == 0:
        return PostPredictionResult(matched_vectors=np.zeros((0, current.size), dtype=np.int64),
                                    threshold=threshold)
    overlaps = row_overlap(k3)
    matched = np.flatnonzero(overlaps >= threshold)
    return PostPredictionResult(
        matched_rows=tuple(int(index) for index in matched),
        matched_vectors=store.rows[matched].copy(),
        overlaps=overlaps[matched],
        threshold=threshold,
    )
