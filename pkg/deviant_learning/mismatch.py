"""
Mismatch Kernels
================

Real Absolute Deviation (RAD) mismatch at the three levels used by the
deviant learning engine:

- level 1: every input element against every generative standard (binarised)
- level 2: the next input against the learned winner integers
- level 3: the current input against memorised prediction rows (binarised)

All functions are pure; inputs are quantized non-negative integers.
"""

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .exceptions import DeviantLearningError


def as_input_vector(values: Sequence[int]) -> np.ndarray:
    """Coerce to a 1-D int64 InputVector, rejecting negative elements."""
    vector = np.asarray(values, dtype=np.int64).reshape(-1)
    if vector.size and vector.min() < 0:
        raise DeviantLearningError("input elements must be non-negative integers")
    return vector


def rad(a: Sequence[int], b: int) -> np.ndarray:
    """Element-wise |a[j] - b|."""
    return np.abs(np.asarray(a, dtype=np.int64) - np.int64(b))


def first_order_mismatch(input_vector: Sequence[int], standards: Sequence[int], rho1: float) -> np.ndarray:
    """
    Level-1 mismatch binarised at the permanence rho1.

    Returns an (n inputs x l_ext standards) uint8 matrix whose cell (i, l) is 1
    iff |input[i] - standards[l]| <= rho1.
    """
    standards = np.asarray(standards, dtype=np.int64).reshape(-1)
    if standards.size == 0:
        raise DeviantLearningError("no generative standards")
    if rho1 < 0:
        raise DeviantLearningError(f"rho1 must be >= 0, got {rho1}")
    inputs = np.asarray(input_vector, dtype=np.int64).reshape(-1)
    deviation = np.abs(inputs[:, np.newaxis] - standards[np.newaxis, :])
    return (deviation <= rho1).astype(np.uint8)


def second_order_mismatch(next_input_element: int, winners: Sequence[int]) -> np.ndarray:
    """Level-2 mismatch of one next-step input element against each winner integer."""
    winners = np.asarray(winners, dtype=np.int64).reshape(-1)
    if winners.size == 0:
        raise DeviantLearningError("no winners learned")
    return rad(winners, next_input_element)


def mismatch_average(k2: Sequence[float]) -> float:
    """Arithmetic mean of a level-2 mismatch vector."""
    values = np.asarray(k2, dtype=np.float64).reshape(-1)
    if values.size == 0:
        raise DeviantLearningError("cannot average an empty mismatch vector")
    return float(values.mean())


@dataclass(frozen=True)
class RatingState:
    """Running cumulative mean of level-2 averages (the rating factor k_r)."""
    running_sum: float = 0.0
    count: int = 0

    @property
    def k_r(self) -> float:
        if self.count == 0:
            return 0.0
        return self.running_sum / self.count


def rating_update(state: RatingState, avg: float) -> RatingState:
    if avg < 0:
        raise DeviantLearningError(f"mismatch average must be >= 0, got {avg}")
    return RatingState(running_sum=state.running_sum + float(avg), count=state.count + 1)


def _check_rho2(rho2: float, rho2_lim: float) -> None:
    if not 0.0 <= rho2_lim <= 1.0:
        raise DeviantLearningError(f"rho2_lim must lie in [0, 1], got {rho2_lim}")
    if not 0.0 <= rho2 <= rho2_lim:
        raise DeviantLearningError(f"rho2 must lie in [0, rho2_lim={rho2_lim}], got {rho2}")


def third_order_mismatch(current_input: Sequence[int], memory_row: Sequence[int],
                         rho2: float, rho2_lim: float) -> np.ndarray:
    """Level-3 mismatch of the current input against one memory row, binarised at rho2."""
    _check_rho2(rho2, rho2_lim)
    current = np.asarray(current_input, dtype=np.int64).reshape(-1)
    row = np.asarray(memory_row, dtype=np.int64).reshape(-1)
    if current.shape != row.shape:
        raise DeviantLearningError(
            f"length mismatch: input has {current.size} elements, memory row has {row.size}"
        )
    return (np.abs(current - row) <= rho2).astype(np.uint8)


def third_order_mismatch_rows(current_input: Sequence[int], memory_rows: np.ndarray,
                              rho2: float, rho2_lim: float) -> np.ndarray:
    """Vectorised third_order_mismatch against every row of a memory matrix."""
    _check_rho2(rho2, rho2_lim)
    current = np.asarray(current_input, dtype=np.int64).reshape(-1)
    rows = np.asarray(memory_rows, dtype=np.int64)
    if rows.size == 0:
        return np.zeros((0, current.size), dtype=np.uint8)
    if rows.ndim != 2 or rows.shape[1] != current.size:
        raise DeviantLearningError(
            f"length mismatch: input has {current.size} elements, memory rows have shape {rows.shape}"
        )
    return (np.abs(rows - current[np.newaxis, :]) <= rho2).astype(np.uint8)
