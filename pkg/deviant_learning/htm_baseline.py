"""
HTM Baseline
============

Simplified HTM-CLA spatial pooler used as the comparison baseline.

- Scalar encoder: one bucket per integer step, ``width`` contiguous active bits.
- Column pool: potential synapses per column with permanences in [0, 1].
- Monte-Carlo pooling: in every run each potential synapse is connected with
  probability equal to its permanence; columns whose overlap with the active
  input bits reaches ``minimum_overlap`` compete under global inhibition.
  Activity is aggregated over ``mc_runs`` runs.
- Prediction: the stored column SDR with the largest dot-product overlap
  points at the exemplar that followed it; that exemplar is the forecast.

There is no temporal memory (cell/segment) layer.
"""

import logging
from dataclasses import dataclass
from typing import List, Optional, Sequence

import numpy as np

from .config import HtmParams
from .datasets import QuantizedDataset
from .exceptions import DeviantLearningError
from .metrics import mapca_records

logger = logging.getLogger(__name__)

PERMANENCE_SPREAD = 0.1
MC_BATCH_SIZE = 50


# =============================================================================
# ENCODER
# =============================================================================

@dataclass(frozen=True)
class ScalarEncoderSpec:
    min_value: int
    max_value: int
    width: int

    def __post_init__(self):
        if self.width < 1:
            raise DeviantLearningError(f"encoder width must be >= 1, got {self.width}")
        if self.max_value < self.min_value:
            raise DeviantLearningError(
                f"encoder range is empty: min {self.min_value} > max {self.max_value}"
            )

    @property
    def n_bits(self) -> int:
        return (self.max_value - self.min_value) + self.width


def encode_scalar(value: float, spec: ScalarEncoderSpec) -> np.ndarray:
    """Contiguous block of ``width`` active bits starting at the value's bucket."""
    if not spec.min_value <= value <= spec.max_value:
        raise DeviantLearningError(
            f"value {value} outside encodable range [{spec.min_value}, {spec.max_value}]"
        )
    start = int(round(value - spec.min_value))
    bits = np.zeros(spec.n_bits, dtype=np.uint8)
    bits[start:start + spec.width] = 1
    return bits


def decode_scalar(bits: np.ndarray, spec: ScalarEncoderSpec) -> int:
    active = np.flatnonzero(bits)
    if active.size == 0:
        raise DeviantLearningError("cannot decode an encoding with no active bits")
    return int(active[0]) + spec.min_value


def encoder_specs(rows: np.ndarray, width: int) -> List[ScalarEncoderSpec]:
    """One encoder per feature column covering the column's observed range."""
    return [
        ScalarEncoderSpec(min_value=int(column.min()), max_value=int(column.max()), width=width)
        for column in np.asarray(rows).T
    ]


def encode_exemplar(exemplar: Sequence[int], specs: Sequence[ScalarEncoderSpec]) -> np.ndarray:
    if len(exemplar) != len(specs):
        raise DeviantLearningError(
            f"length mismatch: exemplar has {len(exemplar)} features, {len(specs)} encoders"
        )
    return np.concatenate([encode_scalar(value, spec) for value, spec in zip(exemplar, specs)])


def decode_exemplar(bits: np.ndarray, specs: Sequence[ScalarEncoderSpec]) -> np.ndarray:
    values = []
    offset = 0
    for spec in specs:
        values.append(decode_scalar(bits[offset:offset + spec.n_bits], spec))
        offset += spec.n_bits
    return np.asarray(values, dtype=np.int64)


# =============================================================================
# COLUMN POOL
# =============================================================================

@dataclass(frozen=True, eq=False)
class ColumnPool:
    """Columns x input bits; permanences are 0 wherever no potential synapse exists."""
    potential: np.ndarray
    permanences: np.ndarray
    connected_permanence: float = 0.5

    @classmethod
    def create(cls, input_size: int, params: HtmParams, rng: np.random.Generator) -> 'ColumnPool':
        shape = (params.n_columns, input_size)
        potential = rng.random(shape) < params.potential_pct
        permanences = params.initial_permanence + rng.uniform(-PERMANENCE_SPREAD, PERMANENCE_SPREAD, shape)
        permanences = np.clip(permanences, 0.0, 1.0)
        permanences[~potential] = 0.0
        return cls(potential=potential, permanences=permanences,
                   connected_permanence=params.connected_permanence)

    @property
    def n_columns(self) -> int:
        return int(self.permanences.shape[0])

    @property
    def input_size(self) -> int:
        return int(self.permanences.shape[1])

    def connected(self) -> np.ndarray:
        return self.potential & (self.permanences >= self.connected_permanence)


def mc_spatial_pool(input_bits: np.ndarray, pool: ColumnPool, params: HtmParams,
                    rng: np.random.Generator) -> np.ndarray:
    """
    Active columns for one input, aggregated over Monte-Carlo runs.

    Each run keeps the top k = ``desired_local_activity`` columns among those
    with overlap >= ``minimum_overlap`` (ties go to the lower column index). A
    column is active when it won more than mc_runs * k / (k + 1) runs. Each run
    has at most k winners, so at most k columns pass that cutoff. Raising the
    minimum overlap never adds wins, so the active set only shrinks.
    Returns sorted column indices.
    """
    input_bits = np.asarray(input_bits).reshape(-1)
    if input_bits.size != pool.input_size:
        raise DeviantLearningError(
            f"dimension mismatch: input has {input_bits.size} bits, pool expects {pool.input_size}"
        )
    active_bits = np.flatnonzero(input_bits)
    if active_bits.size == 0:
        return np.zeros(0, dtype=np.int64)

    # Non-potential synapses have permanence 0 and never connect under the strict draw
    probabilities = pool.permanences[:, active_bits].astype(np.float32)
    k = min(params.desired_local_activity, pool.n_columns)
    wins = np.zeros(pool.n_columns, dtype=np.int64)
    remaining = params.mc_runs
    while remaining > 0:
        batch = min(MC_BATCH_SIZE, remaining)
        draws = rng.random((batch,) + probabilities.shape, dtype=np.float32)
        overlaps = (draws < probabilities).sum(axis=2)
        ranked = np.argsort(-overlaps, axis=1, kind='stable')[:, :k]
        top_overlaps = np.take_along_axis(overlaps, ranked, axis=1)
        np.add.at(wins, ranked[top_overlaps >= params.minimum_overlap], 1)
        remaining -= batch

    cutoff = params.mc_runs * k / (k + 1)
    return np.flatnonzero(wins > cutoff).astype(np.int64)


def learn(pool: ColumnPool, input_bits: np.ndarray, active_columns: Sequence[int],
          params: HtmParams) -> ColumnPool:
    """Hebbian update of the winning columns' potential synapses, clipped to [0, 1]."""
    active_columns = np.asarray(active_columns, dtype=np.int64)
    if active_columns.size == 0:
        return pool
    input_on = np.asarray(input_bits).reshape(-1).astype(bool)
    permanences = pool.permanences.copy()
    rows = permanences[active_columns]
    delta = np.where(input_on, params.permanence_increment, -params.permanence_decrement)
    rows = np.clip(rows + delta[np.newaxis, :], 0.0, 1.0)
    rows[~pool.potential[active_columns]] = 0.0
    permanences[active_columns] = rows
    return ColumnPool(potential=pool.potential, permanences=permanences,
                      connected_permanence=pool.connected_permanence)


# =============================================================================
# PREDICTION
# =============================================================================

@dataclass(frozen=True, eq=False)
class HtmRecord:
    timestep: int
    input: np.ndarray
    actual: np.ndarray
    predicted: np.ndarray
    active_columns: np.ndarray
    # Step whose stored SDR was matched; None when the current exemplar was repeated
    matched_step: Optional[int] = None


@dataclass(frozen=True, eq=False)
class HtmRunResult:
    records: List[HtmRecord]
    mapca: Optional[float]
    dataset: Optional[QuantizedDataset] = None


def htm_fit_predict(dataset: QuantizedDataset, params: HtmParams) -> HtmRunResult:
    """One-step-ahead prediction via the nearest stored column SDR."""
    rows = np.asarray(dataset.rows, dtype=np.int64)
    if rows.shape[0] == 0:
        raise DeviantLearningError("dataset is empty")

    rng = np.random.default_rng(params.seed)
    specs = encoder_specs(rows, params.encoder_width)
    input_size = sum(spec.n_bits for spec in specs)
    pool = ColumnPool.create(input_size, params, rng)
    logger.info(
        f"HTM run on {dataset.name}: {rows.shape[0]} exemplars, {input_size} input bits, "
        f"{params.n_columns} columns, {params.mc_runs} Monte-Carlo runs"
    )

    stored_sdrs: List[np.ndarray] = []
    records: List[HtmRecord] = []
    silent_steps = 0
    for t in range(rows.shape[0] - 1):
        bits = encode_exemplar(rows[t], specs)
        active = mc_spatial_pool(bits, pool, params, rng)
        if active.size == 0:
            silent_steps += 1
        pool = learn(pool, bits, active, params)
        sdr = np.zeros(params.n_columns, dtype=np.int64)
        sdr[active] = 1

        successor, matched_step = rows[t], None
        if stored_sdrs:
            overlaps = np.vstack(stored_sdrs) @ sdr
            best = int(np.argmax(overlaps))
            if overlaps[best] > 0:
                successor, matched_step = rows[best + 1], best
        predicted = decode_exemplar(encode_exemplar(successor, specs), specs)
        stored_sdrs.append(sdr)

        records.append(HtmRecord(
            timestep=t,
            input=rows[t],
            actual=rows[t + 1],
            predicted=predicted.astype(np.float64),
            active_columns=active,
            matched_step=matched_step,
        ))

    if silent_steps:
        logger.warning(f"{silent_steps} steps had no column above the Monte-Carlo win cutoff at minimum overlap {params.minimum_overlap}")
    score = mapca_records(records, dataset.spec, params.tolerance) if records else None
    if score is not None:
        logger.info(f"HTM MAPCA on {dataset.name}: {score:.2f}% over {len(records)} records")
    return HtmRunResult(records=records, mapca=score, dataset=dataset)
