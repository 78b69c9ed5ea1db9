"""
Deviant Learning Engine
=======================

Runs the full per-exemplar loop over a quantized dataset:

    1st-order mismatch -> overlap store -> winners -> permanence update
    -> per-feature 2nd-order mismatch, rating, predictive interpolation
    -> memorise the prediction vector -> post-prediction extraction

Exemplar t is used to predict exemplar t + 1 (one-step-ahead), so a dataset
of n exemplars yields at most n - 1 prediction records.
"""

import logging
from dataclasses import dataclass, field, replace
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np

from .badc import extrapolate_all, memory_field_effect
from .config import DlaConfig
from .datasets import QuantizedDataset, drop_label, from_rows
from .exceptions import DeviantLearningError
from .inference_memory import MemoryStore, PostPredictionResult, extract_memory, memorize, predictive_interpolation
from .metrics import mapca_records
from .mismatch import (
    RatingState,
    as_input_vector,
    first_order_mismatch,
    mismatch_average,
    rating_update,
    second_order_mismatch,
)
from .overlap_learning import (
    OverlapStore,
    PermanenceState,
    WinnerSet,
    accumulate_overlap,
    extend_store,
    generate_standards,
    max_overlap,
    select_winners,
    truncate_store,
    update_permanence,
)

logger = logging.getLogger(__name__)

DEFAULT_EXTENTS = (50, 100, 150, 200, 250)


@dataclass(frozen=True, eq=False)
class PredictionRecord:
    timestep: int
    input: np.ndarray
    actual: np.ndarray
    # Per-feature interpolated prediction p_r_t
    predicted: np.ndarray
    # Per-feature selected winner integer p_r
    selected: np.ndarray
    post_match: PostPredictionResult
    k_r: float
    winner_count: int
    rho1: float


@dataclass(frozen=True, eq=False)
class TrainedState:
    standards: np.ndarray
    store: OverlapStore
    permanence: PermanenceState
    winners: WinnerSet
    memory: MemoryStore
    rating: RatingState
    rng: np.random.Generator
    timestep: int = 0


@dataclass(frozen=True, eq=False)
class RunSummary:
    records: List[PredictionRecord]
    state: TrainedState
    dataset: QuantizedDataset
    mapca: Optional[float]
    badc_forecast: Optional[np.ndarray] = None
    mfe_forecast: Optional[np.ndarray] = None


@dataclass(frozen=True, eq=False)
class ExtentSweepResult:
    extent: int
    matrix: np.ndarray
    records: List[PredictionRecord] = field(default_factory=list)
    state: Optional[TrainedState] = None


def init(config: DlaConfig, width: int) -> TrainedState:
    """Fresh state: standards 0..l_ext-1, rho1 = initial permanence, empty stores."""
    if width < 1:
        raise DeviantLearningError(f"exemplars need at least one feature, got width {width}")
    standards = generate_standards(config.learning_extent)
    return TrainedState(
        standards=standards,
        store=OverlapStore.empty(config.learning_extent),
        permanence=PermanenceState(rho1=config.initial_permanence),
        winners=WinnerSet(),
        memory=MemoryStore.empty(width),
        rating=RatingState(),
        rng=np.random.default_rng(config.seed),
    )


def step(state: TrainedState, exemplar: Sequence[int], next_exemplar: Optional[Sequence[int]],
         config: DlaConfig) -> Tuple[TrainedState, Optional[PredictionRecord]]:
    """Process one exemplar; returns the new state and a record when a prediction was made."""
    current = as_input_vector(exemplar)
    if current.size != state.memory.width:
        raise DeviantLearningError(
            f"length mismatch: exemplar has {current.size} features, engine expects {state.memory.width}"
        )

    matches = first_order_mismatch(current, state.standards, state.permanence.rho1)
    store = accumulate_overlap(state.store, matches)
    winners = select_winners(store, state.standards, config.winner_threshold)
    permanence = update_permanence(state.permanence, max_overlap(store), config, state.rng)
    state = replace(state, store=store, winners=winners, permanence=permanence, timestep=state.timestep + 1)

    if next_exemplar is None:
        return state, None
    if winners.is_empty():
        logger.warning(f"Step {state.timestep - 1}: no winners learned, skipping prediction")
        return state, None

    following = as_input_vector(next_exemplar)
    if following.size != current.size:
        raise DeviantLearningError(
            f"length mismatch: next exemplar has {following.size} features, expected {current.size}"
        )

    rating = state.rating
    selected = np.zeros(current.size, dtype=np.int64)
    predicted = np.zeros(current.size, dtype=np.float64)
    for feature, element in enumerate(following):
        k2 = second_order_mismatch(int(element), winners.integers)
        rating = rating_update(rating, mismatch_average(k2))
        prediction = predictive_interpolation(winners, k2, int(element))
        selected[feature] = prediction.p_r
        predicted[feature] = prediction.p_r_t

    memory = memorize(state.memory, selected)
    post_match = extract_memory(memory, current, config.rho2, config.rho2_lim, config.th3_rounding)
    state = replace(state, rating=rating, memory=memory)

    logger.debug(
        f"Step {state.timestep - 1}: winners={len(winners)} rho1={permanence.rho1:.4f} "
        f"k_r={rating.k_r:.4f} matched_rows={len(post_match.matched_rows)}"
    )
    record = PredictionRecord(
        timestep=state.timestep - 1,
        input=current,
        actual=following,
        predicted=predicted,
        selected=selected,
        post_match=post_match,
        k_r=rating.k_r,
        winner_count=len(winners),
        rho1=permanence.rho1,
    )
    return state, record


def prepare_dataset(dataset: Union[QuantizedDataset, Sequence[Sequence[int]]],
                    config: DlaConfig) -> QuantizedDataset:
    """Apply the class-column switch and the optional seeded shuffle."""
    if not isinstance(dataset, QuantizedDataset):
        dataset = from_rows('stream', dataset)
    if len(dataset) == 0:
        raise DeviantLearningError("dataset is empty")
    if not config.include_label:
        dataset = drop_label(dataset)
    if config.shuffle:
        order = np.random.default_rng(config.seed).permutation(len(dataset))
        dataset = replace(dataset, rows=dataset.rows[order])
    return dataset


class DlaEngine:
    """
    Stateful wrapper around init/step.

    Owns one TrainedState for a fixed feature width. The learning extent of a
    trained engine can be raised (remember) or lowered (forget) in place.
    """

    def __init__(self, config: DlaConfig, width: int):
        self.config = config
        self.state = init(config, width)
        self.logger = logging.getLogger(f"{__name__}.DlaEngine")

    def step(self, exemplar: Sequence[int], next_exemplar: Optional[Sequence[int]] = None) -> Optional[PredictionRecord]:
        self.state, record = step(self.state, exemplar, next_exemplar, self.config)
        return record

    def fit_predict(self, rows: np.ndarray) -> List[PredictionRecord]:
        records: List[PredictionRecord] = []
        skipped = 0
        for index in range(len(rows)):
            following = rows[index + 1] if index + 1 < len(rows) else None
            record = self.step(rows[index], following)
            if record is not None:
                records.append(record)
            elif following is not None:
                skipped += 1
        if skipped:
            self.logger.warning(f"{skipped} of {len(rows) - 1} steps produced no prediction")
        return records

    def set_learning_extent(self, learning_extent: int) -> None:
        """Remember (grow) or forget (shrink) standards without touching the kept counts."""
        current = self.state.store.learning_extent
        if learning_extent >= current:
            store = extend_store(self.state.store, learning_extent)
        else:
            store = truncate_store(self.state.store, learning_extent)
        standards = generate_standards(learning_extent)
        self.config = self.config.with_extent(learning_extent)
        self.state = replace(
            self.state,
            standards=standards,
            store=store,
            winners=select_winners(store, standards, self.config.winner_threshold),
        )
        self.logger.info(f"Learning extent {current} -> {learning_extent}")

    def forecast(self) -> Optional[np.ndarray]:
        """BADC extrapolation of the step after the last memorised prediction."""
        if len(self.state.memory) == 0:
            return None
        return extrapolate_all(self.state.memory)


def fit_predict(dataset: Union[QuantizedDataset, Sequence[Sequence[int]]],
                config: DlaConfig) -> List[PredictionRecord]:
    """One-step-ahead predictions over the dataset in order."""
    return run(dataset, config).records


def run(dataset: Union[QuantizedDataset, Sequence[Sequence[int]]], config: DlaConfig) -> RunSummary:
    """fit_predict plus the scored summary and the BADC / memory-field forecasts."""
    dataset = prepare_dataset(dataset, config)
    engine = DlaEngine(config, dataset.n_features)
    logger.info(
        f"DLA run on {dataset.name}: {len(dataset)} exemplars x {dataset.n_features} features, "
        f"l_ext={config.learning_extent}"
    )
    records = engine.fit_predict(dataset.rows)

    score = mapca_records(records, dataset.spec, config.tolerance) if records else None
    badc_forecast = engine.forecast()
    mfe_forecast = None
    if badc_forecast is not None and records:
        last_match = records[-1].post_match
        mfe_forecast = np.array(
            [memory_field_effect(value, last_match, column) for column, value in enumerate(badc_forecast)],
            dtype=np.float64,
        )
    if score is not None:
        logger.info(f"DLA MAPCA on {dataset.name}: {score:.2f}% over {len(records)} records")
    return RunSummary(
        records=records,
        state=engine.state,
        dataset=dataset,
        mapca=score,
        badc_forecast=badc_forecast,
        mfe_forecast=mfe_forecast,
    )


def prediction_matrix(records: Sequence[PredictionRecord], width: int) -> np.ndarray:
    if not records:
        return np.zeros((0, width), dtype=np.float64)
    return np.vstack([record.predicted for record in records])


def sweep_learning_extent(dataset: Union[QuantizedDataset, Sequence[Sequence[int]]], base_config: DlaConfig,
                          extents: Sequence[int] = DEFAULT_EXTENTS) -> List[ExtentSweepResult]:
    """Re-run the engine at each learning extent with everything else held fixed."""
    extents = list(extents)
    if not extents:
        raise DeviantLearningError("extent list is empty")
    if any(extent < 1 for extent in extents):
        raise DeviantLearningError(f"extents must be positive, got {extents}")

    results = []
    for extent in extents:
        summary = run(dataset, base_config.with_extent(extent))
        results.append(ExtentSweepResult(
            extent=extent,
            matrix=prediction_matrix(summary.records, summary.dataset.n_features),
            records=summary.records,
            state=summary.state,
        ))
        logger.info(
            f"Extent {extent}: {len(summary.records)} records, "
            f"{nonzero_standards(summary.state)} standards with overlap"
        )
    return results


def prediction_coverage(record: PredictionRecord) -> float:
    """Fraction of features whose actual next value was among the winners (selected exactly)."""
    return float(np.mean(record.selected == record.actual))


def coverage(records: Sequence[PredictionRecord]) -> float:
    """Coverage reached by the end of the run (the last record)."""
    if not records:
        return 0.0
    return prediction_coverage(records[-1])


def nonzero_standards(state: TrainedState) -> int:
    return state.store.nonzero_standards()
