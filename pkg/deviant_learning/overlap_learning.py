"""
Deviant Overlap and Learning
============================

The virtual overlap store, winner-integer selection by inhibition and the
permanence learning rule.

The standards are the consecutive integers 0 .. l_ext - 1, so changing the
learning extent only adds or removes a tail of the store: existing counts are
untouched. That prefix property is what lets the engine remember (raise
l_ext) and forget (lower l_ext) without any extra gating.
"""

import math
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Callable, Dict, Union

import numpy as np

from .exceptions import DeviantLearningError

if TYPE_CHECKING:
    from .config import DlaConfig

# Winner threshold sentinel: keep only the maximally responsible integers
AUTO = 'auto'


def softsign(x: float) -> float:
    return x / (1.0 + abs(x))


ACTIVATIONS: Dict[str, Callable[[float], float]] = {
    'tanh': math.tanh,
    'softsign': softsign,
}


def activation_sigma(x: float, name: str = 'tanh') -> float:
    """Bounded, odd, increasing squashing function used by the learning rule."""
    try:
        return float(ACTIVATIONS[name](float(x)))
    except KeyError:
        raise DeviantLearningError(f"unknown activation {name!r}; choose from {sorted(ACTIVATIONS)}")


def generate_standards(learning_extent: int) -> np.ndarray:
    """The generative standards list: 0, 1, ..., l_ext - 1."""
    if learning_extent < 1:
        raise DeviantLearningError(f"learning extent must be positive, got {learning_extent}")
    return np.arange(learning_extent, dtype=np.int64)


@dataclass(frozen=True, eq=False)
class OverlapStore:
    """Per-standard binary match counts accumulated over exemplars."""
    counts: np.ndarray
    exemplars_seen: int = 0

    @classmethod
    def empty(cls, learning_extent: int) -> 'OverlapStore':
        return cls(counts=np.zeros(learning_extent, dtype=np.int64), exemplars_seen=0)

    @property
    def learning_extent(self) -> int:
        return int(self.counts.size)

    def nonzero_standards(self) -> int:
        return int(np.count_nonzero(self.counts))


@dataclass(frozen=True, eq=False)
class WinnerSet:
    """Causal integers that survived inhibition, with their overlap counts."""
    integers: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=np.int64))
    source_counts: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=np.int64))
    threshold: int = 0

    def __len__(self) -> int:
        return int(self.integers.size)

    def is_empty(self) -> bool:
        return self.integers.size == 0


@dataclass(frozen=True)
class PermanenceState:
    rho1: float = 0.0
    rho_o: float = 0.0
    t_i: int = 0


def accumulate_overlap(store: OverlapStore, matches: np.ndarray) -> OverlapStore:
    """Superimpose one exemplar's binary match matrix into the store."""
    matches = np.asarray(matches)
    if matches.ndim != 2 or matches.shape[1] != store.counts.size:
        raise DeviantLearningError(
            f"dimension mismatch: match matrix has shape {matches.shape}, "
            f"store has {store.counts.size} standards"
        )
    column_sums = matches.sum(axis=0, dtype=np.int64)
    return OverlapStore(counts=store.counts + column_sums, exemplars_seen=store.exemplars_seen + 1)


def max_overlap(store: OverlapStore) -> int:
    if store.counts.size == 0:
        return 0
    return int(store.counts.max())


def select_winners(store: OverlapStore, standards: np.ndarray,
                   t_h1: Union[int, str] = AUTO) -> WinnerSet:
    """
    Inhibition: keep the standards whose count reaches the threshold.

    With AUTO the threshold is the current maximum count, so only the argmax
    set survives. A store that has never matched yields an empty set.
    """
    standards = np.asarray(standards, dtype=np.int64)
    if standards.size != store.counts.size:
        raise DeviantLearningError(
            f"dimension mismatch: {standards.size} standards, store has {store.counts.size} counts"
        )
    peak = max_overlap(store)
    if t_h1 == AUTO:
        threshold = peak
    else:
        threshold = int(t_h1)
        if threshold < 1:
            raise DeviantLearningError(f"winner threshold must be >= 1 or {AUTO!r}, got {t_h1}")
    if peak == 0:
        return WinnerSet(threshold=threshold)
    mask = store.counts >= threshold
    return WinnerSet(integers=standards[mask], source_counts=store.counts[mask], threshold=threshold)


def update_permanence(state: PermanenceState, s_o_max: int, config: 'DlaConfig',
                      rng: np.random.Generator) -> PermanenceState:
    """
    Hebbian-style permanence growth gated by time and store saturation.

    While t_i < t_lim and s_o_max <= T_h2, rho1 grows by sigma(s_o_max) plus
    uniform noise on [0, noise_scale], once per Monte-Carlo pass. Otherwise
    rho1 is left as it is. The time counter always advances.
    """
    rho1 = state.rho1
    rho_o = 0.0
    gate_open = (
        not config.freeze_learning
        and state.t_i < config.time_limit
        and s_o_max <= config.store_threshold
    )
    if gate_open:
        increment = activation_sigma(s_o_max, config.activation)
        for _ in range(config.mc_passes):
            noise = float(rng.uniform(0.0, config.noise_scale)) if config.noise_scale > 0 else 0.0
            rho_o = increment + noise
            rho1 += rho_o
    return PermanenceState(rho1=rho1, rho_o=rho_o, t_i=state.t_i + 1)


def extend_store(store: OverlapStore, learning_extent: int) -> OverlapStore:
    """Grow the learning extent; new standards start with zero overlap."""
    if learning_extent < store.counts.size:
        raise DeviantLearningError(
            f"cannot extend a store of {store.counts.size} standards to {learning_extent}"
        )
    counts = np.zeros(learning_extent, dtype=np.int64)
    counts[:store.counts.size] = store.counts
    return OverlapStore(counts=counts, exemplars_seen=store.exemplars_seen)


def truncate_store(store: OverlapStore, learning_extent: int) -> OverlapStore:
    """Shrink the learning extent, forgetting every standard past the new limit."""
    if not 1 <= learning_extent <= store.counts.size:
        raise DeviantLearningError(
            f"cannot truncate a store of {store.counts.size} standards to {learning_extent}"
        )
    return OverlapStore(counts=store.counts[:learning_extent].copy(), exemplars_seen=store.exemplars_seen)
