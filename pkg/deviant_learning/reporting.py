"""Human-readable run summaries."""

from typing import Optional, Sequence

from .badc import extrapolate_all
from .datasets import QuantizationSpec
from .exceptions import DeviantLearningError
from .metrics import mapca_records


def emit_report(records: Sequence, state=None, spec: Optional[QuantizationSpec] = None,
                tolerance: float = 0.05) -> str:
    """
    Summarise a DLA run.

    Args:
        records: PredictionRecords of the run, in order
        state: final TrainedState; adds memory size and the BADC forecast
        spec: quantization used for the run (identity scale when omitted)
        tolerance: MAPCA tolerance in original units

    Returns:
        One summary line, plus a forecast line when a state is given
    """
    if not records:
        raise DeviantLearningError("no prediction records to report")
    if spec is None:
        spec = QuantizationSpec.fixed(len(records[0].actual), 1.0)

    score = mapca_records(records, spec, tolerance)
    memory_rows = len(state.memory) if state is not None else len(records)
    lines = [
        f"MAPCA {score:.2f}% over {len(records)} records | "
        f"k_r {records[0].k_r:.4f} -> {records[-1].k_r:.4f} | "
        f"winners {records[-1].winner_count} | memory rows {memory_rows}"
    ]
    if state is not None and len(state.memory):
        forecast = ', '.join(f"{value:.2f}" for value in extrapolate_all(state.memory))
        lines.append(f"BADC forecast [{forecast}]")
    return '\n'.join(lines)
