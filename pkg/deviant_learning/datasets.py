"""
Benchmark Datasets
==================

CSV ingestion and quantization of the benchmark files into the non-negative
integer inputs the deviant learning engine works on.

Built-in schemas
----------------
iris     150 x 5   four measurements (cm) + class name, no header
heart    270 x 14  Statlog variant, or 303 x 14 Cleveland variant ("?" cells
                   imputed with the column mean); last column is the label
wordsim  353 x 2   "Word 1,Word 2,Human (mean)" with header; the words are
                   dropped and replaced by the pair index
"""

import csv
import logging
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from .exceptions import DatasetError

logger = logging.getLogger(__name__)

MISSING_MARKERS = {'?', ''}


@dataclass(frozen=True)
class DatasetSchema:
    name: str
    delimiter: str = ','
    has_header: bool = False
    label_column: Optional[int] = None
    categorical_label: bool = False
    # Source columns removed before parsing (e.g. words in the similarity file)
    drop_columns: Tuple[int, ...] = ()
    # Prepend the 0-based row index as the first feature
    add_row_index: bool = False
    # Accepted (rows, columns) shapes after dropping/adding columns; empty = any
    expected_shapes: Tuple[Tuple[int, int], ...] = ()
    # 'error' rejects missing cells, 'column_mean' imputes them
    missing: str = 'error'
    # Per-column scale overrides for fixed quantization: ((column, scale), ...)
    fixed_scales: Tuple[Tuple[int, float], ...] = ()


SCHEMAS: Dict[str, DatasetSchema] = {
    'iris': DatasetSchema(
        name='iris',
        label_column=4,
        categorical_label=True,
        expected_shapes=((150, 5),),
    ),
    'heart': DatasetSchema(
        name='heart',
        label_column=13,
        expected_shapes=((270, 14), (303, 14)),
        missing='column_mean',
    ),
    'wordsim': DatasetSchema(
        name='wordsim',
        has_header=True,
        drop_columns=(0, 1),
        add_row_index=True,
        expected_shapes=((353, 2),),
        fixed_scales=((0, 1.0),),
    ),
}


@dataclass(frozen=True, eq=False)
class RawDataset:
    name: str
    rows: np.ndarray
    column_names: Tuple[str, ...]
    schema: DatasetSchema
    label_column: Optional[int] = None
    label_codes: Dict[str, int] = field(default_factory=dict)

    @property
    def n_rows(self) -> int:
        return int(self.rows.shape[0])

    @property
    def n_columns(self) -> int:
        return int(self.rows.shape[1])

    @property
    def column_min(self) -> np.ndarray:
        return self.rows.min(axis=0)

    @property
    def column_max(self) -> np.ndarray:
        return self.rows.max(axis=0)


@dataclass(frozen=True)
class QuantizationSpec:
    """Per-feature affine map value -> round((value - offset) * scale)."""
    scales: Tuple[float, ...]
    offsets: Tuple[float, ...]

    def __post_init__(self):
        if len(self.scales) != len(self.offsets):
            raise DatasetError("quantization spec needs one scale and one offset per feature")
        if any(scale <= 0 for scale in self.scales):
            raise DatasetError(f"quantization scales must be > 0, got {self.scales}")

    @property
    def width(self) -> int:
        return len(self.scales)

    @classmethod
    def fixed(cls, width: int, scale: float,
              overrides: Sequence[Tuple[int, float]] = ()) -> 'QuantizationSpec':
        scales = [float(scale)] * width
        for column, column_scale in overrides:
            if column < width:
                scales[column] = float(column_scale)
        return cls(scales=tuple(scales), offsets=(0.0,) * width)

    @classmethod
    def min_max(cls, raw: RawDataset, learning_extent: int) -> 'QuantizationSpec':
        """Map each column's [min, max] onto [0, l_ext - 1]."""
        lows = raw.column_min
        spans = raw.column_max - lows
        top = max(learning_extent - 1, 1)
        scales = tuple(float(top / span) if span > 0 else 1.0 for span in spans)
        return cls(scales=scales, offsets=tuple(float(low) for low in lows))

    def drop(self, column: int) -> 'QuantizationSpec':
        return QuantizationSpec(
            scales=self.scales[:column] + self.scales[column + 1:],
            offsets=self.offsets[:column] + self.offsets[column + 1:],
        )


@dataclass(frozen=True, eq=False)
class QuantizedDataset:
    name: str
    rows: np.ndarray
    spec: QuantizationSpec
    column_names: Tuple[str, ...] = ()
    label_column: Optional[int] = None

    def __len__(self) -> int:
        return int(self.rows.shape[0])

    @property
    def n_features(self) -> int:
        return int(self.rows.shape[1])


def resolve_schema(name_or_path: Union[str, Path]) -> DatasetSchema:
    """Built-in schema by name (or by file stem); otherwise a plain numeric schema."""
    key = str(name_or_path)
    if key in SCHEMAS:
        return SCHEMAS[key]
    stem = Path(key).stem.lower()
    if stem in SCHEMAS:
        return SCHEMAS[stem]
    return DatasetSchema(name=stem)


def _column_label(index: int, header: Optional[List[str]]) -> str:
    if header and index < len(header):
        return f"{index} ({header[index].strip()!r})"
    return str(index)


def load_csv(path: Union[str, Path], schema: DatasetSchema) -> RawDataset:
    """Read a benchmark file into a rectangular float matrix with column stats."""
    path = Path(path)
    if not path.is_file():
        raise DatasetError("dataset file not found", path=path)

    with path.open(newline='', encoding='utf-8') as handle:
        lines = [
            (line_number, cells)
            for line_number, cells in enumerate(csv.reader(handle, delimiter=schema.delimiter), start=1)
            if any(cell.strip() for cell in cells)
        ]

    header: Optional[List[str]] = None
    if schema.has_header and lines:
        header = lines[0][1]
        lines = lines[1:]
    if not lines:
        raise DatasetError("dataset is empty", path=path)

    width = len(lines[0][1])
    label_codes: Dict[str, int] = {}
    parsed: List[List[float]] = []
    missing_cells = 0
    for line_number, cells in lines:
        if len(cells) != width:
            raise DatasetError(
                f"ragged row: expected {width} cells, found {len(cells)}", path=path, row=line_number
            )
        values: List[float] = []
        for index, cell in enumerate(cells):
            if index in schema.drop_columns:
                continue
            text = cell.strip()
            if index == schema.label_column and schema.categorical_label:
                values.append(float(label_codes.setdefault(text, len(label_codes))))
                continue
            try:
                values.append(float(text))
            except ValueError:
                if text in MISSING_MARKERS and schema.missing == 'column_mean':
                    values.append(np.nan)
                    missing_cells += 1
                    continue
                raise DatasetError(
                    f"non-numeric cell {text!r}", path=path, row=line_number,
                    column=_column_label(index, header),
                )
        parsed.append(values)

    rows = np.asarray(parsed, dtype=np.float64)
    if missing_cells:
        empty_columns = np.flatnonzero(np.isnan(rows).all(axis=0))
        if empty_columns.size:
            kept = [index for index in range(width) if index not in schema.drop_columns]
            raise DatasetError(
                "column has no values to impute", path=path,
                column=_column_label(kept[int(empty_columns[0])], header),
            )
        column_means = np.nanmean(rows, axis=0)
        missing = np.isnan(rows)
        rows[missing] = np.take(column_means, np.nonzero(missing)[1])
        logger.warning(f"Imputed {missing_cells} missing cells with column means in {path.name}")

    names = [name.strip() for name in header] if header else [f"col{index}" for index in range(width)]
    names = [name for index, name in enumerate(names) if index not in schema.drop_columns]
    label_column = None
    if schema.label_column is not None:
        label_column = schema.label_column - sum(1 for dropped in schema.drop_columns if dropped < schema.label_column)
    if schema.add_row_index:
        rows = np.column_stack([np.arange(rows.shape[0], dtype=np.float64), rows])
        names = ['pair_index'] + names
        if label_column is not None:
            label_column += 1

    if schema.expected_shapes and tuple(rows.shape) not in schema.expected_shapes:
        raise DatasetError(
            f"unexpected shape {rows.shape[0]} x {rows.shape[1]} for {schema.name}, "
            f"expected one of {[f'{r} x {c}' for r, c in schema.expected_shapes]}",
            path=path,
        )

    logger.info(f"Loaded {schema.name}: {rows.shape[0]} rows x {rows.shape[1]} columns from {path}")
    return RawDataset(
        name=schema.name,
        rows=rows,
        column_names=tuple(names),
        schema=schema,
        label_column=label_column,
        label_codes=label_codes,
    )


def quantize(raw: RawDataset, spec: QuantizationSpec) -> QuantizedDataset:
    """value -> round((value - offset) * scale), clamped at 0."""
    if spec.width != raw.n_columns:
        raise DatasetError(
            f"quantization spec covers {spec.width} features, dataset has {raw.n_columns}"
        )
    scaled = np.rint((raw.rows - np.asarray(spec.offsets)) * np.asarray(spec.scales))
    clamped = int(np.count_nonzero(scaled < 0))
    if clamped:
        logger.warning(f"Clamped {clamped} negative quantized values to 0 in {raw.name}")
    rows = np.maximum(scaled, 0).astype(np.int64)
    return QuantizedDataset(
        name=raw.name,
        rows=rows,
        spec=spec,
        column_names=raw.column_names,
        label_column=raw.label_column,
    )


def quantization_spec_for(raw: RawDataset, mode: str, scale: float, learning_extent: int) -> QuantizationSpec:
    if mode == 'min_max':
        return QuantizationSpec.min_max(raw, learning_extent)
    return QuantizationSpec.fixed(raw.n_columns, scale, raw.schema.fixed_scales)


def dequantize(values: np.ndarray, spec: QuantizationSpec) -> np.ndarray:
    """Map quantized values (last axis = features) back to original units."""
    values = np.asarray(values, dtype=np.float64)
    return values / np.asarray(spec.scales) + np.asarray(spec.offsets)


def drop_label(dataset: QuantizedDataset) -> QuantizedDataset:
    """Remove the class column so only measured features are learned."""
    if dataset.label_column is None:
        return dataset
    column = dataset.label_column
    names = dataset.column_names[:column] + dataset.column_names[column + 1:]
    return replace(
        dataset,
        rows=np.delete(dataset.rows, column, axis=1),
        spec=dataset.spec.drop(column),
        column_names=names,
        label_column=None,
    )


def from_rows(name: str, rows: Sequence[Sequence[int]], scale: float = 1.0) -> QuantizedDataset:
    """Wrap already-quantized integer rows (synthetic streams, tests)."""
    matrix = np.asarray(rows, dtype=np.int64)
    if matrix.ndim == 1:
        matrix = matrix[:, np.newaxis]
    if matrix.size and matrix.min() < 0:
        raise DatasetError("quantized values must be non-negative")
    width = matrix.shape[1] if matrix.ndim == 2 else 0
    return QuantizedDataset(name=name, rows=matrix, spec=QuantizationSpec.fixed(width, scale))
