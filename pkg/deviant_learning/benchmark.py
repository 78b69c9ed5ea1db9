"""
Benchmark Harness
=================

Experiment 1: MAPCA of the deviant learning engine and the HTM baseline per
dataset, written to ``experiment1.csv`` with one JSON manifest per run.

Experiment 2: learning-extent sweep of the engine, one headerless prediction
matrix per extent plus an index file and a manifest.

Every file is a pure function of the inputs and the effective configuration;
nothing time-dependent is written.
"""

import csv
import json
import logging
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
from django.conf import settings

from . import engine
from .config import DlaConfig, HtmParams, config_hash, effective_config_dict, load_configs
from .datasets import SCHEMAS, QuantizedDataset, load_csv, quantization_spec_for, quantize, resolve_schema
from .exceptions import DeviantLearningError
from .htm_baseline import htm_fit_predict
from .reporting import emit_report

logger = logging.getLogger(__name__)

ALGORITHMS = ('dla', 'htm')
EXPERIMENT1_HEADER = ('dataset', 'algorithm', 'mapca_percent', 'seed', 'config_hash')


@dataclass
class BenchmarkOptions:
    datasets: List[str]
    algo: str = 'both'
    config_path: Optional[Path] = None
    seed: Optional[int] = None
    extents: Sequence[int] = engine.DEFAULT_EXTENTS
    out_dir: Optional[Path] = None
    exclude_label: bool = False
    shuffle: bool = False

    @property
    def algorithms(self) -> Tuple[str, ...]:
        if self.algo == 'both':
            return ALGORITHMS
        if self.algo not in ALGORITHMS:
            raise DeviantLearningError(f"unknown algorithm {self.algo!r}")
        return (self.algo,)

    @property
    def output_dir(self) -> Path:
        return Path(self.out_dir) if self.out_dir else Path(settings.DLA_OUTPUT_DIR)

    def overrides(self) -> Dict[str, Any]:
        overrides: Dict[str, Any] = {'seed': self.seed}
        if self.exclude_label:
            overrides['include_label'] = False
        if self.shuffle:
            overrides['shuffle'] = True
        return overrides


@dataclass
class RunManifest:
    dataset: str
    algorithm: str
    config: Dict[str, Any]
    seed: int
    config_hash: str
    output_paths: List[str] = field(default_factory=list)
    mapca_percent: Optional[float] = None
    published_mapca: Optional[float] = None
    # None when there is no published figure to compare against
    within_band: Optional[bool] = None
    details: Dict[str, Any] = field(default_factory=dict)

    def write(self, path: Path) -> None:
        path.write_text(json.dumps(asdict(self), indent=2, sort_keys=True, default=str) + '\n', encoding='utf-8')


@dataclass
class ExperimentResult:
    output_dir: Path
    files: List[Path] = field(default_factory=list)
    manifests: List[RunManifest] = field(default_factory=list)
    reports: List[str] = field(default_factory=list)
    comparison: str = ''


# =============================================================================
# DATASETS
# =============================================================================

def resolve_dataset(name_or_path: str) -> Tuple[str, Path]:
    """Built-in names resolve inside DLA_DATA_DIR; anything else is a file path."""
    if name_or_path in SCHEMAS:
        return name_or_path, Path(settings.DLA_DATA_DIR) / f"{name_or_path}.csv"
    path = Path(name_or_path)
    return resolve_schema(path).name, path


def load_dataset(name_or_path: str, dla_config: DlaConfig) -> QuantizedDataset:
    _, path = resolve_dataset(name_or_path)
    raw = load_csv(path, resolve_schema(name_or_path))
    spec = quantization_spec_for(raw, dla_config.quantization, dla_config.quantization_scale,
                                 dla_config.learning_extent)
    return quantize(raw, spec)


def resolve_configs(name_or_path: str, options: BenchmarkOptions) -> Tuple[DlaConfig, HtmParams]:
    name, _ = resolve_dataset(name_or_path)
    return load_configs(options.config_path, dataset_name=name, overrides=options.overrides())


def _round(value: Optional[float]) -> Optional[float]:
    return None if value is None else round(value, 2)


# =============================================================================
# EXPERIMENT 1
# =============================================================================

def run_experiment1(options: BenchmarkOptions) -> ExperimentResult:
    """MAPCA per (dataset, algorithm) into experiment1.csv plus manifests."""
    output_dir = options.output_dir
    output_dir.mkdir(parents=True, exist_ok=True)
    result = ExperimentResult(output_dir=output_dir)
    rows = []

    for name_or_path in options.datasets:
        dla_config, htm_params = resolve_configs(name_or_path, options)
        dataset = load_dataset(name_or_path, dla_config)
        digest = config_hash(dla_config, htm_params)

        for algorithm in options.algorithms:
            if algorithm == 'dla':
                summary = engine.run(dataset, dla_config)
                score = summary.mapca
                details = {
                    'records': len(summary.records),
                    'final_k_r': summary.records[-1].k_r if summary.records else None,
                    'final_winner_count': summary.records[-1].winner_count if summary.records else None,
                    'memory_rows': len(summary.state.memory),
                    'badc_forecast': None if summary.badc_forecast is None else summary.badc_forecast.tolist(),
                    'mfe_forecast': None if summary.mfe_forecast is None else summary.mfe_forecast.tolist(),
                }
                if summary.records:
                    result.reports.append(
                        f"[{dataset.name}] " + emit_report(
                            summary.records, summary.state, summary.dataset.spec, dla_config.tolerance
                        )
                    )
            else:
                prepared = engine.prepare_dataset(dataset, dla_config)
                htm_result = htm_fit_predict(prepared, htm_params)
                score = htm_result.mapca
                details = {'records': len(htm_result.records)}

            if score is None:
                raise DeviantLearningError(f"{algorithm} produced no predictions on {dataset.name}")

            rows.append((dataset.name, algorithm, f"{score:.2f}", dla_config.seed, digest))
            published = settings.DLA_PUBLISHED_MAPCA.get(algorithm, {}).get(dataset.name)
            within_band = within_published_band(score, published)
            if within_band is False:
                logger.warning(
                    f"{algorithm} MAPCA on {dataset.name} is {score:.2f}%, more than "
                    f"{settings.DLA_PUBLISHED_BAND:g} points from the published {published:.2f}%"
                )
            manifest_path = output_dir / f"manifest_{dataset.name}_{algorithm}.json"
            manifest = RunManifest(
                dataset=dataset.name,
                algorithm=algorithm,
                config=effective_config_dict(dla_config, htm_params),
                seed=dla_config.seed,
                config_hash=digest,
                output_paths=['experiment1.csv', manifest_path.name],
                mapca_percent=_round(score),
                published_mapca=published,
                within_band=within_band,
                details=details,
            )
            manifest.write(manifest_path)
            result.manifests.append(manifest)
            result.files.append(manifest_path)

    table_path = output_dir / 'experiment1.csv'
    with table_path.open('w', newline='', encoding='utf-8') as handle:
        writer = csv.writer(handle, lineterminator='\n')
        writer.writerow(EXPERIMENT1_HEADER)
        writer.writerows(rows)
    result.files.insert(0, table_path)
    result.comparison = comparison_table(result.manifests)
    logger.info(f"Experiment 1 wrote {len(rows)} rows to {table_path}")
    return result


def within_published_band(measured: float, published: Optional[float]) -> Optional[bool]:
    if published is None:
        return None
    return abs(measured - published) <= settings.DLA_PUBLISHED_BAND


def comparison_table(manifests: Sequence[RunManifest]) -> str:
    """Measured MAPCA next to the published figure, flagging runs outside the band."""
    band = f"outside ±{settings.DLA_PUBLISHED_BAND:g}"
    lines = [f"{'dataset':<10} {'algorithm':<10} {'measured':>9} {'published':>10}  band"]
    for manifest in manifests:
        published = '-' if manifest.published_mapca is None else f"{manifest.published_mapca:.2f}"
        flag = {None: '-', True: 'ok', False: band}[manifest.within_band]
        lines.append(
            f"{manifest.dataset:<10} {manifest.algorithm:<10} {manifest.mapca_percent:>9.2f} {published:>10}  {flag}"
        )
    return '\n'.join(lines)


# =============================================================================
# EXPERIMENT 2
# =============================================================================

def run_experiment2(options: BenchmarkOptions) -> ExperimentResult:
    """Learning-extent sweep: extent_<E>.csv matrices, an index and a manifest."""
    if len(options.datasets) != 1:
        raise DeviantLearningError("experiment 2 runs on exactly one dataset")
    extents = list(options.extents)
    if not extents or any(extent < 1 for extent in extents):
        raise DeviantLearningError(f"extents must be a non-empty list of positive integers, got {extents}")

    name_or_path = options.datasets[0]
    dla_config, htm_params = resolve_configs(name_or_path, options)
    # Quantization is fixed once, independent of the swept extent
    dataset = load_dataset(name_or_path, dla_config)

    output_dir = options.output_dir
    output_dir.mkdir(parents=True, exist_ok=True)
    result = ExperimentResult(output_dir=output_dir)

    sweep = engine.sweep_learning_extent(dataset, dla_config, extents)
    index_rows = []
    per_extent = {}
    for entry in sweep:
        matrix_path = output_dir / f"extent_{entry.extent}.csv"
        write_matrix(matrix_path, entry.matrix)
        index_rows.append((entry.extent, matrix_path.name))
        result.files.append(matrix_path)
        per_extent[str(entry.extent)] = {
            'rows': int(entry.matrix.shape[0]),
            'columns': int(entry.matrix.shape[1]),
            'coverage': engine.coverage(entry.records),
            'nonzero_standards': engine.nonzero_standards(entry.state),
            'final_winner_count': entry.records[-1].winner_count if entry.records else 0,
        }

    index_path = output_dir / 'experiment2_index.csv'
    with index_path.open('w', newline='', encoding='utf-8') as handle:
        writer = csv.writer(handle, lineterminator='\n')
        writer.writerow(('extent', 'file'))
        writer.writerows(index_rows)
    result.files.append(index_path)

    manifest_path = output_dir / f"manifest_{dataset.name}_dla_sweep.json"
    manifest = RunManifest(
        dataset=dataset.name,
        algorithm='dla',
        config=effective_config_dict(dla_config, htm_params),
        seed=dla_config.seed,
        config_hash=config_hash(dla_config, htm_params),
        output_paths=[path.name for path in result.files] + [manifest_path.name],
        details={'extents': extents, 'per_extent': per_extent},
    )
    manifest.write(manifest_path)
    result.manifests.append(manifest)
    result.files.append(manifest_path)
    logger.info(f"Experiment 2 wrote {len(sweep)} matrices to {output_dir}")
    return result


def write_matrix(path: Union[str, Path], matrix: np.ndarray) -> None:
    """Headerless comma-delimited grid."""
    with Path(path).open('w', newline='', encoding='utf-8') as handle:
        np.savetxt(handle, np.asarray(matrix, dtype=np.float64), fmt='%g', delimiter=',')


def parse_extents(text: str) -> List[int]:
    try:
        extents = [int(part) for part in text.split(',') if part.strip()]
    except ValueError:
        raise DeviantLearningError(f"extents must be comma-separated integers, got {text!r}")
    if not extents or any(extent < 1 for extent in extents):
        raise DeviantLearningError(f"extents must be positive integers, got {text!r}")
    return extents
