"""
Benchmark configuration
=======================

Effective configuration is layered as

    settings.DEVIANT_LEARNING defaults
      <- dataset preset (settings.DLA_DATASET_PRESETS)
      <- config file (``key = value`` lines)
      <- environment (``DLA_<KEY>``)
      <- explicit overrides (CLI flags)

and validated through Django forms so every problem is reported against the
field that caused it.
"""

import hashlib
import json
import logging
import os
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Any, Dict, Mapping, Optional, Tuple, Union

from django import forms
from django.conf import settings
from django.core.exceptions import ValidationError

from .overlap_learning import ACTIVATIONS, AUTO

logger = logging.getLogger(__name__)

TRUE_STRINGS = {'1', 'true', 'yes', 'on'}
FALSE_STRINGS = {'0', 'false', 'no', 'off'}


@dataclass(frozen=True)
class DlaConfig:
    """Thresholds and limits of the deviant learning engine."""
    learning_extent: int = 200
    time_limit: int = 70
    initial_permanence: float = 0.0
    store_threshold: int = 120
    tolerance: float = 0.05
    winner_threshold: Union[int, str] = AUTO
    rho2: float = 0.0
    rho2_lim: float = 1.0
    noise_scale: float = 0.01
    seed: int = 42
    mc_passes: int = 2
    activation: str = 'tanh'
    freeze_learning: bool = False
    th3_rounding: str = 'floor'
    quantization: str = 'fixed'
    quantization_scale: float = 10.0
    include_label: bool = True
    shuffle: bool = False

    def __post_init__(self):
        validate_dla_config(self)

    def with_extent(self, learning_extent: int) -> 'DlaConfig':
        return DlaConfig(**{**asdict(self), 'learning_extent': learning_extent})

    def replace(self, **changes) -> 'DlaConfig':
        return DlaConfig(**{**asdict(self), **changes})


@dataclass(frozen=True)
class HtmParams:
    """HTM baseline parameters plus encoder and pool geometry."""
    desired_local_activity: int = 3
    minimum_overlap: int = 90
    initial_permanence: float = 0.4
    mc_runs: int = 1000
    tolerance: float = 0.05
    n_columns: int = 128
    potential_pct: float = 0.85
    connected_permanence: float = 0.5
    permanence_increment: float = 0.05
    permanence_decrement: float = 0.02
    encoder_width: int = 64
    seed: int = 42

    def __post_init__(self):
        errors = {}
        if self.desired_local_activity < 1:
            errors['desired_local_activity'] = 'must be a positive integer'
        if self.minimum_overlap < 1:
            errors['minimum_overlap'] = 'must be a positive integer'
        if not 0.0 <= self.initial_permanence <= 1.0:
            errors['initial_permanence'] = 'must lie in [0, 1]'
        if self.mc_runs < 1:
            errors['mc_runs'] = 'must be a positive integer'
        if self.tolerance <= 0:
            errors['tolerance'] = 'must be greater than 0'
        if self.n_columns < 1:
            errors['n_columns'] = 'must be a positive integer'
        if not 0.0 < self.potential_pct <= 1.0:
            errors['potential_pct'] = 'must lie in (0, 1]'
        if not 0.0 <= self.connected_permanence <= 1.0:
            errors['connected_permanence'] = 'must lie in [0, 1]'
        if self.encoder_width < 1:
            errors['encoder_width'] = 'must be a positive integer'
        if errors:
            raise ValidationError(errors)

    def replace(self, **changes) -> 'HtmParams':
        return HtmParams(**{**asdict(self), **changes})


def validate_dla_config(config: DlaConfig) -> None:
    """Raise ValidationError naming every invalid DlaConfig field."""
    errors = {}
    if not isinstance(config.learning_extent, int) or config.learning_extent < 1:
        errors['learning_extent'] = 'must be a positive integer'
    if not isinstance(config.time_limit, int) or config.time_limit < 1:
        errors['time_limit'] = 'must be a positive integer'
    if config.initial_permanence < 0:
        errors['initial_permanence'] = 'must be >= 0'
    if not isinstance(config.store_threshold, int) or config.store_threshold < 1:
        errors['store_threshold'] = 'must be a positive integer'
    if config.tolerance <= 0:
        errors['tolerance'] = 'must be greater than 0'
    if config.winner_threshold != AUTO and (
            not isinstance(config.winner_threshold, int) or config.winner_threshold < 1):
        errors['winner_threshold'] = f'must be a positive integer or "{AUTO}"'
    if not 0.0 <= config.rho2_lim <= 1.0:
        errors['rho2_lim'] = 'must lie in [0, 1]'
    if not 0.0 <= config.rho2 <= config.rho2_lim:
        errors['rho2'] = 'must satisfy 0 <= rho2 <= rho2_lim'
    if config.noise_scale < 0:
        errors['noise_scale'] = 'must be >= 0'
    if not isinstance(config.seed, int) or config.seed < 0:
        errors['seed'] = 'must be a non-negative integer'
    if config.mc_passes < 1:
        errors['mc_passes'] = 'must be a positive integer'
    if config.activation not in ACTIVATIONS:
        errors['activation'] = f'must be one of {sorted(ACTIVATIONS)}'
    if config.th3_rounding not in ('floor', 'ceil'):
        errors['th3_rounding'] = 'must be "floor" or "ceil"'
    if config.quantization not in ('fixed', 'min_max'):
        errors['quantization'] = 'must be "fixed" or "min_max"'
    if config.quantization_scale <= 0:
        errors['quantization_scale'] = 'must be greater than 0'
    if errors:
        raise ValidationError(errors)


# =============================================================================
# FORMS
# =============================================================================

class DlaConfigForm(forms.Form):
    """Parses textual DLA configuration values (config file / environment)."""
    learning_extent = forms.IntegerField(min_value=1)
    time_limit = forms.IntegerField(min_value=1)
    initial_permanence = forms.FloatField(min_value=0.0)
    store_threshold = forms.IntegerField(min_value=1)
    tolerance = forms.FloatField()
    winner_threshold = forms.CharField()
    rho2 = forms.FloatField(min_value=0.0)
    rho2_lim = forms.FloatField(min_value=0.0, max_value=1.0)
    noise_scale = forms.FloatField(min_value=0.0)
    seed = forms.IntegerField(min_value=0)
    mc_passes = forms.IntegerField(min_value=1)
    activation = forms.ChoiceField(choices=[(name, name) for name in sorted(ACTIVATIONS)])
    freeze_learning = forms.BooleanField(required=False)
    th3_rounding = forms.ChoiceField(choices=[('floor', 'floor'), ('ceil', 'ceil')])
    quantization = forms.ChoiceField(choices=[('fixed', 'fixed'), ('min_max', 'min_max')])
    quantization_scale = forms.FloatField()
    include_label = forms.BooleanField(required=False)
    shuffle = forms.BooleanField(required=False)

    def clean_tolerance(self):
        value = self.cleaned_data['tolerance']
        if value <= 0:
            raise ValidationError('must be greater than 0')
        return value

    def clean_quantization_scale(self):
        value = self.cleaned_data['quantization_scale']
        if value <= 0:
            raise ValidationError('must be greater than 0')
        return value

    def clean_winner_threshold(self):
        value = str(self.cleaned_data['winner_threshold']).strip().lower()
        if value == AUTO:
            return AUTO
        try:
            threshold = int(value)
        except ValueError:
            raise ValidationError(f'must be a positive integer or "{AUTO}"')
        if threshold < 1:
            raise ValidationError(f'must be a positive integer or "{AUTO}"')
        return threshold

    def clean(self):
        cleaned = super().clean()
        rho2 = cleaned.get('rho2')
        rho2_lim = cleaned.get('rho2_lim')
        if rho2 is not None and rho2_lim is not None and rho2 > rho2_lim:
            self.add_error('rho2', 'must satisfy 0 <= rho2 <= rho2_lim')
        return cleaned


class HtmParamsForm(forms.Form):
    """Parses textual HTM baseline values; keys carry the ``htm_`` prefix."""
    htm_desired_local_activity = forms.IntegerField(min_value=1)
    htm_minimum_overlap = forms.IntegerField(min_value=1)
    htm_initial_permanence = forms.FloatField(min_value=0.0, max_value=1.0)
    htm_mc_runs = forms.IntegerField(min_value=1)
    htm_tolerance = forms.FloatField(min_value=0.0)
    htm_n_columns = forms.IntegerField(min_value=1)
    htm_potential_pct = forms.FloatField(min_value=0.0, max_value=1.0)
    htm_connected_permanence = forms.FloatField(min_value=0.0, max_value=1.0)
    htm_permanence_increment = forms.FloatField(min_value=0.0)
    htm_permanence_decrement = forms.FloatField(min_value=0.0)
    htm_encoder_width = forms.IntegerField(min_value=1)

    def clean_htm_tolerance(self):
        value = self.cleaned_data['htm_tolerance']
        if value <= 0:
            raise ValidationError('must be greater than 0')
        return value

    def clean_htm_potential_pct(self):
        value = self.cleaned_data['htm_potential_pct']
        if value <= 0:
            raise ValidationError('must be greater than 0')
        return value


CONFIG_KEYS = tuple(DlaConfigForm.base_fields) + tuple(HtmParamsForm.base_fields)


# =============================================================================
# LOADING
# =============================================================================

def parse_config_text(text: str, source: str = '<config>') -> Dict[str, str]:
    """Parse ``key = value`` lines; unknown or duplicate keys are errors."""
    values: Dict[str, str] = {}
    for line_number, raw_line in enumerate(text.splitlines(), start=1):
        line = raw_line.split('#', 1)[0].strip()
        if not line:
            continue
        if '=' not in line:
            raise ValidationError({
                f'line {line_number}': f'expected "key = value" in {source}, got {raw_line.strip()!r}'
            })
        key, value = (part.strip() for part in line.split('=', 1))
        key = key.lower()
        if key not in CONFIG_KEYS:
            raise ValidationError({key: f'unknown configuration key (line {line_number} of {source})'})
        if key in values:
            raise ValidationError({key: f'duplicate configuration key (line {line_number} of {source})'})
        values[key] = value
    return values


def read_config_file(path: Union[str, Path]) -> Dict[str, str]:
    path = Path(path)
    logger.debug(f"Reading configuration file {path}")
    return parse_config_text(path.read_text(encoding='utf-8'), source=str(path))


def environment_overrides(environ: Optional[Mapping[str, str]] = None) -> Dict[str, str]:
    """Collect ``DLA_<KEY>`` variables that mirror configuration keys."""
    environ = os.environ if environ is None else environ
    prefix = settings.DLA_ENV_PREFIX
    overrides = {}
    for key in CONFIG_KEYS:
        name = f"{prefix}{key.upper()}"
        if name in environ:
            overrides[key] = environ[name]
    if overrides:
        logger.info(f"Environment overrides: {sorted(overrides)}")
    return overrides


def _normalise_booleans(data: Dict[str, Any]) -> Dict[str, Any]:
    normalised = dict(data)
    for key in ('freeze_learning', 'include_label', 'shuffle'):
        value = normalised.get(key)
        if isinstance(value, str):
            lowered = value.strip().lower()
            if lowered in TRUE_STRINGS:
                normalised[key] = True
            elif lowered in FALSE_STRINGS:
                normalised[key] = False
            else:
                raise ValidationError({key: f'expected a boolean, got {value!r}'})
    return normalised


def _form_errors(form: forms.Form) -> Dict[str, list]:
    return {field: list(messages) for field, messages in form.errors.items()}


def build_configs(data: Mapping[str, Any]) -> Tuple[DlaConfig, HtmParams]:
    """Validate a merged key/value mapping into (DlaConfig, HtmParams)."""
    unknown = sorted(set(data) - set(CONFIG_KEYS))
    if unknown:
        raise ValidationError({key: 'unknown configuration key' for key in unknown})

    data = _normalise_booleans(data)
    dla_form = DlaConfigForm(data=data)
    htm_form = HtmParamsForm(data=data)
    errors = {}
    if not dla_form.is_valid():
        errors.update(_form_errors(dla_form))
    if not htm_form.is_valid():
        errors.update(_form_errors(htm_form))
    if errors:
        raise ValidationError(errors)

    dla_config = DlaConfig(**dla_form.cleaned_data)
    htm_params = HtmParams(
        seed=dla_config.seed,
        **{key[len('htm_'):]: value for key, value in htm_form.cleaned_data.items()},
    )
    return dla_config, htm_params


def load_configs(
    config_path: Optional[Union[str, Path]] = None,
    dataset_name: Optional[str] = None,
    overrides: Optional[Mapping[str, Any]] = None,
    environ: Optional[Mapping[str, str]] = None,
) -> Tuple[DlaConfig, HtmParams]:
    """Resolve the effective configuration for one dataset run."""
    data: Dict[str, Any] = dict(settings.DEVIANT_LEARNING)
    if dataset_name:
        data.update(settings.DLA_DATASET_PRESETS.get(dataset_name, {}))
    if config_path:
        data.update(read_config_file(config_path))
    data.update(environment_overrides(environ))
    if overrides:
        data.update({key: value for key, value in overrides.items() if value is not None})
    return build_configs(data)


def effective_config_dict(dla_config: DlaConfig, htm_params: Optional[HtmParams] = None) -> Dict[str, Any]:
    """Flat key/value view of a configuration, using config-file key names."""
    flat = asdict(dla_config)
    if htm_params is not None:
        flat.update({
            f"htm_{key}": value for key, value in asdict(htm_params).items() if key != 'seed'
        })
    return flat


def config_hash(dla_config: DlaConfig, htm_params: Optional[HtmParams] = None) -> str:
    """Deterministic digest of the full effective configuration."""
    canonical = json.dumps(effective_config_dict(dla_config, htm_params), sort_keys=True, default=str)
    return hashlib.sha256(canonical.encode('utf-8')).hexdigest()[:16]
