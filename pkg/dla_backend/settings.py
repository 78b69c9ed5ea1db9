"""
Django settings for dla_backend project.

The project hosts the deviant learning benchmark: there are no HTTP views or
database models, Django provides settings, management commands, logging
configuration and the test runner.

For more information on this file, see
https://docs.djangoproject.com/en/4.2/topics/settings/
"""

from pathlib import Path
import os
from dotenv import load_dotenv

load_dotenv()

# Build paths inside the project like this: BASE_DIR / 'subdir'.
BASE_DIR = Path(__file__).resolve().parent.parent

# SECURITY WARNING: only used by Django internals, nothing here is served.
SECRET_KEY = os.getenv('SECRET_KEY', 'django-insecure-dla-benchmark-local-only')

DEBUG = os.getenv('DEBUG', 'False') == 'True'

ALLOWED_HOSTS = []


# Application definition

INSTALLED_APPS = [
    'deviant_learning',
]

# No database: every benchmark run is computed in memory and written to files.
DATABASES = {}

LANGUAGE_CODE = 'en-us'

TIME_ZONE = 'UTC'

USE_I18N = False

USE_TZ = True

DEFAULT_AUTO_FIELD = 'django.db.models.BigAutoField'


# Deviant learning configuration

# Vendored and user-supplied benchmark files; built-in dataset names resolve here
DLA_DATA_DIR = Path(os.getenv('DLA_DATA_DIR', BASE_DIR / 'deviant_learning' / 'data'))

# Default output directory for result tables and sweep matrices
DLA_OUTPUT_DIR = Path(os.getenv('DLA_OUTPUT_DIR', BASE_DIR / 'results'))

# Prefix of environment variables that override configuration keys
# (e.g. DLA_LEARNING_EXTENT=250, DLA_HTM_MC_RUNS=200)
DLA_ENV_PREFIX = 'DLA_'

# Engine and HTM baseline defaults; every key can be overridden from a config
# file or a DLA_<KEY> environment variable.
DEVIANT_LEARNING = {
    # DLA
    'learning_extent': 200,
    'time_limit': 70,
    'initial_permanence': 0.0,
    'store_threshold': 120,
    'tolerance': 0.05,
    'winner_threshold': 'auto',
    'rho2': 0.0,
    'rho2_lim': 1.0,
    'noise_scale': 0.01,
    'seed': 42,
    'mc_passes': 2,
    'activation': 'tanh',
    'freeze_learning': False,
    'th3_rounding': 'floor',
    'quantization': 'fixed',
    'quantization_scale': 10.0,
    'include_label': True,
    'shuffle': False,
    # HTM baseline
    'htm_desired_local_activity': 3,
    'htm_minimum_overlap': 5,
    'htm_initial_permanence': 0.4,
    'htm_mc_runs': 1000,
    'htm_tolerance': 0.05,
    'htm_n_columns': 128,
    'htm_potential_pct': 0.85,
    'htm_connected_permanence': 0.5,
    'htm_permanence_increment': 0.05,
    'htm_permanence_decrement': 0.02,
    'htm_encoder_width': 21,
}

# Per-dataset overrides applied before the config file. Encoder widths keep the
# HTM minimum overlap reachable under Monte-Carlo connectivity.
DLA_DATASET_PRESETS = {
    'iris': {'quantization': 'fixed', 'htm_minimum_overlap': 90, 'htm_encoder_width': 64},
    'heart': {'quantization': 'min_max', 'htm_minimum_overlap': 210, 'htm_encoder_width': 48},
    'wordsim': {'quantization': 'fixed', 'htm_minimum_overlap': 123, 'htm_encoder_width': 192},
}

# Published accuracies (percent) kept next to measured values in reports
DLA_PUBLISHED_MAPCA = {
    'dla': {'iris': 86.0, 'heart': 70.0, 'wordsim': 72.5},
    'htm': {'iris': 77.03, 'heart': 75.07, 'wordsim': 79.35},
}

# Measured MAPCA further than this many points from the published figure is flagged
DLA_PUBLISHED_BAND = float(os.getenv('DLA_PUBLISHED_BAND', '10'))


# Logging configuration
LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'formatters': {
        'verbose': {
            'format': '{levelname} {asctime} {module} {message}',
            'style': '{',
        },
        'simple': {
            'format': '{levelname} {message}',
            'style': '{',
        },
    },
    'handlers': {
        'console': {
            'class': 'logging.StreamHandler',
            'formatter': 'verbose',
        },
    },
    'root': {
        'handlers': ['console'],
        'level': 'WARNING',
    },
    'loggers': {
        'deviant_learning': {
            'handlers': ['console'],
            'level': os.getenv('DLA_LOG_LEVEL', 'INFO'),
            'propagate': False,
        },
    },
}
