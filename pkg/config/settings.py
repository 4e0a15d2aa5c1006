"""
Django settings for the WSFL (weakly supervised foreground learning) toolkit.
"""

from pathlib import Path
from decouple import config, Csv

# Build paths inside the project like this: BASE_DIR / 'subdir'.
BASE_DIR = Path(__file__).resolve().parent.parent


# SECURITY WARNING: keep the secret key used in production secret!
SECRET_KEY = config('SECRET_KEY', default='django-insecure-wsfl-toolkit-change-in-production')

DEBUG = config('DEBUG', default=False, cast=bool)

ALLOWED_HOSTS = []


# Application definition

INSTALLED_APPS = [
    # Third-party apps
    'rest_framework',

    # Local apps
    'apps.core',
    'apps.datasets',
    'apps.colocalization',
    'apps.masks',
    'apps.training',
    'apps.localization',
    'apps.detection',
    'apps.evaluation',
]

# Everything is file based; no database is configured.
DATABASES = {}

DEFAULT_AUTO_FIELD = 'django.db.models.BigAutoField'

USE_TZ = True


# Logging
# WSFL_LOG selects the verbosity; all records go to standard error.

LOG_LEVELS = {
    'error': 'ERROR',
    'info': 'INFO',
    'debug': 'DEBUG',
}

WSFL_LOG = config('WSFL_LOG', default='info').strip().lower()

LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'formatters': {
        'plain': {
            'format': '%(asctime)s %(levelname)s %(name)s: %(message)s',
        },
    },
    'handlers': {
        'stderr': {
            'class': 'logging.StreamHandler',
            'stream': 'ext://sys.stderr',
            'formatter': 'plain',
        },
    },
    'loggers': {
        'apps': {
            'handlers': ['stderr'],
            'level': LOG_LEVELS.get(WSFL_LOG, 'INFO'),
            'propagate': False,
        },
    },
}


# Pipeline defaults (overridable per command with --config or flags)

WSFL = {
    'THREADS': config('WSFL_THREADS', default=1, cast=int),
    'MASK_THRESHOLD': config('WSFL_MASK_THRESHOLD', default=0.5, cast=float),
    'PROPOSAL_THRESHOLD': config('WSFL_PROPOSAL_THRESHOLD', default=0.2, cast=float),
    'GT_PROPOSAL_THRESHOLD': config('WSFL_GT_PROPOSAL_THRESHOLD', default=0.5, cast=float),
    'EXEMPT_CLASSES': config('WSFL_EXEMPT_CLASSES', default='person,pottedplant', cast=Csv()),
    'FEATURE_SUFFIX': config('WSFL_FEATURE_SUFFIX', default='.wsft'),
    'SEED': config('WSFL_SEED', default=0, cast=int),
}
