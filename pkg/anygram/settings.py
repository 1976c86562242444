# anygram/settings.py

import os
from pathlib import Path
from decouple import config, Csv

# Build paths inside the project like this: BASE_DIR / 'subdir'.
BASE_DIR = Path(__file__).resolve().parent.parent

# ==============================================================================
# SECURITY SETTINGS
# ==============================================================================

# Only management commands run; the key is never used to sign anything served.
SECRET_KEY = os.environ.get("SECRET_KEY", "dev-secret-key")

DEBUG = config('DEBUG', default=False, cast=bool)

ALLOWED_HOSTS = []

# ==============================================================================
# APPLICATION DEFINITION
# ==============================================================================

INSTALLED_APPS = [
    # Local apps
    'corpus',
    'embeddings',
    'kernels',
    'oracle',
    'svm',
    'pipeline',
]

# ==============================================================================
# DATABASE CONFIGURATION
# ==============================================================================

# No app stores models; the test runner still expects a default alias.
DATABASES = {
    'default': {
        'ENGINE': 'django.db.backends.sqlite3',
        'NAME': ':memory:',
    }
}

DEFAULT_AUTO_FIELD = 'django.db.models.BigAutoField'

# ==============================================================================
# INTERNATIONALIZATION
# ==============================================================================

LANGUAGE_CODE = 'en-us'
TIME_ZONE = 'UTC'
USE_I18N = True
USE_TZ = True

# ==============================================================================
# KERNEL DEFAULTS
# ==============================================================================

# Decay factor applied per additional token of an n-gram match
ANYGRAM_DEFAULT_LAMBDA = config('ANYGRAM_DEFAULT_LAMBDA', default=0.5, cast=float)

# Suffix attached to aspect-term tokens for the string-match kernel
ANYGRAM_DEFAULT_SUFFIX = config('ANYGRAM_DEFAULT_SUFFIX', default='_AT')

# Pretrained vectors are commonly lowercased
ANYGRAM_LOWERCASE_LOOKUP = config('ANYGRAM_LOWERCASE_LOOKUP', default=True, cast=bool)

# 0 = use every available core
ANYGRAM_THREADS = config('ANYGRAM_THREADS', default=0, cast=int)

# Rows handed to one worker at a time when building Gram matrices
ANYGRAM_GRAM_BLOCK_ROWS = config('ANYGRAM_GRAM_BLOCK_ROWS', default=16, cast=int)

# ==============================================================================
# SVM DEFAULTS
# ==============================================================================

ANYGRAM_DEFAULT_C = config('ANYGRAM_DEFAULT_C', default=1.0, cast=float)
ANYGRAM_SVM_TOL = config('ANYGRAM_SVM_TOL', default=1e-3, cast=float)
ANYGRAM_SEED = config('ANYGRAM_SEED', default=0, cast=int)

# Tuning grids (overridable per run with --C-grid / --theta-grid)
ANYGRAM_C_GRID = config(
    'ANYGRAM_C_GRID',
    default='0.01,0.1,1,10,100',
    cast=Csv(float)
)
ANYGRAM_THETA_GRID = config(
    'ANYGRAM_THETA_GRID',
    default='0.5,0.6,0.7,0.8,0.9',
    cast=Csv(float)
)

# ==============================================================================
# REFERENCE DATA
# ==============================================================================

# Optional 300-d Common Crawl vectors for the superb/brilliant check
ANYGRAM_REFERENCE_EMBEDDINGS = config('ANYGRAM_REFERENCE_EMBEDDINGS', default='')

# ==============================================================================
# LOGGING CONFIGURATION
# ==============================================================================

LOGS_DIR = Path(config('ANYGRAM_LOG_DIR', default=str(BASE_DIR / 'logs')))
LOG_LEVEL = config('ANYGRAM_LOG_LEVEL', default='INFO')

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
        'file': {
            'level': LOG_LEVEL,
            'class': 'logging.FileHandler',
            'filename': LOGS_DIR / 'anygram.log',
            'formatter': 'verbose',
        },
        'console': {
            'level': LOG_LEVEL,
            'class': 'logging.StreamHandler',
            'formatter': 'simple',
        },
    },
    'loggers': {
        'django': {
            'handlers': ['file', 'console'],
            'level': 'WARNING',
            'propagate': True,
        },
        **{
            app: {
                'handlers': ['file', 'console'],
                'level': LOG_LEVEL,
                'propagate': False,
            }
            for app in ('corpus', 'embeddings', 'kernels', 'oracle', 'svm', 'pipeline')
        },
    },
}

# Create logs directory if it doesn't exist
LOGS_DIR.mkdir(parents=True, exist_ok=True)
