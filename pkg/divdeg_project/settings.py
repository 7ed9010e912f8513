"""
Django settings for divdeg_project project.
"""

from pathlib import Path

import environ

# Build paths inside the project
BASE_DIR = Path(__file__).resolve().parent.parent

env = environ.Env(
    DIVDEG_CATALOG_DIR=(str, None),
)

# Nothing is served over HTTP; the key only satisfies Django's startup checks.
SECRET_KEY = 'divdeg-not-a-web-service'

DEBUG = False

ALLOWED_HOSTS = []

# Application definition
INSTALLED_APPS = [
    'divdeg',
]

# No persistence: catalogs are plain files and every result is recomputed.
DATABASES = {}

# Internationalization
LANGUAGE_CODE = 'en-us'
TIME_ZONE = 'UTC'
USE_I18N = False
USE_TZ = True

DEFAULT_AUTO_FIELD = 'django.db.models.BigAutoField'

# Division-degree computations
DIVDEG = {
    # Largest group any closure may enumerate. |GL(2, F_37)| = 1822176 must fit.
    'CLOSURE_CAP': 2 ** 22,
    # Uniform level bound n(K, p) per prime for the default base field.
    'LEVEL_BOUNDS': {2: 5},
    'DEFAULT_LEVEL_BOUND': 1,
    'BASE_FIELD_LABEL': 'Q',
    # Default catalog directory
    'CATALOG_DIR': env('DIVDEG_CATALOG_DIR'),
}

# Logging
LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'formatters': {
        'verbose': {
            'format': '{asctime} {levelname} {name}: {message}',
            'style': '{',
        },
    },
    'handlers': {
        'console': {
            'class': 'logging.StreamHandler',
            'formatter': 'verbose',
        },
    },
    'loggers': {
        'divdeg': {
            'handlers': ['console'],
            'level': 'INFO',
            'propagate': False,
        },
    },
}

# Celery Configuration
CELERY_BROKER_URL = 'memory://'
CELERY_RESULT_BACKEND = 'cache+memory://'
CELERY_ACCEPT_CONTENT = ['json']
CELERY_TASK_SERIALIZER = 'json'
CELERY_RESULT_SERIALIZER = 'json'
CELERY_TIMEZONE = TIME_ZONE
# Tasks run in-process unless a worker deployment switches this off.
CELERY_TASK_ALWAYS_EAGER = True
CELERY_TASK_EAGER_PROPAGATES = True
