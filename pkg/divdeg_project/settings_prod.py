from .settings import *

# Worker deployment: per-image tables are computed by Celery workers.
CELERY_TASK_ALWAYS_EAGER = False
CELERY_BROKER_URL = 'redis://redis:6379/0'
CELERY_RESULT_BACKEND = 'redis://redis:6379/0'

LOGGING['loggers']['divdeg']['level'] = 'WARNING'
