import os

from celery import Celery

os.environ.setdefault('DJANGO_SETTINGS_MODULE', 'divdeg_project.settings')

# Workers pick up divdeg.tasks; CELERY_* settings decide eager or brokered runs.
app = Celery('divdeg_project')
app.config_from_object('django.conf:settings', namespace='CELERY')
app.autodiscover_tasks()
