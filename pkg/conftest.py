import os

import django

os.environ.setdefault('DJANGO_SETTINGS_MODULE', 'divdeg_project.settings')
django.setup()
