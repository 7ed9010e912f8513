from django.apps import AppConfig


class DivdegConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'divdeg'
    verbose_name = 'Division degrees of p-primary torsion'
