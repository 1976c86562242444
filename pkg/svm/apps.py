from django.apps import AppConfig


class SvmAppConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'svm'
    verbose_name = 'Support vector classifier'
