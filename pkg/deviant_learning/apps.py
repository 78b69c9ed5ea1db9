from django.apps import AppConfig


class DeviantLearningConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'deviant_learning'
    verbose_name = 'Deviant Learning'
