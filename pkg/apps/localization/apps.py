from django.apps import AppConfig


class LocalizationConfig(AppConfig):
    name = 'apps.localization'
    verbose_name = 'Object Localization'
