from django.apps import AppConfig


class MasksConfig(AppConfig):
    name = 'apps.masks'
    verbose_name = 'Pseudo Foreground Masks'
