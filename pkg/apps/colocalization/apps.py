from django.apps import AppConfig


class ColocalizationConfig(AppConfig):
    name = 'apps.colocalization'
    verbose_name = 'Descriptor Co-localization'
