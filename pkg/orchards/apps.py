from django.apps import AppConfig


class OrchardsConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'orchards'
    verbose_name = 'Redes orchard'
