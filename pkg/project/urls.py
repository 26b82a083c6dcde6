"""
URL configuration for project project.

OrchardKit se usa desde la línea de órdenes (``manage.py orchard``); no expone vistas.
"""

urlpatterns = []
