"""Configura Django para ejecutar la suite con pytest (equivalente a manage.py test)"""
import os

import django

os.environ.setdefault('DJANGO_SETTINGS_MODULE', 'project.settings')
django.setup()
