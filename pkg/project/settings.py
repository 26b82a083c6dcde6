from pathlib import Path
import os

# Build paths inside the project like this: BASE_DIR / 'subdir'.
BASE_DIR = Path(__file__).resolve().parent.parent


# SECURITY WARNING: keep the secret key used in production secret!
SECRET_KEY = os.environ.get('DJANGO_SECRET_KEY', 'django-insecure-orchardkit-local-only')

# SECURITY WARNING: don't run with debug turned on in production!
DEBUG = os.environ.get('DJANGO_DEBUG', 'True') == 'True'

ALLOWED_HOSTS = ['localhost', '127.0.0.1', 'testserver']


# Application definition

INSTALLED_APPS = [
    'django.contrib.contenttypes',
    'rest_framework',
    'orchards',
]

MIDDLEWARE = []

ROOT_URLCONF = 'project.urls'

TEMPLATES = []


# Database
# La app no define modelos; la base en memoria solo permite arrancar el runner de tests

DATABASES = {
    'default': {
        'ENGINE': 'django.db.backends.sqlite3',
        'NAME': ':memory:',
    }
}


# Internationalization

LANGUAGE_CODE = 'es-pe'
TIME_ZONE = 'America/Lima'
USE_I18N = True
USE_TZ = True

DEFAULT_AUTO_FIELD = 'django.db.models.BigAutoField'

# Configuración de DRF (solo serializers y renderer JSON)
REST_FRAMEWORK = {
    'DEFAULT_RENDERER_CLASSES': [
        'rest_framework.renderers.JSONRenderer',
    ],
    'UNAUTHENTICATED_USER': None,
}

# Configuración de límites de OrchardKit
ORCHARDKIT_BUDGET = int(os.environ.get('ORCHARDKIT_BUDGET', 100000))  # vértices de Orch(n,k)
ORCHARDKIT_RESOLUTION_LIMIT = int(os.environ.get('ORCHARDKIT_RESOLUTION_LIMIT', 1000))
ORCHARDKIT_ORACLE_MAX_NODES = int(os.environ.get('ORCHARDKIT_ORACLE_MAX_NODES', 12))
ORCHARDKIT_DEFAULT_SEED = int(os.environ.get('ORCHARDKIT_DEFAULT_SEED', 0))

# Importar configuración de logging
from .logging_config import LOGGING
