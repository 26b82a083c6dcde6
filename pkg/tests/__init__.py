# Directorio de tests para OrchardKit
import logging.config

from .config import TEST_LOGGING

logging.config.dictConfig(TEST_LOGGING)
