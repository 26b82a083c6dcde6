"""
Configuración simple para testing
"""

# Configuración de logging para testing
TEST_LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'handlers': {
        'null': {
            'class': 'logging.NullHandler',
        },
    },
    'loggers': {
        'django': {'handlers': ['null'], 'propagate': False},
        'orchards': {'handlers': ['null'], 'propagate': False},
        'orchards.space_explorer': {'handlers': ['null'], 'propagate': False},
    },
    'root': {
        'handlers': ['null'],
    },
}

# Número de casos de las suites de propiedades
TEST_TRIALS = {
    'characterization': 1000,
    'moves': 1000,
    'canonicalization': 500,
    'roundtrip': 1000,
    'space_audit': 100,
    'structure': 200,
    'resolutions': 30,
}

# Configuración común de hypothesis
HYPOTHESIS_SETTINGS = {
    'deadline': None,
    'derandomize': True,
}
