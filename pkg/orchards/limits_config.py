"""
Configuración de límites para enumeraciones y oráculos exhaustivos
"""
import logging

from django.conf import settings

logger = logging.getLogger(__name__)


class LimitsConfig:
    """
    Lee los topes de trabajo desde settings (sobrescribibles por entorno)
    """

    DEFAULT_BUDGET = 100000
    DEFAULT_RESOLUTION_LIMIT = 1000
    DEFAULT_ORACLE_MAX_NODES = 12
    DEFAULT_SEED = 0

    @property
    def budget(self):
        """Máximo de vértices al enumerar un espacio Orch(n,k)"""
        return int(getattr(settings, 'ORCHARDKIT_BUDGET', self.DEFAULT_BUDGET))

    @property
    def resolution_limit(self):
        """Máximo de resoluciones binarias enumeradas"""
        return int(getattr(settings, 'ORCHARDKIT_RESOLUTION_LIMIT', self.DEFAULT_RESOLUTION_LIMIT))

    @property
    def oracle_max_nodes(self):
        """Máximo de nodos internos para los oráculos exhaustivos de etiquetado"""
        return int(getattr(settings, 'ORCHARDKIT_ORACLE_MAX_NODES', self.DEFAULT_ORACLE_MAX_NODES))

    @property
    def default_seed(self):
        return int(getattr(settings, 'ORCHARDKIT_DEFAULT_SEED', self.DEFAULT_SEED))

    def resolve_budget(self, budget=None):
        """Devuelve el presupuesto explícito o el configurado"""
        if budget is None:
            budget = self.budget
        if budget < 1:
            logger.warning(f"Presupuesto no positivo ({budget}), se usa 1")
            budget = 1
        return budget

    def as_dict(self):
        return {
            'budget': self.budget,
            'resolution_limit': self.resolution_limit,
            'oracle_max_nodes': self.oracle_max_nodes,
            'default_seed': self.default_seed,
        }


# Instancia global
limits_config = LimitsConfig()


def get_limits_config():
    """
    Obtener la instancia de configuración de límites
    """
    return limits_config
