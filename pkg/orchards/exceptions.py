"""
Jerarquía de errores del toolkit de redes orchard
"""


class OrchardKitError(Exception):
    """Error base de todas las operaciones del toolkit"""


# Red y estructura

class NetworkError(OrchardKitError):
    pass


class ParallelArcError(NetworkError):
    def __init__(self, tail, head):
        self.tail = tail
        self.head = head
        super().__init__(f"Arco paralelo ({tail}, {head})")


class MissingElementError(NetworkError):
    pass


class SuppressionError(NetworkError):
    pass


class NotBinaryError(NetworkError):
    pass


class InvalidNetworkError(NetworkError):
    def __init__(self, report, message=None):
        self.report = report
        super().__init__(message or f"Red inválida: {report}")


# eNewick

class ENewickError(OrchardKitError):
    pass


class ENewickSyntaxError(ENewickError):
    def __init__(self, message, offset):
        self.offset = offset
        super().__init__(f"{message} (byte {offset})")


class ENewickSemanticError(ENewickError):
    def __init__(self, message, report=None):
        self.report = report
        super().__init__(message)


# Cherry picking

class CherryError(OrchardKitError):
    pass


class UnknownTaxonError(CherryError):
    def __init__(self, taxon):
        self.taxon = taxon
        super().__init__(f"Taxón desconocido: {taxon}")


class MalformedSequenceError(CherryError):
    pass


class NotOrchardError(CherryError):
    pass


# Límites

class ResolutionLimitExceeded(OrchardKitError):
    pass


class OracleTooLargeError(OrchardKitError):
    pass


class BudgetExceededError(OrchardKitError):
    def __init__(self, budget, message=None):
        self.budget = budget
        super().__init__(message or f"Presupuesto de enumeración excedido ({budget})")


class DisconnectedSpaceError(OrchardKitError):
    pass


# Etiquetados

class LabellingError(OrchardKitError):
    pass


# Movimientos

class MoveError(OrchardKitError):
    pass


class MalformedMoveError(MoveError):
    pass


class InvalidMoveError(MoveError):
    KINDS = ('cycle', 'parallel_arc', 'degree')

    def __init__(self, kind, message=None):
        self.kind = kind
        super().__init__(message or f"Movimiento inválido: {kind}")


# Canonización y caminos

class CanonicalizationError(OrchardKitError):
    pass


class PreconditionError(CanonicalizationError):
    pass


class TaxaMismatchError(CanonicalizationError):
    pass
