"""
Serializers para los ficheros JSON auxiliares: etiquetados, movimientos,
secuencias de cherry picking, trazas de movimientos y resúmenes.

Los nodos se referencian por rutas ("r", "r.0", "r.0.1", ...) según el orden
determinista del escritor eNewick; la conversión nodo <-> ruta vive en
``enewick_io``.
"""
import re
from fractions import Fraction

from rest_framework import serializers
from rest_framework.renderers import JSONRenderer

NODE_PATH_RE = re.compile(r'^r(\.\d+)*$')


class RationalField(serializers.Field):
    """Racional exacto serializado como "p/q" """
    default_error_messages = {
        'invalid': 'Se esperaba un racional con formato "p/q".',
    }

    def to_representation(self, value):
        value = Fraction(value)
        return f"{value.numerator}/{value.denominator}"

    def to_internal_value(self, data):
        if not isinstance(data, (str, int)):
            self.fail('invalid')
        try:
            return Fraction(str(data))
        except (ValueError, ZeroDivisionError):
            self.fail('invalid')


class NodePathField(serializers.CharField):
    default_error_messages = {
        'path': 'Ruta de nodo inválida: {value}',
    }

    def to_internal_value(self, data):
        value = super().to_internal_value(data)
        if not NODE_PATH_RE.match(value):
            self.fail('path', value=value)
        return value


class LabellingSerializer(serializers.Serializer):
    """Serializer para un etiquetado: ruta de nodo -> "p/q" """
    labelling = serializers.DictField(child=RationalField())

    def validate_labelling(self, value):
        for path in value:
            if not NODE_PATH_RE.match(path):
                raise serializers.ValidationError(f"Ruta de nodo inválida: {path}")
        return value


class MoveSerializer(serializers.Serializer):
    """Serializer para un movimiento {p, x, c, e: [cola, cabeza], z, w}"""
    p = NodePathField()
    x = NodePathField()
    c = NodePathField()
    e = serializers.ListField(child=NodePathField(), min_length=2, max_length=2)
    z = NodePathField()
    w = NodePathField()

    def validate_e(self, value):
        if self.initial_data.get('x') not in value:
            raise serializers.ValidationError('El arco e debe ser incidente a x')
        return value


class SequenceSerializer(serializers.Serializer):
    pairs = serializers.ListField(
        child=serializers.ListField(child=serializers.CharField(), min_length=2, max_length=2),
        allow_empty=True,
    )


class TraceStepSerializer(serializers.Serializer):
    move = MoveSerializer()
    enewick_after = serializers.CharField()
    labelling_after = serializers.DictField(child=RationalField())


class ViolationSerializer(serializers.Serializer):
    kind = serializers.CharField()
    message = serializers.CharField()
    nodes = serializers.ListField(child=serializers.IntegerField(), required=False)


class SummarySerializer(serializers.Serializer):
    """Serializer para NodeKindSummary más el veredicto de validación"""
    valid = serializers.BooleanField()
    n_leaves = serializers.IntegerField(required=False)
    n_reticulations = serializers.IntegerField(required=False)
    reticulation_number = serializers.IntegerField(required=False)
    is_binary = serializers.BooleanField(required=False)
    violations = ViolationSerializer(many=True, required=False)


class SpaceSummarySerializer(serializers.Serializer):
    n = serializers.IntegerField()
    k = serializers.IntegerField()
    vertices = serializers.IntegerField()
    edges = serializers.IntegerField()
    connected = serializers.BooleanField()
    diameter = serializers.IntegerField(required=False, allow_null=True)
    bound = serializers.IntegerField()


def render_json(data):
    """Renderiza datos ya serializados como texto JSON (indentado, determinista)"""
    return JSONRenderer().render(data, renderer_context={'indent': 2}).decode('utf-8')


def validated(serializer_class, data):
    """Valida ``data`` con el serializer dado y devuelve ``validated_data``"""
    serializer = serializer_class(data=data)
    serializer.is_valid(raise_exception=True)
    return serializer.validated_data
