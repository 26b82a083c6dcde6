"""
Lectura y escritura de redes en eNewick (Newick extendido con nodos híbridos)
y conversión de etiquetados, movimientos, secuencias y trazas a JSON.

Convenciones:
- El nodo más externo del texto es el hijo de la raíz; la raíz es implícita.
  Un nodo externo con un único hijo y sin etiqueta híbrida se lee como raíz
  explícita ("(a);" es el árbol de una hoja).
- Una reticulación de grado de entrada d aparece d veces como "#H<id>"; solo
  una aparición lleva el subárbol.
- Longitudes de rama, soportes y etiquetas internas se leen y se descartan.
"""
import logging
import re
from dataclasses import dataclass, field

from .exceptions import ENewickSemanticError, ENewickSyntaxError, MissingElementError
from .network_core import PhyloNetwork, inspect_arcs
from .serializers import (
    LabellingSerializer,
    MoveSerializer,
    SequenceSerializer,
    TraceStepSerializer,
    validated,
)

logger = logging.getLogger(__name__)

_TOKENIZER = re.compile(r'\s*([():,;]|[^():,;\s]+)')
_TAXON_RE = re.compile(r'^[A-Za-z0-9_.\-]+$')
_HYBRID_RE = re.compile(r'^(?P<name>[^#]*)#(?P<tag>(?:H|LGT|R)?\d+)$')


@dataclass
class _ParsedNode:
    offset: int
    children: list = field(default_factory=list)
    name: str = None
    hybrid: str = None
    has_subtree: bool = False


def _tokenize(text):
    tokens = []
    position = 0
    while position < len(text):
        match = _TOKENIZER.match(text, position)
        if match is None:
            if text[position:].strip():
                raise ENewickSyntaxError('Carácter inesperado', _byte_offset(text, position))
            break
        tokens.append((match.group(1), _byte_offset(text, match.start(1))))
        position = match.end()
    return tokens


def _byte_offset(text, index):
    return len(text[:index].encode('utf-8'))


class _Parser:
    def __init__(self, text):
        self.text = text
        self.tokens = _tokenize(text)
        self.position = 0

    def peek(self):
        if self.position < len(self.tokens):
            return self.tokens[self.position]
        return (None, _byte_offset(self.text, len(self.text)))

    def pop(self):
        token = self.peek()
        self.position += 1
        return token

    def expect(self, value):
        token, offset = self.pop()
        if token != value:
            found = 'fin de texto' if token is None else f"'{token}'"
            raise ENewickSyntaxError(f"Se esperaba '{value}', se encontró {found}", offset)

    def parse_document(self):
        if not self.tokens:
            raise ENewickSyntaxError('Texto vacío', 0)
        node = self.parse_subtree()
        self.expect(';')
        token, offset = self.peek()
        if token is not None:
            raise ENewickSyntaxError('Contenido tras el punto y coma final', offset)
        return node

    def parse_subtree(self):
        token, offset = self.peek()
        node = _ParsedNode(offset=offset)
        if token == '(':
            self.pop()
            node.has_subtree = True
            node.children.append(self.parse_subtree())
            while self.peek()[0] == ',':
                self.pop()
                node.children.append(self.parse_subtree())
            self.expect(')')
        self.parse_label(node)
        if not node.children and node.name is None and node.hybrid is None:
            raise ENewickSyntaxError('Hoja sin nombre', offset)
        return node

    def parse_label(self, node):
        token, offset = self.peek()
        if token is not None and token not in '():,;':
            self.pop()
            match = _HYBRID_RE.match(token)
            if match:
                node.hybrid = match.group('tag')
                name = match.group('name')
            elif '#' in token:
                raise ENewickSyntaxError(f"Etiqueta híbrida mal formada: {token}", offset)
            else:
                name = token
            if name:
                if not node.children and not _TAXON_RE.match(name):
                    raise ENewickSyntaxError(f"Nombre de taxón inválido: {name}", offset)
                node.name = name
        if self.peek()[0] == ':':
            self.pop()
            token, offset = self.pop()
            if token is None or token in '():,;':
                raise ENewickSyntaxError('Falta el valor de longitud de rama', offset)


def parse(text):
    """
    Convierte un texto eNewick en una ``PhyloNetwork`` válida.

    Lanza ``ENewickSyntaxError`` (con desplazamiento en bytes) si el texto
    está mal formado y ``ENewickSemanticError`` si el grafo resultante no es
    una red filogenética.
    """
    top = _Parser(text.strip()).parse_document()

    arcs = []
    labels = {}
    hybrid_ids = {}
    hybrid_uses = {}
    hybrid_bodies = {}
    counter = iter(range(1, 1 << 30))

    def build(node):
        if node.hybrid is not None:
            tag = node.hybrid
            hybrid_uses[tag] = hybrid_uses.get(tag, 0) + 1
            if tag not in hybrid_ids:
                hybrid_ids[tag] = next(counter)
            node_id = hybrid_ids[tag]
            if node.has_subtree or (node.name and not node.children):
                if tag in hybrid_bodies:
                    raise ENewickSemanticError(f"El híbrido #{tag} tiene más de un subárbol")
                hybrid_bodies[tag] = node.offset
            else:
                return node_id
        else:
            node_id = next(counter)
        if not node.children:
            if node.hybrid is not None:
                # Híbrido con nombre de hoja: la hoja cuelga de la reticulación
                leaf = next(counter)
                arcs.append((node_id, leaf))
                labels[leaf] = node.name
            else:
                labels[node_id] = node.name
        for child in node.children:
            arcs.append((node_id, build(child)))
        return node_id

    root = 0
    if top.hybrid is None and len(top.children) == 1:
        arcs.append((root, build(top.children[0])))
    else:
        arcs.append((root, build(top)))

    for tag, uses in sorted(hybrid_uses.items()):
        if uses < 2:
            raise ENewickSemanticError(f"El híbrido #{tag} aparece una sola vez")
        if tag not in hybrid_bodies:
            raise ENewickSemanticError(f"El híbrido #{tag} no tiene subárbol")

    report = inspect_arcs(arcs, labels, nodes=[root])
    if not report.is_valid:
        raise ENewickSemanticError(f"El texto no describe una red válida: {report}", report=report)
    net = PhyloNetwork(arcs, labels, nodes=[root])
    logger.debug(f"eNewick leído: {net!r}")
    return net


# Escritura

def _subkeys(net):
    keys = {}
    for v in reversed(net.topological_order()):
        children = net.children(v)
        if not children:
            keys[v] = net.taxon_of(v)
        elif net.indegree(v) >= 2:
            keys[v] = f"({keys[children[0]]})#"
        else:
            keys[v] = '(' + ','.join(sorted(keys[c] for c in children)) + ')'
    return keys


def _ordered_children(net, keys):
    return {v: sorted(net.children(v), key=lambda c: (keys[c], c)) for v in net.nodes}


def write_order(net):
    """
    Recorrido en profundidad del escritor: lista de (nodo, ruta, primera_vez).
    La ruta de un nodo es la de su primera aparición.
    """
    keys = _subkeys(net)
    ordered = _ordered_children(net, keys)
    root = net.root
    visits = [(root, 'r', True)]
    seen = {root}

    def walk(v, path):
        first = v not in seen
        seen.add(v)
        visits.append((v, path, first))
        if first:
            for i, child in enumerate(ordered[v]):
                walk(child, f"{path}.{i}")

    walk(net.root_child, 'r.0')
    return visits


def write(net):
    """eNewick determinista: hijos ordenados por subclave canónica, híbridos H1.."""
    keys = _subkeys(net)
    ordered = _ordered_children(net, keys)
    hybrid_tags = {}
    written = set()

    def render(v):
        if net.indegree(v) >= 2:
            if v not in hybrid_tags:
                hybrid_tags[v] = f"H{len(hybrid_tags) + 1}"
            tag = hybrid_tags[v]
            if v in written:
                return f"#{tag}"
            written.add(v)
            return '(' + render(ordered[v][0]) + f")#{tag}"
        children = ordered[v]
        if not children:
            return net.taxon_of(v)
        return '(' + ','.join(render(c) for c in children) + ')'

    return render(net.root_child) + ';'


# Rutas de nodo

def node_paths(net):
    """Mapa nodo -> ruta ("r", "r.0", "r.0.1", ...)"""
    return {v: path for v, path, first in write_order(net) if first}


def resolve_path(net, path):
    for v, node_path, first in write_order(net):
        if first and node_path == path:
            return v
    raise MissingElementError(f"Ruta de nodo inexistente: {path}")


def _path_index(net):
    return {path: v for v, path in node_paths(net).items()}


# JSON

def _labelling_paths(net, t):
    paths = node_paths(net)
    return {paths[v]: t[v] for v in sorted(t, key=lambda v: paths[v])}


def labelling_to_json(net, t):
    return LabellingSerializer({'labelling': _labelling_paths(net, t)}).data['labelling']


def labelling_from_json(net, data):
    values = validated(LabellingSerializer, {'labelling': data})['labelling']
    index = _path_index(net)
    missing = sorted(set(values) - set(index))
    if missing:
        raise MissingElementError(f"Rutas de nodo inexistentes: {missing}")
    return {index[path]: value for path, value in values.items()}


def _move_paths(net, move):
    paths = node_paths(net)
    return {
        'p': paths[move.p], 'x': paths[move.x], 'c': paths[move.c],
        'e': [paths[move.e[0]], paths[move.e[1]]],
        'z': paths[move.z], 'w': paths[move.w],
    }


def move_to_json(net, move):
    return MoveSerializer(_move_paths(net, move)).data


def move_from_json(net, data):
    from .rearrangement import resolve_move

    values = validated(MoveSerializer, data)
    index = _path_index(net)
    try:
        nodes = {role: index[values[role]] for role in ('p', 'x', 'c', 'z', 'w')}
        tail, head = (index[path] for path in values['e'])
    except KeyError as exc:
        raise MissingElementError(f"Ruta de nodo inexistente: {exc.args[0]}") from None
    return resolve_move(net, nodes['p'], nodes['x'], nodes['c'], (tail, head), nodes['z'], nodes['w'])


def sequence_to_json(seq):
    return SequenceSerializer({'pairs': [list(pair) for pair in seq.pairs]}).data['pairs']


def sequence_from_json(data):
    from .cherry_engine import CherrySequence

    values = validated(SequenceSerializer, {'pairs': data})
    return CherrySequence(tuple((x, y) for x, y in values['pairs']))


def trace_to_json(trace):
    """Lista de pasos {move, enewick_after, labelling_after} validada por TraceStepSerializer"""
    steps = []
    before = trace.start
    for move, after, labelling in zip(trace.moves, trace.networks()[1:], trace.labellings):
        steps.append({
            'move': _move_paths(before, move),
            'enewick_after': write(after),
            'labelling_after': _labelling_paths(after, labelling),
        })
        before = after
    return TraceStepSerializer(steps, many=True).data
