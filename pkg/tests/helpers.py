"""
Utilidades compartidas por los tests: redes a partir de arcos con nombre y
carga de las redes de ejemplo.
"""
from pathlib import Path

from django.conf import settings

from orchards.enewick_io import parse
from orchards.network_core import PhyloNetwork

FIXTURES_DIR = Path(settings.BASE_DIR) / 'orchards' / 'fixtures' / 'networks'

# Orientación de reticulaciones: N antes de los dos movimientos
ORIENTATION_ARCS = [
    ('root', 'v_rho'),
    ('v_rho', 'a1'), ('v_rho', 'b1'),
    ('a1', 'b1'), ('a1', 'a2'),
    ('b1', 'b2'),
    ('a2', 'b2'), ('a2', 'a3'),
    ('b2', 'b3'),
    ('b3', 'b4'), ('b3', 'a3'),
    ('a3', 'a4'),
    ('a4', 'a'), ('a4', 'b4'),
    ('b4', 'b'),
]

# Triángulo bajo un nodo de árbol q sin reticulaciones superiores
TRIANGLE_ARCS = [
    ('root', 'q'),
    ('q', 'w'), ('q', 'c'),
    ('w', 'p'), ('w', 'r'),
    ('p', 'r'), ('p', 'a'),
    ('r', 'b'),
]

# Triángulo bajo la cabeza y1 de un arco horizontal superior
UPPER_TRIANGLE_ARCS = [
    ('root', 'v_rho'),
    ('v_rho', 'x1'), ('v_rho', 'y1'),
    ('x1', 'y1'), ('x1', 'a'),
    ('y1', 'w'),
    ('w', 'p'), ('w', 'r'),
    ('p', 'r'), ('p', 'b'),
    ('r', 'c'),
]

# Igual que la anterior pero con w bajo la cola x1 (nodo de árbol)
UPPER_TRIANGLE_TREE_PARENT_ARCS = [
    ('root', 'v_rho'),
    ('v_rho', 'x1'), ('v_rho', 'y1'),
    ('x1', 'y1'), ('x1', 'w'),
    ('y1', 'a'),
    ('w', 'p'), ('w', 'r'),
    ('p', 'r'), ('p', 'b'),
    ('r', 'c'),
]

# Corona con un nodo de árbol adicional sobre las dos reticulaciones
CROWN_ARCS = [
    ('root', 'top'),
    ('top', 'A'), ('top', 'B'),
    ('A', 'H1'), ('A', 'H2'),
    ('B', 'H1'), ('B', 'H2'),
    ('H1', 'a'), ('H2', 'b'),
]

# Nodo u de salida 3 con arco directo a la reticulación v de entrada 3
SHARED_ARC_ARCS = [
    ('root', 'u'),
    ('u', 'v'), ('u', 'm'), ('u', 'q'),
    ('m', 'v'), ('m', 'b'),
    ('q', 'v'), ('q', 'c'),
    ('v', 'd'),
]

THIRTEEN_LEAF_SEQUENCE = [
    ('1', '2'), ('3', '4'), ('2', '4'), ('5', '6'), ('4', '6'), ('7', '8'), ('9', '8'),
    ('10', '6'), ('6', '8'), ('8', '9'), ('9', '10'), ('11', '12'), ('12', '13'), ('10', '13'),
]

def named_network(arcs, root='root'):
    """
    Construye una red a partir de arcos entre nombres. Los nodos sin hijos
    son hojas con su propio nombre como taxón. Devuelve (red, ids).
    """
    ids = {root: 0}
    for tail, head in arcs:
        for name in (tail, head):
            if name not in ids:
                ids[name] = len(ids)
    tails = {tail for tail, _ in arcs}
    labels = {ids[name]: name for name in ids if name not in tails}
    net = PhyloNetwork([(ids[tail], ids[head]) for tail, head in arcs], labels)
    return net, ids

def fixture_path(name):
    return str(FIXTURES_DIR / name)

def load_fixture(name):
    return parse((FIXTURES_DIR / name).read_text(encoding='utf-8'))
