"""
Movimientos rSPR y rNNI: aplicación, validez, inversa y vecindario.

Un movimiento (p, x, c) -> e -> (z, w) sustituye los arcos (p, x), (x, c) y
(z, w) por (p, c), (z, x) y (x, w). El arco e une x con y y no se toca: si e
sale de x el movimiento es de cola, si entra en x es de cabeza.
"""
import logging
from dataclasses import dataclass

import networkx as nx

from .cherry_engine import is_orchard
from .exceptions import InvalidMoveError, MalformedMoveError, MoveError
from .hgt_labelling import verify
from .network_core import PhyloNetwork, canonical_form, inspect_arcs

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class RnniMove:
    p: int
    x: int
    c: int
    e: tuple
    z: int
    w: int

    @property
    def y(self):
        return self.e[1] if self.e[0] == self.x else self.e[0]

    @property
    def kind(self):
        return 'tail' if self.e[0] == self.x else 'head'

    @property
    def is_rnni(self):
        return bool({self.p, self.c} & {self.z, self.w})

    def removed_arcs(self):
        return [(self.p, self.x), (self.x, self.c), (self.z, self.w)]

    def added_arcs(self):
        return [(self.p, self.c), (self.z, self.x), (self.x, self.w)]

    def __str__(self):
        return f"({self.p},{self.x},{self.c})->({self.z},{self.w}) [{self.kind}, e={self.e}]"


def check_roles(net, move):
    """Lanza ``MalformedMoveError`` si los papeles del movimiento no encajan con la red"""
    x = move.x
    if x not in net:
        raise MalformedMoveError(f"El nodo {x} no existe")
    if net.indegree(x) + net.outdegree(x) != 3 or net.indegree(x) == 0 or net.outdegree(x) == 0:
        raise MalformedMoveError(f"El nodo {x} no tiene grado 3")
    if x not in move.e:
        raise MalformedMoveError(f"El arco e={move.e} no es incidente a {x}")
    for arc in [move.e] + move.removed_arcs():
        if not net.has_arc(*arc):
            raise MalformedMoveError(f"El arco {arc} no existe")
    y = move.y
    if move.kind == 'tail':
        if net.parents(x) != [move.p] or sorted(net.children(x)) != sorted({move.c, y}) or move.c == y:
            raise MalformedMoveError(f"Papeles incoherentes para el movimiento de cola en {x}")
    else:
        if net.children(x) != [move.c] or sorted(net.parents(x)) != sorted({move.p, y}) or move.p == y:
            raise MalformedMoveError(f"Papeles incoherentes para el movimiento de cabeza en {x}")
    if x in (move.z, move.w):
        raise MalformedMoveError(f"El arco destino ({move.z}, {move.w}) es incidente a {x}")


def resolve_move(net, p, x, c, e, z, w):
    """Construye un ``RnniMove`` a partir de identificadores de nodo, validando papeles"""
    move = RnniMove(p=p, x=x, c=c, e=tuple(e), z=z, w=w)
    check_roles(net, move)
    return move


def _replaced_arcs(net, move):
    arcs = set(net.arcs)
    arcs.difference_update(move.removed_arcs())
    for arc in move.added_arcs():
        if arc in arcs:
            raise InvalidMoveError('parallel_arc', f"El movimiento crea el arco paralelo {arc}")
        arcs.add(arc)
    return arcs


def apply_rspr(net, move):
    """Aplica un movimiento rSPR y devuelve la red resultante validada"""
    check_roles(net, move)
    arcs = _replaced_arcs(net, move)
    report = inspect_arcs(arcs, net.leaf_labels, nodes=net.nodes)
    if not report.is_valid:
        kinds = report.kinds()
        kind = 'cycle' if 'cycle' in kinds else 'parallel_arc' if 'parallel_arc' in kinds else 'degree'
        raise InvalidMoveError(kind, f"Movimiento inválido ({kind}): {report}")
    result = PhyloNetwork(sorted(arcs), dict(net.leaf_labels), nodes=net.nodes)
    logger.debug(f"Movimiento aplicado {move}")
    return result


def apply_rnni(net, move):
    if not move.is_rnni:
        raise MalformedMoveError(f"{move} no es un movimiento rNNI: {{p,c}} y {{z,w}} son disjuntos")
    return apply_rspr(net, move)


def inverse(move, before):
    """Movimiento que deshace ``move`` sobre la red resultante de aplicarlo a ``before``"""
    apply_rspr(before, move)
    return RnniMove(p=move.z, x=move.x, c=move.w, e=move.e, z=move.p, w=move.c)


def post_move_digraph(net, move):
    """Digrafo tras el movimiento, sin validar; None si aparecerían arcos paralelos"""
    try:
        arcs = _replaced_arcs(net, move)
    except InvalidMoveError:
        return None
    graph = nx.DiGraph()
    graph.add_nodes_from(net.nodes)
    graph.add_edges_from(arcs)
    return graph


def certify_move(net, move, t):
    """Verdadero si ``t`` es un etiquetado HGT-consistente del digrafo resultante"""
    graph = post_move_digraph(net, move)
    if graph is None:
        return False
    return verify(graph, t).is_consistent


def candidate_moves(net):
    """Todos los movimientos rNNI con papeles coherentes (no necesariamente válidos)"""
    for x in net.nodes:
        indeg, outdeg = net.indegree(x), net.outdegree(x)
        if indeg + outdeg != 3 or indeg == 0 or outdeg == 0:
            continue
        if indeg == 1:
            p = net.parents(x)[0]
            contexts = [(p, c, (x, y)) for y in net.children(x) for c in net.children(x) if c != y]
        else:
            c = net.children(x)[0]
            contexts = [(p, c, (y, x)) for y in net.parents(x) for p in net.parents(x) if p != y]
        for p, c, e in contexts:
            targets = set()
            for end in (p, c):
                targets.update((end, child) for child in net.children(end))
                targets.update((parent, end) for parent in net.parents(end))
            for z, w in sorted(targets):
                if x in (z, w):
                    continue
                yield RnniMove(p=p, x=x, c=c, e=e, z=z, w=w)


def rnni_neighbors(net, orchard_only=False):
    """
    Vecinos de ``net`` a un movimiento rNNI, deduplicados por forma canónica,
    con un movimiento representante por clase. Excluye las redes isomorfas a
    ``net``.
    """
    own_key = canonical_form(net)
    seen = {own_key}
    neighbors = []
    for move in candidate_moves(net):
        try:
            result = apply_rnni(net, move)
        except MoveError:
            continue
        key = canonical_form(result)
        if key in seen:
            continue
        seen.add(key)
        if orchard_only and is_orchard(result) is None:
            continue
        neighbors.append((move, result))
    logger.debug(f"{len(neighbors)} vecinos rNNI (orchard_only={orchard_only})")
    return neighbors
