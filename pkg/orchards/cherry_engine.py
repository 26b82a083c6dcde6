"""
Cherry picking: detección y reducción de pares reducibles, reconocimiento de
redes orchard, reconstrucción desde secuencias y generación aleatoria.
"""
import logging
import random
from dataclasses import dataclass
from enum import Enum

from .exceptions import (
    MalformedSequenceError,
    ResolutionLimitExceeded,
    UnknownTaxonError,
)
from .network_core import (
    PhyloNetwork,
    binary_resolutions,
    canonical_form,
    suppress_all,
    validate,
)

logger = logging.getLogger(__name__)


class PairKind(str, Enum):
    CHERRY = 'cherry'
    RETICULATED_CHERRY = 'reticulated_cherry'


@dataclass(frozen=True)
class ReduciblePair:
    x: str
    y: str
    kind: PairKind


@dataclass(frozen=True)
class CherrySequence:
    """Secuencia ordenada de pares (x, y); el último y es el taxón superviviente"""
    pairs: tuple = ()

    def __len__(self):
        return len(self.pairs)

    def __iter__(self):
        return iter(self.pairs)

    @property
    def survivor(self):
        return self.pairs[-1][1] if self.pairs else None

    def __str__(self):
        return ''.join(f"({x},{y})" for x, y in self.pairs)


def is_one_leaf_tree(net):
    return len(net) == 2 and len(net.leaves) == 1


def _leaf_children(net, node):
    return [c for c in net.children(node) if net.outdegree(c) == 0]


def find_reducible_pairs(net):
    """Todos los pares reducibles de ``net`` ordenados lexicográficamente por (x, y)"""
    pairs = []
    for x_leaf in net.leaves:
        x = net.taxon_of(x_leaf)
        p_x = net.parents(x_leaf)[0]
        for y_leaf in _leaf_children(net, p_x):
            if y_leaf != x_leaf:
                pairs.append(ReduciblePair(x, net.taxon_of(y_leaf), PairKind.CHERRY))
        if net.indegree(p_x) >= 2:
            for p_y in net.parents(p_x):
                for y_leaf in _leaf_children(net, p_y):
                    pairs.append(ReduciblePair(x, net.taxon_of(y_leaf), PairKind.RETICULATED_CHERRY))
    return sorted(pairs, key=lambda pair: (pair.x, pair.y))


def pair_kind(net, x, y):
    """Tipo del par (x, y) en ``net`` o None si no es reducible"""
    for taxon in (x, y):
        if taxon not in net.taxa:
            raise UnknownTaxonError(taxon)
    if x == y:
        return None
    x_leaf, y_leaf = net.node_of(x), net.node_of(y)
    p_x = net.parents(x_leaf)[0]
    p_y = net.parents(y_leaf)[0]
    if p_x == p_y:
        return PairKind.CHERRY
    if net.indegree(p_x) >= 2 and net.has_arc(p_y, p_x):
        return PairKind.RETICULATED_CHERRY
    return None


def reduce_pair(net, x, y):
    """
    Reduce el par (x, y):
    - cherry: borra x y suprime p_x si queda con entrada 1 y salida 1;
    - cherry reticulado: borra el arco (p_y, p_x) y suprime p_x y p_y si
      quedan con entrada 1 y salida 1;
    - en otro caso devuelve la misma red.
    """
    kind = pair_kind(net, x, y)
    if kind is None:
        return net
    x_leaf, y_leaf = net.node_of(x), net.node_of(y)
    p_x = net.parents(x_leaf)[0]
    p_y = net.parents(y_leaf)[0]
    if kind == PairKind.CHERRY:
        reduced = net.edit(remove_nodes=[x_leaf])
        reduced = suppress_all(reduced, [p_x])
    else:
        reduced = net.edit(remove_arcs=[(p_y, p_x)])
        reduced = suppress_all(reduced, [p_x, p_y])
    logger.debug(f"Reducido {kind.value} ({x},{y}): {len(net.arcs)} -> {len(reduced.arcs)} arcos")
    return reduced


def apply_sequence(net, seq):
    for x, y in seq:
        net = reduce_pair(net, x, y)
    return net


def reduction_trace(net, seq):
    """Redes intermedias de la reducción, incluida la inicial"""
    networks = [net]
    for x, y in seq:
        networks.append(reduce_pair(networks[-1], x, y))
    return networks


def is_orchard(net):
    """
    Devuelve una ``CherrySequence`` que reduce ``net`` a un árbol de una hoja,
    o None si la red no es orchard. Elige siempre el primer par reducible.
    """
    pairs = []
    while not is_one_leaf_tree(net):
        candidates = find_reducible_pairs(net)
        if not candidates:
            logger.debug(f"Sin pares reducibles tras {len(pairs)} reducciones")
            return None
        pair = candidates[0]
        net = reduce_pair(net, pair.x, pair.y)
        pairs.append((pair.x, pair.y))
    return CherrySequence(tuple(pairs))


def all_orders_reduce(net):
    """Verdadero si toda elección de pares reducibles termina en un árbol de una hoja"""
    memo = {}

    def explore(current):
        key = canonical_form(current)
        if key in memo:
            return memo[key]
        if is_one_leaf_tree(current):
            memo[key] = True
            return True
        candidates = find_reducible_pairs(current)
        result = bool(candidates) and all(
            explore(reduce_pair(current, pair.x, pair.y)) for pair in candidates
        )
        memo[key] = result
        return result

    return explore(net)


def is_orchard_nonbinary_via_resolutions(net, limit=None):
    """Verdadero si alguna resolución binaria de ``net`` es orchard"""
    resolutions = binary_resolutions(net, limit)
    for resolution in resolutions:
        if is_orchard(resolution) is not None:
            return True
    if resolutions.truncated:
        raise ResolutionLimitExceeded(
            f"Ninguna de las {len(resolutions)} resoluciones enumeradas es orchard y la enumeración fue truncada"
        )
    return False


def reconstruct(seq, full_taxa=None, survivor=None):
    """
    Reconstruye la red binaria orchard que ``seq`` reduce, partiendo del árbol
    de una hoja sobre el superviviente y reinsertando los pares en orden inverso.
    """
    pairs = list(seq.pairs)
    last = seq.survivor if pairs else survivor
    if last is None:
        raise MalformedSequenceError('Secuencia vacía sin taxón superviviente')
    if survivor is not None and survivor != last:
        raise MalformedSequenceError(f"El superviviente {survivor} no coincide con y_m={last}")

    net = one_leaf_tree(last)
    for x, y in reversed(pairs):
        net = attach_pair(net, x, y)

    if full_taxa is not None and set(full_taxa) != set(net.taxa):
        raise MalformedSequenceError(
            f"La secuencia introduce {sorted(net.taxa)} y se esperaban {sorted(full_taxa)}"
        )
    return net


def one_leaf_tree(taxon):
    return PhyloNetwork([(0, 1)], {1: taxon})


def attach_pair(net, x, y):
    """
    Operación inversa de reducir (x, y): si x es nuevo, subdivide el arco que
    entra en y y cuelga x del nodo nuevo; si x ya existe, subdivide los arcos
    que entran en y y en x y une ambos nodos nuevos con el arco (p_y, p_x).
    """
    if x == y:
        raise MalformedSequenceError(f"Par con taxones repetidos: ({x},{y})")
    if y not in net.taxa:
        raise MalformedSequenceError(f"El taxón {y} se usa antes de ser introducido")
    y_leaf = net.node_of(y)
    g_y = net.parents(y_leaf)[0]
    p_y = net.next_node_id()
    if x not in net.taxa:
        leaf = p_y + 1
        return net.edit(
            remove_arcs=[(g_y, y_leaf)],
            add_arcs=[(g_y, p_y), (p_y, y_leaf), (p_y, leaf)],
            add_labels={leaf: x},
        )
    x_leaf = net.node_of(x)
    g_x = net.parents(x_leaf)[0]
    p_x = p_y + 1
    return net.edit(
        remove_arcs=[(g_y, y_leaf), (g_x, x_leaf)],
        add_arcs=[(g_y, p_y), (p_y, y_leaf), (g_x, p_x), (p_x, x_leaf), (p_y, p_x)],
    )


def default_taxa(n):
    return [f"x{i}" for i in range(1, n + 1)]


def random_sequence(n, k, rng, taxa=None):
    """Secuencia aleatoria que reconstruye una red binaria orchard con n hojas y k reticulaciones"""
    if n < 1 or k < 0:
        raise ValueError('Se requiere n >= 1 y k >= 0')
    if n == 1 and k > 0:
        raise ValueError('Una red de una hoja no admite reticulaciones')
    taxa = list(taxa or default_taxa(n))
    rng.shuffle(taxa)
    if n == 1:
        return CherrySequence(()), taxa[0]

    steps = ['leaf'] * (n - 2) + ['reticulation'] * k
    rng.shuffle(steps)
    steps.insert(0, 'leaf')

    present = [taxa[0]]
    pending = taxa[1:]
    reversed_pairs = []
    for step in steps:
        if step == 'leaf':
            x = pending.pop(0)
            y = rng.choice(present)
            present.append(x)
        else:
            x, y = rng.sample(present, 2)
        reversed_pairs.append((x, y))
    return CherrySequence(tuple(reversed(reversed_pairs))), taxa[0]


def random_orchard(n, k, seed=None):
    """Red binaria orchard aleatoria, determinista para una semilla fija"""
    rng = random.Random(seed)
    seq, survivor = random_sequence(n, k, rng)
    return reconstruct(seq, survivor=survivor)


def random_network(n, k, seed=None, max_attempts=1000):
    """
    Red binaria aleatoria, no necesariamente orchard: árbol aleatorio más k
    arcos entre puntos de subdivisión de arcos distintos.
    """
    if n == 1 and k > 0:
        raise ValueError('Una red de una hoja no admite reticulaciones')
    rng = random.Random(seed)
    net = random_orchard(n, 0, rng.randrange(1 << 30))
    added = 0
    attempts = 0
    while added < k:
        attempts += 1
        if attempts > max_attempts:
            raise ValueError(f"No se pudo insertar la reticulación {added + 1} tras {max_attempts} intentos")
        source, target = rng.sample(net.arcs, 2)
        a = net.next_node_id()
        b = a + 1
        candidate = net.edit(
            remove_arcs=[source, target],
            add_arcs=[(source[0], a), (a, source[1]), (target[0], b), (b, target[1]), (a, b)],
        )
        if validate(candidate).is_valid:
            net = candidate
            added += 1
    return net
