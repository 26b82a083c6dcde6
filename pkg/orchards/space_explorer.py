"""
Exploración exhaustiva del espacio de redes binarias orchard con n hojas y k
reticulaciones bajo movimientos rNNI.

Los vértices se identifican por la forma canónica (isomorfismo que respeta
taxones) y las aristas unen redes a un movimiento rNNI de distancia.
"""
import hashlib
import itertools
import logging
import math
import random
from dataclasses import dataclass, field

import networkx as nx
import pandas as pd

from .canonicalizer import orchard_path, orchard_path_bound
from .cherry_engine import attach_pair, default_taxa, is_orchard, one_leaf_tree
from .enewick_io import write
from .exceptions import BudgetExceededError, DisconnectedSpaceError
from .limits_config import get_limits_config
from .network_core import PhyloNetwork, canonical_form, inspect_arcs
from .rearrangement import rnni_neighbors

logger = logging.getLogger(__name__)


@dataclass
class SpaceGraph:
    n: int
    k: int
    vertices: dict = field(default_factory=dict)
    graph: nx.Graph = field(default_factory=nx.Graph)
    stray_neighbors: int = 0

    def __len__(self):
        return len(self.vertices)

    def __contains__(self, key):
        return key in self.vertices

    def keys(self):
        return sorted(self.vertices)

    def key_of(self, net):
        return canonical_form(net)

    def network(self, key):
        return self.vertices[key]

    @property
    def edge_count(self):
        return self.graph.number_of_edges()


def enumerate_space(n, k, budget=None):
    """
    Todas las redes binarias orchard sobre los taxones x1..xn con k
    reticulaciones, salvo isomorfismo. Recorre en sentido inverso todas las
    secuencias de cherry picking desde los árboles de una hoja, deduplicando
    cada nivel por forma canónica.
    """
    if n < 1 or k < 0:
        raise ValueError('Se requiere n >= 1 y k >= 0')
    budget = get_limits_config().resolve_budget(budget)
    taxa = default_taxa(n)
    if n == 1:
        if k > 0:
            return {}
        net = one_leaf_tree(taxa[0])
        return {canonical_form(net): net}

    frontier = {}
    for taxon in taxa:
        net = one_leaf_tree(taxon)
        frontier[canonical_form(net)] = net

    complete = {}
    explored = 0
    while frontier:
        layer = {}
        for net in frontier.values():
            present = sorted(net.taxa)
            retics = len(net.reticulations)
            steps = []
            if len(present) < n:
                steps.extend((x, y) for x in taxa if x not in net.taxa for y in present)
            if retics < k:
                steps.extend(itertools.permutations(present, 2))
            for x, y in steps:
                child = attach_pair(net, x, y)
                key = canonical_form(child)
                if key in layer or key in complete:
                    continue
                explored += 1
                if len(child.taxa) == n and len(child.reticulations) == k:
                    complete[key] = child
                    if len(complete) > budget:
                        raise BudgetExceededError(
                            budget, f"Orch({n},{k}) supera el presupuesto de {budget} redes"
                        )
                else:
                    layer[key] = child
        frontier = layer

    logger.debug(f"Orch({n},{k}): {len(complete)} redes tras explorar {explored} estados")
    return complete


def build_space(n, k, budget=None):
    """Grafo rNNI sobre Orch(n, k)"""
    vertices = enumerate_space(n, k, budget)
    space = SpaceGraph(n=n, k=k, vertices=vertices)
    space.graph.add_nodes_from(vertices)
    for key, net in vertices.items():
        for _move, neighbor in rnni_neighbors(net, orchard_only=True):
            other = canonical_form(neighbor)
            if other not in vertices:
                space.stray_neighbors += 1
                logger.error(f"Vecino orchard fuera de Orch({n},{k}): {write(neighbor)}")
                continue
            space.graph.add_edge(key, other)
    logger.info(
        f"Espacio Orch({n},{k}) construido: {len(space)} vértices, {space.edge_count} aristas"
    )
    return space


def is_connected(space):
    if len(space) == 0:
        return False
    return nx.is_connected(space.graph)


def diameter(space):
    if len(space) == 0:
        raise DisconnectedSpaceError('El espacio está vacío')
    if len(space) == 1:
        return 0
    if not nx.is_connected(space.graph):
        raise DisconnectedSpaceError(
            f"Orch({space.n},{space.k}) tiene {nx.number_connected_components(space.graph)} componentes"
        )
    return nx.diameter(space.graph)


def reachable_from(space, key):
    return set(nx.node_connected_component(space.graph, key))


def distance(space, source, target):
    """Distancia rNNI entre dos vértices del espacio; None si no están conectados"""
    try:
        return nx.shortest_path_length(space.graph, source, target)
    except nx.NetworkXNoPath:
        return None


def theorem_bound(n, k):
    """Cota superior del diámetro de Orch(n, k)"""
    log_term = math.ceil(math.log2(n)) if n > 1 else 0
    return 4 * k * n + n * log_term + 2 * k + 6 * n - 8


def brute_force_count(n, k):
    """
    Cuenta independiente de |Orch(n, k)|: enumera todos los digrafos con la
    secuencia de grados de una red binaria (padres asignados respetando la
    capacidad de salida de cada nodo), descarta los cíclicos o inválidos,
    deduplica por forma canónica y conserva los que son orchard.
    """
    taxa = default_taxa(n)
    leaves = list(range(1, n + 1))
    tree_nodes = list(range(n + 1, 2 * n + k))
    retics = list(range(2 * n + k, 2 * n + 2 * k))
    labels = dict(zip(leaves, taxa))
    capacity = {0: 1}
    capacity.update({v: 2 for v in tree_nodes})
    capacity.update({v: 1 for v in retics})
    parents_pool = [0] + tree_nodes + retics
    demands = [(v, 1) for v in leaves + tree_nodes] + [(v, 2) for v in retics]

    seen = set()
    orchards = set()
    arcs = []

    def assign(index):
        if index == len(demands):
            yield list(arcs)
            return
        node, count = demands[index]
        candidates = [p for p in parents_pool if p != node and capacity[p] > 0]
        for chosen in itertools.combinations(candidates, count):
            for p in chosen:
                capacity[p] -= 1
                arcs.append((p, node))
            yield from assign(index + 1)
            for p in chosen:
                capacity[p] += 1
                arcs.pop()

    for candidate in assign(0):
        if not inspect_arcs(candidate, labels).is_valid:
            continue
        net = PhyloNetwork(candidate, labels)
        key = canonical_form(net)
        if key in seen:
            continue
        seen.add(key)
        if is_orchard(net) is not None:
            orchards.add(key)
    logger.debug(f"Conteo por fuerza bruta de Orch({n},{k}): {len(orchards)} de {len(seen)} redes binarias")
    return len(orchards)


@dataclass(frozen=True)
class AuditRow:
    source: str
    target: str
    distance: int
    path_length: int
    bound: int
    within_space: bool
    replay_ok: bool
    labels_ok: bool

    @property
    def passed(self):
        return (
            self.within_space and self.replay_ok and self.labels_ok
            and self.distance is not None and self.distance <= self.path_length <= self.bound
        )


@dataclass
class AuditReport:
    rows: list = field(default_factory=list)

    @property
    def passed(self):
        return all(row.passed for row in self.rows)

    def failures(self):
        return [row for row in self.rows if not row.passed]

    def to_frame(self):
        columns = ['source', 'target', 'distance', 'path_length', 'bound', 'within_space', 'replay_ok', 'labels_ok']
        frame = pd.DataFrame([{c: getattr(row, c) for c in columns} for row in self.rows], columns=columns)
        frame['passed'] = [row.passed for row in self.rows]
        return frame


def vertex_id(key):
    return hashlib.sha1(key).hexdigest()


def audit_paths(space, trials=None, seed=None):
    """
    Contrasta ``orchard_path`` con las distancias del grafo: cada camino se
    reproduce movimiento a movimiento, sus redes intermedias pertenecen al
    espacio y su longitud está entre la distancia y la cota. Con ``trials``
    None se auditan todos los pares ordenados.
    """
    keys = space.keys()
    if trials is None:
        pairs = list(itertools.product(keys, repeat=2))
    else:
        rng = random.Random(get_limits_config().default_seed if seed is None else seed)
        pairs = [(rng.choice(keys), rng.choice(keys)) for _ in range(trials)] if keys else []

    report = AuditReport()
    bound = orchard_path_bound(space.n, space.k)
    for source, target in pairs:
        trace = orchard_path(space.network(source), space.network(target))
        within = all(canonical_form(net) in space for net in trace.networks())
        report.rows.append(AuditRow(
            source=vertex_id(source),
            target=vertex_id(target),
            distance=distance(space, source, target),
            path_length=len(trace),
            bound=bound,
            within_space=within,
            replay_ok=trace.replay(),
            labels_ok=trace.labellings_consistent(),
        ))
    failures = report.failures()
    if failures:
        logger.warning(f"Auditoría de caminos: {len(failures)} de {len(report.rows)} pares fallan")
    else:
        logger.info(f"Auditoría de caminos: {len(report.rows)} pares correctos")
    return report


def edges_frame(space):
    rows = sorted(tuple(sorted((vertex_id(a), vertex_id(b)))) for a, b in space.graph.edges)
    return pd.DataFrame(rows, columns=['source', 'target'])


def manifest_frame(space):
    rows = sorted((vertex_id(key), write(net)) for key, net in space.vertices.items())
    return pd.DataFrame(rows, columns=['id', 'enewick'])


def dump_space(space, edges_path=None, manifest_path=None):
    """
    Escribe la lista de aristas (una por línea, dos identificadores SHA-1
    separados por un espacio) y el manifiesto CSV id,enewick.
    """
    if edges_path is not None:
        edges_frame(space).to_csv(edges_path, sep=' ', header=False, index=False)
        logger.info(f"Aristas de Orch({space.n},{space.k}) escritas en {edges_path}")
    if manifest_path is not None:
        manifest_frame(space).to_csv(manifest_path, index=False)
        logger.info(f"Manifiesto de Orch({space.n},{space.k}) escrito en {manifest_path}")


def space_summary(space, with_diameter=False):
    connected = is_connected(space)
    summary = {
        'n': space.n,
        'k': space.k,
        'vertices': len(space),
        'edges': space.edge_count,
        'connected': connected,
        'diameter': None,
        'bound': theorem_bound(space.n, space.k),
    }
    if with_diameter and connected:
        summary['diameter'] = diameter(space)
    return summary
