"""
Modelo de datos de redes filogenéticas enraizadas: validación estructural,
isomorfismo, forma canónica, contracción/supresión y resoluciones binarias.
"""
import itertools
import logging
from dataclasses import dataclass, field
from enum import Enum
from types import MappingProxyType

import networkx as nx

from .exceptions import (
    InvalidNetworkError,
    MissingElementError,
    NetworkError,
    ParallelArcError,
    SuppressionError,
)
from .limits_config import get_limits_config

logger = logging.getLogger(__name__)


class NodeKind(str, Enum):
    ROOT = 'root'
    TREE = 'tree'
    RETICULATION = 'reticulation'
    LEAF = 'leaf'
    INVALID = 'invalid'


class PhyloNetwork:
    """
    Red filogenética inmutable.

    Envuelve un ``nx.DiGraph`` congelado cuyos nodos son enteros estables y
    un mapeo hoja -> taxón. Toda operación que "modifica" la red devuelve una
    red nueva conservando los identificadores de los nodos que sobreviven.
    Los arcos paralelos se rechazan al construir; el resto de invariantes se
    comprueba con ``validate``.
    """

    __slots__ = ('_graph', '_labels', '_by_taxon', '_canonical')

    def __init__(self, arcs, leaf_labels, nodes=None):
        graph = nx.DiGraph()
        if nodes is not None:
            graph.add_nodes_from(nodes)
        for tail, head in arcs:
            if graph.has_edge(tail, head):
                raise ParallelArcError(tail, head)
            graph.add_edge(tail, head)
        graph.add_nodes_from(leaf_labels)
        self._graph = nx.freeze(graph)
        self._labels = dict(leaf_labels)
        self._by_taxon = {taxon: node for node, taxon in self._labels.items()}
        self._canonical = None

    @classmethod
    def from_arcs(cls, arcs, leaf_labels, nodes=None, check=True):
        """Construye la red y, si ``check``, exige que sea una red válida"""
        net = cls(arcs, leaf_labels, nodes=nodes)
        if check:
            report = validate(net)
            if not report.is_valid:
                raise InvalidNetworkError(report)
        return net

    # Acceso básico

    @property
    def graph(self):
        return self._graph

    @property
    def leaf_labels(self):
        return MappingProxyType(self._labels)

    @property
    def nodes(self):
        return sorted(self._graph.nodes)

    @property
    def arcs(self):
        return sorted(self._graph.edges)

    @property
    def taxa(self):
        return frozenset(self._by_taxon)

    def __len__(self):
        return self._graph.number_of_nodes()

    def __contains__(self, node):
        return node in self._graph

    def __eq__(self, other):
        if not isinstance(other, PhyloNetwork):
            return NotImplemented
        return (
            set(self._graph.nodes) == set(other._graph.nodes)
            and set(self._graph.edges) == set(other._graph.edges)
            and self._labels == other._labels
        )

    def __hash__(self):
        return hash((frozenset(self._graph.edges), frozenset(self._labels.items())))

    def __repr__(self):
        return (
            f"PhyloNetwork(nodes={len(self)}, arcs={self._graph.number_of_edges()}, "
            f"taxa={sorted(self.taxa)})"
        )

    def has_arc(self, tail, head):
        return self._graph.has_edge(tail, head)

    def parents(self, node):
        self._require(node)
        return sorted(self._graph.predecessors(node))

    def children(self, node):
        self._require(node)
        return sorted(self._graph.successors(node))

    def indegree(self, node):
        return self._graph.in_degree(node)

    def outdegree(self, node):
        return self._graph.out_degree(node)

    def kind(self, node):
        self._require(node)
        indeg = self._graph.in_degree(node)
        outdeg = self._graph.out_degree(node)
        if indeg == 0:
            return NodeKind.ROOT
        if outdeg == 0:
            return NodeKind.LEAF
        if indeg == 1 and outdeg >= 2:
            return NodeKind.TREE
        if indeg >= 2 and outdeg == 1:
            return NodeKind.RETICULATION
        return NodeKind.INVALID

    @property
    def root(self):
        roots = [v for v in self._graph.nodes if self._graph.in_degree(v) == 0]
        if len(roots) != 1:
            raise NetworkError(f"Se esperaba una raíz, hay {len(roots)}")
        return roots[0]

    @property
    def root_child(self):
        return self.children(self.root)[0]

    @property
    def leaves(self):
        return sorted(v for v in self._graph.nodes if self._graph.out_degree(v) == 0)

    @property
    def reticulations(self):
        return sorted(v for v in self._graph.nodes if self._graph.in_degree(v) >= 2)

    @property
    def tree_nodes(self):
        return sorted(v for v in self._graph.nodes if self.kind(v) == NodeKind.TREE)

    def node_of(self, taxon):
        try:
            return self._by_taxon[taxon]
        except KeyError:
            raise MissingElementError(f"Taxón no presente: {taxon}") from None

    def taxon_of(self, node):
        return self._labels.get(node)

    def descendants(self, node):
        return nx.descendants(self._graph, node)

    def ancestors(self, node):
        return nx.ancestors(self._graph, node)

    def topological_order(self):
        return list(nx.lexicographical_topological_sort(self._graph))

    def next_node_id(self):
        return max(self._graph.nodes, default=-1) + 1

    # Construcción de redes derivadas

    def edit(self, remove_arcs=(), add_arcs=(), remove_nodes=(), add_labels=None):
        """
        Devuelve una red nueva con los cambios indicados.
        Los nodos eliminados pierden también sus arcos y etiquetas.
        """
        dropped = set(remove_nodes)
        removed = set(remove_arcs)
        for arc in removed:
            if not self._graph.has_edge(*arc):
                raise MissingElementError(f"Arco inexistente: {arc}")
        arcs = [
            arc for arc in self._graph.edges
            if arc not in removed and arc[0] not in dropped and arc[1] not in dropped
        ]
        arcs.extend(add_arcs)
        labels = {v: t for v, t in self._labels.items() if v not in dropped}
        if add_labels:
            labels.update(add_labels)
        nodes = [v for v in self._graph.nodes if v not in dropped]
        for tail, head in add_arcs:
            nodes.extend((tail, head))
        return PhyloNetwork(arcs, labels, nodes=nodes)

    def relabel_ids(self, mapping):
        """Renombra identificadores de nodo; los no mapeados se conservan"""
        def rename(v):
            return mapping.get(v, v)
        return PhyloNetwork(
            [(rename(u), rename(v)) for u, v in self._graph.edges],
            {rename(v): t for v, t in self._labels.items()},
            nodes=[rename(v) for v in self._graph.nodes],
        )

    def _require(self, node):
        if node not in self._graph:
            raise MissingElementError(f"Nodo inexistente: {node}")


# Validación

@dataclass(frozen=True)
class Violation:
    kind: str
    message: str
    nodes: tuple = ()

    def __str__(self):
        return f"[{self.kind}] {self.message}"


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple = ()

    @property
    def is_valid(self):
        return not self.violations

    def kinds(self):
        return sorted({v.kind for v in self.violations})

    def __str__(self):
        if self.is_valid:
            return 'red válida'
        return '; '.join(str(v) for v in self.violations)


def inspect_arcs(arcs, leaf_labels, nodes=None):
    """
    Valida una colección cruda de nodos y arcos que aún puede contener
    arcos paralelos. Devuelve un ``ValidationReport`` con todas las faltas.
    """
    violations = []
    arcs = list(arcs)
    seen = set()
    for arc in arcs:
        if arc in seen:
            violations.append(Violation('parallel_arc', f"Arco paralelo {arc}", arc))
        seen.add(arc)

    graph = nx.DiGraph()
    if nodes is not None:
        graph.add_nodes_from(nodes)
    graph.add_nodes_from(leaf_labels)
    graph.add_edges_from(arcs)
    violations.extend(_structural_violations(graph, dict(leaf_labels)))
    return ValidationReport(tuple(violations))


def validate(net):
    """Lista todas las invariantes violadas; informe vacío si es una red filogenética"""
    return ValidationReport(tuple(_structural_violations(net.graph, dict(net.leaf_labels))))


def _structural_violations(graph, labels):
    violations = []
    if graph.number_of_nodes() == 0:
        return [Violation('root', 'Grafo vacío')]

    roots = sorted(v for v in graph.nodes if graph.in_degree(v) == 0)
    if len(roots) != 1:
        violations.append(Violation('root', f"Se esperaba exactamente una raíz, hay {len(roots)}", tuple(roots)))
    for root in roots:
        if graph.out_degree(root) != 1:
            violations.append(Violation('degree', f"La raíz {root} debe tener grado de salida 1", (root,)))

    for v in sorted(graph.nodes):
        indeg, outdeg = graph.in_degree(v), graph.out_degree(v)
        if indeg == 0:
            continue
        if outdeg == 0:
            if indeg != 1:
                violations.append(Violation('degree', f"La hoja {v} tiene grado de entrada {indeg}", (v,)))
            if v not in labels:
                violations.append(Violation('label', f"La hoja {v} no tiene taxón", (v,)))
        elif not ((indeg == 1 and outdeg >= 2) or (indeg >= 2 and outdeg == 1)):
            violations.append(Violation(
                'degree', f"El nodo {v} (entrada {indeg}, salida {outdeg}) no es de árbol ni reticulación", (v,)
            ))

    for v, taxon in sorted(labels.items(), key=lambda item: str(item[0])):
        if v in graph and graph.out_degree(v) != 0:
            violations.append(Violation('label', f"El nodo etiquetado {v} ({taxon}) no es hoja", (v,)))
    taxa = list(labels.values())
    duplicated = sorted({t for t in taxa if taxa.count(t) > 1})
    for taxon in duplicated:
        violations.append(Violation('label', f"Taxón repetido: {taxon}"))

    if not nx.is_directed_acyclic_graph(graph):
        cycle = nx.find_cycle(graph)
        violations.append(Violation('cycle', f"Ciclo dirigido {cycle}", tuple(u for u, _ in cycle)))
    return violations


# Propiedades numéricas

@dataclass(frozen=True)
class NodeKindSummary:
    n_leaves: int
    n_reticulations: int
    reticulation_number: int
    is_binary: bool


def is_binary(net):
    """Verdadero si todo nodo de árbol y toda reticulación tiene grado total 3"""
    graph = net.graph
    for v in graph.nodes:
        indeg, outdeg = graph.in_degree(v), graph.out_degree(v)
        if indeg == 0 or outdeg == 0:
            continue
        if indeg + outdeg != 3:
            return False
    return True


def reticulation_number(net):
    graph = net.graph
    return sum(graph.in_degree(v) - 1 for v in graph.nodes if graph.in_degree(v) >= 2)


def summary(net):
    return NodeKindSummary(
        n_leaves=len(net.leaves),
        n_reticulations=len(net.reticulations),
        reticulation_number=reticulation_number(net),
        is_binary=is_binary(net),
    )


# Isomorfismo y forma canónica

def _attributed(net):
    graph = nx.DiGraph(net.graph)
    for v in graph.nodes:
        graph.nodes[v]['taxon'] = net.taxon_of(v)
    return graph


def _same_taxon(a, b):
    return a.get('taxon') == b.get('taxon')


def isomorphism_mapping(a, b):
    """Devuelve un isomorfismo (nodo de a -> nodo de b) que respeta taxones, o None"""
    if a.taxa != b.taxa or len(a) != len(b) or len(a.arcs) != len(b.arcs):
        return None
    matcher = nx.algorithms.isomorphism.DiGraphMatcher(
        _attributed(a), _attributed(b), node_match=_same_taxon
    )
    if matcher.is_isomorphic():
        return dict(matcher.mapping)
    return None


def are_isomorphic(a, b):
    if a.taxa != b.taxa or len(a) != len(b) or len(a.arcs) != len(b.arcs):
        return False
    return nx.is_isomorphic(_attributed(a), _attributed(b), node_match=_same_taxon)


def _refine(graph, colors):
    # Refinamiento de colores iterado; los rangos dependen solo de los colores
    while True:
        signatures = {
            v: (
                colors[v],
                tuple(sorted(colors[c] for c in graph.successors(v))),
                tuple(sorted(colors[p] for p in graph.predecessors(v))),
            )
            for v in graph.nodes
        }
        ranks = {sig: i for i, sig in enumerate(sorted(set(signatures.values())))}
        refined = {v: ranks[signatures[v]] for v in graph.nodes}
        if len(ranks) == len(set(colors.values())):
            return refined
        colors = refined


def _certificate(graph, labels, colors):
    return (
        graph.number_of_nodes(),
        tuple(sorted((colors[u], colors[v]) for u, v in graph.edges)),
        tuple(sorted((colors[v], taxon) for v, taxon in labels.items())),
    )


def _canonical_search(graph, labels, colors):
    colors = _refine(graph, colors)
    classes = {}
    for v, color in colors.items():
        classes.setdefault(color, []).append(v)
    ambiguous = sorted(color for color, members in classes.items() if len(members) > 1)
    if not ambiguous:
        return _certificate(graph, labels, colors)

    best = None
    for v in sorted(classes[ambiguous[0]]):
        individualized = {u: (c, 0 if u == v else 1) for u, c in colors.items()}
        candidate = _canonical_search(graph, labels, individualized)
        if best is None or candidate < best:
            best = candidate
    return best


def canonical_form(net):
    """
    Clave canónica (bytes): igual para dos redes si y solo si son isomorfas
    respetando taxones. Refinamiento de colores sembrado por las hojas con
    individualización y retroceso en los empates.
    """
    if net._canonical is None:
        graph = net.graph
        labels = dict(net.leaf_labels)
        seeds = {
            v: (graph.in_degree(v), graph.out_degree(v), labels.get(v, ''))
            for v in graph.nodes
        }
        ranks = {seed: i for i, seed in enumerate(sorted(set(seeds.values())))}
        colors = {v: ranks[seeds[v]] for v in graph.nodes}
        net._canonical = repr(_canonical_search(graph, labels, colors)).encode()
    return net._canonical


# Contracción y supresión

def contract_arc(net, arc):
    """
    Borra el arco (u, v) e identifica u y v en el nodo u.
    Si v era una hoja, u hereda su taxón.
    """
    u, v = arc
    if not net.has_arc(u, v):
        raise MissingElementError(f"Arco inexistente: {arc}")
    arcs = []
    for tail, head in net.arcs:
        if (tail, head) == (u, v):
            continue
        tail = u if tail == v else tail
        head = u if head == v else head
        arcs.append((tail, head))
    labels = {node: t for node, t in net.leaf_labels.items() if node != v}
    if net.taxon_of(v) is not None:
        labels[u] = net.taxon_of(v)
    nodes = [node for node in net.nodes if node != v]
    return PhyloNetwork(arcs, labels, nodes=nodes)


def suppress_node(net, node):
    """Suprime un nodo de entrada 1 y salida 1 uniendo su padre con su hijo"""
    if node not in net:
        raise MissingElementError(f"Nodo inexistente: {node}")
    if net.indegree(node) != 1 or net.outdegree(node) != 1:
        raise SuppressionError(f"El nodo {node} no tiene entrada 1 y salida 1")
    parent = net.parents(node)[0]
    child = net.children(node)[0]
    if net.has_arc(parent, child):
        raise SuppressionError(f"Suprimir {node} crearía el arco paralelo ({parent}, {child})")
    return net.edit(remove_nodes=[node], add_arcs=[(parent, child)])


def suppress_all(net, candidates):
    """Suprime, en orden, los candidatos que queden con entrada 1 y salida 1"""
    for node in candidates:
        if node in net and net.indegree(node) == 1 and net.outdegree(node) == 1:
            net = suppress_node(net, node)
    return net


# Resoluciones binarias

@dataclass(frozen=True)
class ResolutionSet:
    networks: tuple = field(default_factory=tuple)
    truncated: bool = False

    def __iter__(self):
        return iter(self.networks)

    def __len__(self):
        return len(self.networks)


def _binary_shapes(items):
    """Todos los árboles binarios enraizados con hojas ``items`` (tuplas anidadas)"""
    if len(items) == 1:
        yield items[0]
        return
    first, rest = items[0], items[1:]
    for size in range(0, len(rest)):
        for picked in itertools.combinations(rest, size):
            left = (first,) + picked
            right = tuple(x for x in rest if x not in picked)
            for left_shape in _binary_shapes(left):
                for right_shape in _binary_shapes(right):
                    yield (left_shape, right_shape)


def _expand(node, shape, direction, next_id, arcs, endpoints):
    """
    Sustituye ``node`` por el árbol binario ``shape``. Los arcos originales
    de ``node`` solo cambian de extremo en ``endpoints``; los arcos internos
    nuevos van a ``arcs``.
    """
    def place(sub, anchor):
        nonlocal next_id
        if not isinstance(sub, tuple):
            if direction == 'out':
                endpoints[(node, sub)][0] = anchor
            else:
                endpoints[(sub, node)][1] = anchor
            return
        created = next_id
        next_id += 1
        arcs.append((anchor, created) if direction == 'out' else (created, anchor))
        for part in sub:
            place(part, created)

    for part in shape:
        place(part, node)
    return next_id


def binary_resolutions(net, limit=None):
    """
    Enumera las resoluciones binarias de ``net`` (redes binarias que se
    contraen a ``net``), deduplicadas por forma canónica. Si el número de
    combinaciones supera ``limit`` se devuelve un conjunto truncado.
    """
    if limit is None:
        limit = get_limits_config().resolution_limit
    if is_binary(net):
        return ResolutionSet((net,), False)

    options = []
    for v in net.nodes:
        indeg, outdeg = net.indegree(v), net.outdegree(v)
        if indeg >= 1 and outdeg >= 3:
            options.append((v, 'out', list(_binary_shapes(tuple(net.children(v))))))
        elif indeg >= 3 and outdeg == 1:
            options.append((v, 'in', list(_binary_shapes(tuple(net.parents(v))))))

    total = 1
    for _, direction, shapes in options:
        total *= len(shapes)
    truncated = total > limit
    if truncated:
        logger.warning(f"Resoluciones binarias truncadas: {total} combinaciones, límite {limit}")

    found = {}
    for count, choice in enumerate(itertools.product(*(shapes for _, _, shapes in options))):
        if count >= limit:
            break
        # Cada arco original se emite una sola vez aunque sus dos extremos se resuelvan
        endpoints = {arc: list(arc) for arc in net.arcs}
        arcs = []
        next_id = net.next_node_id()
        for (v, direction, _), shape in zip(options, choice):
            next_id = _expand(v, shape, direction, next_id, arcs, endpoints)
        arcs.extend(tuple(ends) for ends in endpoints.values())
        resolved = PhyloNetwork(arcs, dict(net.leaf_labels))
        found.setdefault(canonical_form(resolved), resolved)

    logger.debug(f"{len(found)} resoluciones binarias distintas de {min(total, limit)} combinaciones")
    return ResolutionSet(tuple(found[key] for key in sorted(found)), truncated)


def resolving_arcs(resolution, net):
    """
    Arcos añadidos al resolver ``net``: entran en un nodo nuevo de entrada 1
    o salen de un nodo nuevo de salida 1.
    """
    original = set(net.nodes)
    return [
        (u, v) for u, v in resolution.arcs
        if (v not in original and resolution.indegree(v) == 1)
        or (u not in original and resolution.outdegree(u) == 1)
    ]


def contract_resolution(resolution, net):
    """Contrae los arcos de resolución uno a uno; el resultado es isomorfo a ``net``"""
    original = set(net.nodes)
    current = resolution
    while True:
        pending = resolving_arcs(current, net)
        if not pending:
            return current
        u, v = pending[0]
        current = contract_arc(current, (u, v))
        if u not in original:
            current = current.relabel_ids({u: v})
