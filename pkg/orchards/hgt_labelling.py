"""
Etiquetados HGT-consistentes: verificación sobre digrafos de grado acotado,
construcción a partir de secuencias de cherry picking, árbol base, coronas
y la regla ingenua para redes no binarias.
"""
import itertools
import logging
from dataclasses import dataclass
from fractions import Fraction

import networkx as nx

from .cherry_engine import is_orchard, reduction_trace
from .exceptions import LabellingError, NotBinaryError, OracleTooLargeError
from .limits_config import get_limits_config
from .network_core import PhyloNetwork, is_binary, suppress_all

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class LabellingViolation:
    rule: str
    message: str
    nodes: tuple = ()

    def __str__(self):
        return f"[{self.rule}] {self.message}"


@dataclass(frozen=True)
class VerifyReport:
    violations: tuple = ()

    @property
    def is_consistent(self):
        return not self.violations

    def rules(self):
        return sorted({v.rule for v in self.violations})

    def __str__(self):
        if self.is_consistent:
            return 'etiquetado HGT-consistente'
        return '; '.join(str(v) for v in self.violations)


def _digraph(graph):
    if isinstance(graph, PhyloNetwork):
        return graph.graph
    return graph


def verify(graph, t):
    """
    Comprueba las tres propiedades de un etiquetado HGT-consistente:
    1. t(u) <= t(v) en todo arco, con igualdad solo hacia reticulaciones.
    2. Todo nodo con hijos tiene un hijo estrictamente posterior.
    3. Toda reticulación coincide en etiqueta con exactamente uno de sus padres.
    """
    digraph = _digraph(graph)
    missing = [v for v in digraph.nodes if v not in t]
    if missing:
        raise LabellingError(f"Etiquetado no total, faltan los nodos {sorted(missing)}")

    violations = []
    for u, v in sorted(digraph.edges):
        if t[u] > t[v]:
            violations.append(LabellingViolation('property1', f"t({u}) > t({v}) en el arco ({u}, {v})", (u, v)))
        elif t[u] == t[v] and digraph.in_degree(v) < 2:
            violations.append(LabellingViolation(
                'property1', f"Igualdad en el arco ({u}, {v}) hacia un nodo que no es reticulación", (u, v)
            ))
    for u in sorted(digraph.nodes):
        children = list(digraph.successors(u))
        if children and not any(t[u] < t[c] for c in children):
            violations.append(LabellingViolation('property2', f"El nodo {u} no tiene un hijo posterior", (u,)))
    for r in sorted(digraph.nodes):
        parents = list(digraph.predecessors(r))
        if len(parents) < 2:
            continue
        tied = [p for p in parents if t[p] == t[r]]
        if len(tied) != 1:
            violations.append(LabellingViolation(
                'property3', f"La reticulación {r} coincide con {len(tied)} padres", (r,)
            ))
    return VerifyReport(tuple(violations))


def construct(net):
    """
    Etiquetado HGT-consistente obtenido de la secuencia de ``is_orchard``, o
    None si la red no es orchard. Con m pares: t(raíz)=0, la j-ésima hoja
    (por taxón) recibe m+j y los nodos internos que desaparecen al reducir el
    i-ésimo par reciben m+1-i.
    """
    if not is_binary(net):
        raise NotBinaryError('construct requiere una red binaria')
    seq = is_orchard(net)
    if seq is None:
        return None
    m = len(seq)
    leaves = set(net.leaves)
    t = {net.root: Fraction(0)}
    for j, taxon in enumerate(sorted(net.taxa), start=1):
        t[net.node_of(taxon)] = Fraction(m + j)
    networks = reduction_trace(net, seq)
    for i, (before, after) in enumerate(zip(networks, networks[1:]), start=1):
        for v in set(before.nodes) - set(after.nodes) - leaves:
            t[v] = Fraction(m + 1 - i)
    unlabelled = set(net.nodes) - set(t)
    if unlabelled:
        raise LabellingError(f"Nodos sin etiqueta tras la reducción: {sorted(unlabelled)}")
    return t


def exists_labelling(net):
    return is_orchard(net) is not None


def tied_pairs(net, t):
    """Pares de nodos distintos con la misma etiqueta"""
    groups = {}
    for v in net.nodes:
        groups.setdefault(t[v], []).append(v)
    return sorted(
        pair for members in groups.values() if len(members) > 1
        for pair in itertools.combinations(sorted(members), 2)
    )


def horizontal_arcs(net, t):
    return [(u, v) for u, v in net.arcs if t[u] == t[v]]


def ties_are_horizontal_arcs(net, t):
    """Verdadero si cada par empatado es un arco nodo de árbol -> reticulación"""
    for u, v in tied_pairs(net, t):
        if net.has_arc(v, u):
            u, v = v, u
        if not net.has_arc(u, v):
            return False
        if net.indegree(u) != 1 or net.indegree(v) < 2:
            return False
    return True


def base_tree(net, t):
    """Árbol base: borra los arcos horizontales y suprime los nodos de grado (1, 1)"""
    report = verify(net, t)
    if not report.is_consistent:
        raise LabellingError(f"El etiquetado no es HGT-consistente: {report}")
    tree = net.edit(remove_arcs=horizontal_arcs(net, t))
    return suppress_all(tree, tree.nodes)


def find_crown(net):
    """
    Busca una corona: nodos de árbol u_i y reticulaciones v_i con arcos
    (u_i, v_i) y (u_i, v_{i+1}). Devuelve el conjunto de nodos del ciclo
    más corto encontrado, o None.
    """
    bipartite = nx.Graph()
    for u, v in net.arcs:
        if net.indegree(u) == 1 and net.outdegree(u) >= 2 and net.indegree(v) >= 2:
            bipartite.add_edge(u, v)
    cycles = nx.cycle_basis(bipartite)
    if not cycles:
        return None
    cycle = min(cycles, key=lambda nodes: (len(nodes), sorted(nodes)))
    logger.debug(f"Corona encontrada sobre {sorted(cycle)}")
    return frozenset(cycle)


def search_labelling(graph, naive=False, max_nodes=None):
    """
    Búsqueda exhaustiva de un etiquetado.

    Para cada nodo con varios padres se elige qué padres comparten su
    etiqueta: exactamente uno o, con ``naive``, todos menos uno. Las clases
    de igualdad resultantes se aceptan si ningún arco interno a una clase es
    un empate no elegido, el cociente es acíclico y todo nodo con hijos
    conserva un hijo en otra clase. Devuelve el etiquetado testigo (rango
    topológico de cada clase) o None.
    """
    digraph = _digraph(graph)
    if max_nodes is not None:
        internal = [v for v in digraph.nodes if digraph.out_degree(v) > 0 and digraph.in_degree(v) > 0]
        if len(internal) > max_nodes:
            raise OracleTooLargeError(
                f"{len(internal)} nodos internos superan el máximo de {max_nodes} para la búsqueda exhaustiva"
            )

    multi = sorted(v for v in digraph.nodes if digraph.in_degree(v) >= 2)
    options = []
    for v in multi:
        parents = sorted(digraph.predecessors(v))
        size = len(parents) - 1 if naive else 1
        options.append([frozenset(chosen) for chosen in itertools.combinations(parents, size)])

    for choice in itertools.product(*options):
        tied = {(p, v) for v, chosen in zip(multi, choice) for p in chosen}
        witness = _accept_ties(digraph, tied)
        if witness is not None:
            return witness
    return None


def _accept_ties(digraph, tied):
    classes = nx.utils.UnionFind(digraph.nodes)
    for p, v in tied:
        classes.union(p, v)
    quotient = nx.DiGraph()
    quotient.add_nodes_from(classes[v] for v in digraph.nodes)
    for u, v in digraph.edges:
        if classes[u] == classes[v]:
            if (u, v) not in tied:
                return None
        else:
            quotient.add_edge(classes[u], classes[v])
    for u in digraph.nodes:
        children = list(digraph.successors(u))
        if children and all(classes[c] == classes[u] for c in children):
            return None
    if not nx.is_directed_acyclic_graph(quotient):
        return None
    rank = {cls: i for i, cls in enumerate(nx.lexicographical_topological_sort(quotient, key=str))}
    return {v: Fraction(rank[classes[v]]) for v in digraph.nodes}


def check_naive_nonbinary_rule(net, max_nodes=None):
    """
    Verdadero si existe un etiquetado donde cada reticulación coincide con
    todos sus padres salvo uno (más las propiedades 1 y 2).
    """
    if max_nodes is None:
        max_nodes = get_limits_config().oracle_max_nodes
    return search_labelling(net, naive=True, max_nodes=max_nodes) is not None
