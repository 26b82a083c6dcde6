"""
Canonización de redes orchard mediante movimientos rNNI y caminos entre redes.

El proceso sube todas las reticulaciones a la parte superior (dos caminos
bajo el hijo de la raíz unidos por arcos horizontales), orienta esos arcos
de forma ordenada, deja la hoja fijada ``l`` sola bajo la cabeza del arco
más bajo y el resto de hojas en un árbol colgante bajo su cola. Cada paso
guarda un etiquetado HGT-consistente de la red resultante.
"""
import logging
from dataclasses import dataclass, field
from fractions import Fraction

from .exceptions import (
    CanonicalizationError,
    LabellingError,
    MoveError,
    NotOrchardError,
    PreconditionError,
    TaxaMismatchError,
    UnknownTaxonError,
)
from .hgt_labelling import construct, verify
from .network_core import (
    are_isomorphic,
    canonical_form,
    is_binary,
    isomorphism_mapping,
    reticulation_number,
)
from .rearrangement import RnniMove, apply_rnni, inverse

logger = logging.getLogger(__name__)


# Reticulaciones en la parte superior

@dataclass(frozen=True)
class TopStructure:
    v_rho: int
    a_path: tuple = ()
    b_path: tuple = ()
    horizontal_arcs: tuple = ()
    neat: bool = True

    @property
    def k(self):
        return len(self.horizontal_arcs)

    @property
    def nodes(self):
        return frozenset(self.a_path) | frozenset(self.b_path)

    @property
    def reticulations(self):
        return frozenset(y for _, y in self.horizontal_arcs)

    def arc(self, i):
        """i-ésimo arco horizontal (x_i, y_i), empezando en 1"""
        return self.horizontal_arcs[i - 1]


def _other_child(net, node, excluded):
    return next(c for c in net.children(node) if c != excluded)


def _other_parent(net, node, excluded):
    return next(p for p in net.parents(node) if p != excluded)


def detect_top(net):
    """Estructura de reticulaciones en la parte superior con k máximo"""
    v_rho = net.root_child
    children = net.children(v_rho)
    if len(children) != 2:
        return TopStructure(v_rho)
    first, second = children
    if net.has_arc(first, second):
        x, y = first, second
    elif net.has_arc(second, first):
        x, y = second, first
    else:
        return TopStructure(v_rho)

    arcs = [(x, y)]
    a_path, b_path = [x], [y]
    while True:
        next_x = _other_child(net, x, y)
        next_y = net.children(y)[0]
        if next_x == next_y or net.outdegree(next_x) == 0 or net.outdegree(next_y) == 0:
            break
        if net.has_arc(next_x, next_y):
            new_x, new_y = next_x, next_y
        elif net.has_arc(next_y, next_x):
            new_x, new_y = next_y, next_x
        else:
            break
        # a_{i+1} es el nodo del nivel siguiente que cuelga de a_i
        if a_path[-1] == x:
            a_path.append(next_x)
            b_path.append(next_y)
        else:
            a_path.append(next_y)
            b_path.append(next_x)
        x, y = new_x, new_y
        arcs.append((x, y))

    neat = all(x_i == a_i for (x_i, _), a_i in zip(arcs, a_path))
    return TopStructure(v_rho, tuple(a_path), tuple(b_path), tuple(arcs), neat)


def pendant_root(net):
    """Hijo de la cola del arco horizontal más bajo que no es su cabeza"""
    top = detect_top(net)
    if top.k == 0:
        return net.root_child
    x, y = top.arc(top.k)
    return _other_child(net, x, y)


# Trazas

@dataclass
class MoveTrace:
    start: object
    moves: list = field(default_factory=list)
    results: list = field(default_factory=list)
    labellings: list = field(default_factory=list)

    def __len__(self):
        return len(self.moves)

    @property
    def final(self):
        return self.results[-1] if self.results else self.start

    def networks(self):
        return [self.start] + list(self.results)

    def record(self, move, network, labelling):
        self.moves.append(move)
        self.results.append(network)
        self.labellings.append(labelling)

    def extend(self, other):
        if other.start != self.final:
            raise CanonicalizationError('La traza a concatenar no empieza en la red final')
        self.moves.extend(other.moves)
        self.results.extend(other.results)
        self.labellings.extend(other.labellings)
        return self

    def replay(self):
        """Reaplica los movimientos desde el inicio y compara cada red intermedia"""
        net = self.start
        for move, expected in zip(self.moves, self.results):
            net = apply_rnni(net, move)
            if canonical_form(net) != canonical_form(expected):
                return False
        return True

    def labellings_consistent(self):
        return all(
            verify(net, t).is_consistent for net, t in zip(self.results, self.labellings)
        )

    def check_top_labels(self):
        """Los arcos horizontales de la parte superior tienen extremos con igual etiqueta"""
        for net, t in zip(self.results, self.labellings):
            for x, y in detect_top(net).horizontal_arcs:
                if t[x] != t[y]:
                    return False
        return True


def _accepts(net, candidate):
    if candidate is None:
        return False
    try:
        return verify(net, candidate).is_consistent
    except LabellingError:
        return False


def _step(trace, move, candidate=None):
    """Aplica ``move`` a la red final y registra un etiquetado válido del resultado"""
    result = apply_rnni(trace.final, move)
    labelling = candidate if _accepts(result, candidate) else construct(result)
    if labelling is None:
        raise CanonicalizationError(f"El movimiento {move} produce una red no orchard")
    trace.record(move, result, labelling)
    return result


def _epsilon(t, parts=8):
    values = sorted(set(t.values()))
    gaps = [b - a for a, b in zip(values, values[1:])]
    return min(gaps, default=Fraction(1)) / parts


def _relabel(t, updates):
    relabelled = dict(t)
    relabelled.update(updates)
    return relabelled


def _require_orchard(net):
    if not is_binary(net):
        raise PreconditionError('Se requiere una red binaria')
    t = construct(net)
    if t is None:
        raise NotOrchardError('La red no es orchard')
    return t


# Reorientación de arcos horizontales

def reorient_top(net, k_prime):
    """
    Invierte, con un único movimiento rNNI, los k' arcos horizontales más
    altos (salvo isomorfismo): intercambia el hijo de y_k' con el hijo de x_k'
    que no es y_k'.
    """
    top = detect_top(net)
    if not 1 <= k_prime <= top.k:
        raise PreconditionError(f"k'={k_prime} fuera de rango (k={top.k})")
    t = _require_orchard(net)
    x, y = top.arc(k_prime)
    move = RnniMove(
        p=x, x=y, c=net.children(y)[0],
        e=(_other_parent(net, y, x), y),
        z=x, w=_other_child(net, x, y),
    )
    trace = MoveTrace(net)
    _step(trace, move, t)
    return trace


# Subida de reticulaciones

def _triangle(net, r):
    parents = net.parents(r)
    if len(parents) != 2:
        return None
    first, second = parents
    if net.has_arc(first, second):
        return first, second
    if net.has_arc(second, first):
        return second, first
    return None


def lift_triangle(net, t, r):
    """
    Sube una reticulación r que forma un triángulo (w,p), (w,r), (p,r).
    Si el padre q de w no es extremo de un arco horizontal superior, dos
    movimientos dejan el triángulo en q; si lo es, hasta cuatro movimientos
    dejan r en la parte superior.
    """
    top = detect_top(net)
    if r not in net or net.indegree(r) != 2 or r in top.reticulations:
        raise PreconditionError(f"El nodo {r} no es una reticulación fuera de la parte superior")
    triangle = _triangle(net, r)
    if triangle is None:
        raise PreconditionError(f"La reticulación {r} no forma un triángulo")
    w, p = triangle
    q = net.parents(w)[0]
    c = net.children(r)[0]
    eps = _epsilon(t)
    trace = MoveTrace(net)

    if q not in top.nodes:
        v = _other_child(net, q, w)
        t1 = _relabel(t, {w: min(t[w], t[v]) - eps})
        _step(trace, RnniMove(p=q, x=w, c=p, e=(w, r), z=q, w=v), t1)
        t2 = _relabel(t1, {p: t1[w] - eps, r: t1[w] - eps})
        _step(trace, RnniMove(p=q, x=w, c=r, e=(w, v), z=r, w=c), t2)
        return trace

    if trace.final.indegree(q) == 1:
        trace.extend(reorient_top(trace.final, top.k))
        t = trace.labellings[-1]
        eps = _epsilon(t)
        q = trace.final.parents(w)[0]
    current = trace.final
    tails = [x for x, y in detect_top(current).horizontal_arcs if y == q]
    if not tails:
        raise PreconditionError(f"El padre {q} de {w} no es cabeza de un arco horizontal superior")
    s = tails[0]
    v = _other_child(current, s, q)
    gamma, delta = eps / 4, eps / 2
    t1 = _relabel(t, {q: min(t[w], t[v]) - eps, w: min(t[w], t[v]) - eps})
    _step(trace, RnniMove(p=q, x=w, c=p, e=(w, r), z=s, w=q), t1)
    t2 = _relabel(t1, {q: t1[s], w: t1[s] + delta})
    _step(trace, RnniMove(p=s, x=w, c=q, e=(w, r), z=s, w=v), t2)
    t3 = _relabel(t2, {p: t2[w] - gamma, r: t2[w] - gamma})
    _step(trace, RnniMove(p=s, x=w, c=r, e=(w, v), z=r, w=c), t3)
    return trace


def _prescribed_lift(net, r):
    """Uno o varios movimientos que acercan r a la parte superior, o None"""
    t = construct(net)
    if t is None:
        return None
    parents = net.parents(r)
    tied = [v for v in parents if t[v] == t[r]]
    if len(tied) != 1:
        return None
    p = tied[0]
    u = _other_parent(net, r, p)
    if net.indegree(p) != 1:
        return None
    q = net.parents(p)[0]
    eps = _epsilon(t)
    try:
        if u == q:
            return lift_triangle(net, t, r)
        trace = MoveTrace(net)
        if t[u] > t[q]:
            if net.indegree(u) != 1:
                return None
            s = net.parents(u)[0]
            move = RnniMove(p=u, x=r, c=net.children(r)[0], e=(p, r), z=s, w=u)
            candidate = _relabel(t, {p: t[u], r: t[u], u: t[u] + eps})
        else:
            if net.indegree(q) != 1:
                return None
            s = net.parents(q)[0]
            move = RnniMove(p=q, x=p, c=_other_child(net, p, r), e=(p, r), z=s, w=q)
            candidate = _relabel(t, {p: t[q], r: t[q], q: t[q] + eps})
        _step(trace, move, candidate)
        return trace
    except (MoveError, CanonicalizationError, PreconditionError) as exc:
        logger.debug(f"Movimiento prescrito descartado para {r}: {exc}")
        return None


def base_ancestors(net, t, v):
    """Nodos base por encima de ``v``: sin padre ni hijo con su misma etiqueta"""
    count = 0
    for u in net.ancestors(v):
        if all(t[u] != t[w] for w in net.parents(u) + net.children(u)):
            count += 1
    return count


def lift_reticulation(net):
    """
    Lleva a la parte superior la reticulación no superior de menor etiqueta
    (desempate por identificador), aumentando en uno el número de
    reticulaciones superiores. Cada bloque de movimientos reduce el número
    de nodos base sobre r o deja r en la parte superior.
    """
    t = _require_orchard(net)
    top = detect_top(net)
    k0 = top.k
    pending = [v for v in net.reticulations if v not in top.reticulations]
    if not pending:
        raise PreconditionError('Todas las reticulaciones están ya en la parte superior')
    r = min(pending, key=lambda v: (t[v], v))

    trace = MoveTrace(net)
    while detect_top(trace.final).k <= k0:
        current = trace.final
        step = _prescribed_lift(current, r)
        if step is None:
            raise CanonicalizationError(f"No se encontró un movimiento que suba la reticulación {r}")
        if detect_top(step.final).k <= k0:
            before = base_ancestors(current, construct(current), r)
            after = base_ancestors(step.final, step.labellings[-1], r)
            if after >= before:
                raise CanonicalizationError(
                    f"Los nodos base sobre {r} no decrecen ({before} -> {after}) tras {len(step)} movimientos"
                )
        trace.extend(step)
    logger.debug(f"Reticulación {r} subida en {len(trace)} movimientos")
    return trace


# Árboles colgantes

def relocate_pendant(net, l):
    """
    Deja la hoja ``l`` como único descendiente hoja de la cabeza del arco
    horizontal más bajo, moviendo el resto bajo su cola.
    """
    top = detect_top(net)
    if top.k == 0 or top.k != reticulation_number(net):
        raise PreconditionError('Se requieren todas las reticulaciones en la parte superior')
    if l not in net.taxa:
        raise UnknownTaxonError(l)
    x, y = top.arc(top.k)
    leaf = net.node_of(l)
    if leaf not in net.descendants(y):
        raise PreconditionError(f"La hoja {l} no está bajo la cabeza del arco horizontal más bajo")

    t = _require_orchard(net)
    path = [y]
    while path[-1] != leaf:
        path.append(next(c for c in net.children(path[-1]) if c == leaf or leaf in net.descendants(c)))
    u = path
    m = len(path) - 1
    u0 = _other_child(net, x, y)
    eps = _epsilon(t, parts=4 * (len(net) + 2))
    low = min(t[u0], t[u[1]])

    trace = MoveTrace(net)
    labelling = t
    previous = u0
    for i in range(1, m):
        current = trace.final
        v_i = _other_child(current, u[i], u[i + 1])
        t1 = _relabel(labelling, {u[i]: t[x] + eps, y: t[x] + eps})
        _step(trace, RnniMove(p=y, x=u[i], c=u[i + 1], e=(u[i], v_i), z=x, w=y), t1)
        t2 = _relabel(t1, {y: t[x], u[i]: low - i * eps})
        _step(trace, RnniMove(p=x, x=u[i], c=y, e=(u[i], v_i), z=x, w=previous), t2)
        labelling = trace.labellings[-1]
        previous = u[i]
    return trace


# Canonización y caminos

def canonicalize(net, l):
    """
    Transforma ``net`` en la red canónica: k reticulaciones ordenadamente en
    la parte superior, ``l`` sola bajo y_k y el resto de hojas bajo x_k.
    """
    if l not in net.taxa:
        raise UnknownTaxonError(l)
    _require_orchard(net)
    k = reticulation_number(net)
    trace = MoveTrace(net)
    if k == 0:
        return trace

    while detect_top(trace.final).k < k:
        trace.extend(lift_reticulation(trace.final))

    for i in range(1, k):
        top = detect_top(trace.final)
        x_i, _ = top.arc(i)
        x_next, _ = top.arc(i + 1)
        if not trace.final.has_arc(x_i, x_next):
            trace.extend(reorient_top(trace.final, i))

    top = detect_top(trace.final)
    _, y_k = top.arc(k)
    if trace.final.node_of(l) not in trace.final.descendants(y_k):
        trace.extend(reorient_top(trace.final, k))

    trace.extend(relocate_pendant(trace.final, l))
    logger.info(f"Canonización terminada: {len(trace)} movimientos (n={len(net.taxa)}, k={k})")
    return trace


def is_canonical(net, l):
    """Verdadero si ``net`` ya tiene la forma canónica respecto de ``l``"""
    k = reticulation_number(net)
    if k == 0:
        return True
    top = detect_top(net)
    if top.k != k or not top.neat:
        return False
    _, y_k = top.arc(k)
    return net.children(y_k) == [net.node_of(l)]


def canonical_bound(n, k):
    return 2 * k * n + k + 2 * n - 4


def caterpillar_bound(n):
    return (n - 1) * (n - 2)


def orchard_path_bound(n, k):
    if k == 0:
        return caterpillar_bound(n)
    return 2 * canonical_bound(n, k) + caterpillar_bound(n - 1)


def _caterpillar(net, subtree_root):
    """Lleva el árbol bajo ``subtree_root`` a la oruga ordenada por taxón"""
    trace = MoveTrace(net)
    s = subtree_root
    below = {s} | net.descendants(s)
    taxa = sorted(net.taxon_of(v) for v in below if net.outdegree(v) == 0)
    for taxon in taxa[:-1]:
        current = trace.final
        leaf = current.node_of(taxon)
        while current.parents(leaf)[0] != s:
            a = current.parents(leaf)[0]
            b = current.parents(a)[0]
            g = current.parents(b)[0]
            sibling = _other_child(current, a, leaf)
            current = _step(trace, RnniMove(p=b, x=a, c=sibling, e=(a, leaf), z=g, w=b))
            if b == s:
                s = a
        s = _other_child(current, s, leaf)
    return trace


def _map_move(move, mapping):
    return RnniMove(
        p=mapping[move.p], x=mapping[move.x], c=mapping[move.c],
        e=(mapping[move.e[0]], mapping[move.e[1]]),
        z=mapping[move.z], w=mapping[move.w],
    )


def _append_reversed(trace, other):
    """Añade a ``trace`` las inversas de ``other`` en orden inverso, traducidas a sus nodos"""
    mapping = isomorphism_mapping(other.final, trace.final)
    if mapping is None:
        raise CanonicalizationError('Las formas canónicas de ambas redes no son isomorfas')
    steps = list(zip(other.moves, other.networks()[:-1]))
    for move, before in reversed(steps):
        _step(trace, _map_move(inverse(move, before), mapping))
    return trace


def tree_path(t1, t2):
    """Camino rNNI entre dos árboles pasando por la oruga ordenada por taxón"""
    if t1.taxa != t2.taxa:
        raise TaxaMismatchError(f"Taxones distintos: {sorted(t1.taxa)} frente a {sorted(t2.taxa)}")
    if reticulation_number(t1) or reticulation_number(t2):
        raise PreconditionError('tree_path requiere árboles')
    if are_isomorphic(t1, t2):
        return MoveTrace(t1)
    trace = _caterpillar(t1, t1.root_child)
    other = _caterpillar(t2, t2.root_child)
    return _append_reversed(trace, other)


def orchard_path(n1, n2, l=None):
    """
    Camino rNNI entre dos redes binarias orchard con los mismos taxones y el
    mismo número de reticulaciones; toda red intermedia es orchard. Ambas se
    canonizan respecto de la hoja ``l`` (por defecto el menor taxón).
    """
    if n1.taxa != n2.taxa:
        raise TaxaMismatchError(f"Taxones distintos: {sorted(n1.taxa)} frente a {sorted(n2.taxa)}")
    k = reticulation_number(n1)
    if k != reticulation_number(n2):
        raise TaxaMismatchError(f"Número de reticulaciones distinto: {k} frente a {reticulation_number(n2)}")
    if are_isomorphic(n1, n2):
        return MoveTrace(n1)
    if k == 0:
        return tree_path(n1, n2)

    if l is None:
        l = min(n1.taxa)
    elif l not in n1.taxa:
        raise UnknownTaxonError(l)
    trace = canonicalize(n1, l)
    trace.extend(_caterpillar(trace.final, pendant_root(trace.final)))
    other = canonicalize(n2, l)
    other.extend(_caterpillar(other.final, pendant_root(other.final)))
    _append_reversed(trace, other)
    logger.info(f"Camino entre redes orchard de {len(trace)} movimientos")
    return trace
