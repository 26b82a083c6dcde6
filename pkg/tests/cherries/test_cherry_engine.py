"""
Tests para cherry picking: pares reducibles, reducción, redes orchard,
reconstrucción y generación aleatoria
"""
from django.test import SimpleTestCase
from hypothesis import given, settings

from orchards.cherry_engine import (
    CherrySequence,
    PairKind,
    ReduciblePair,
    all_orders_reduce,
    apply_sequence,
    attach_pair,
    find_reducible_pairs,
    is_one_leaf_tree,
    is_orchard,
    is_orchard_nonbinary_via_resolutions,
    one_leaf_tree,
    pair_kind,
    random_network,
    random_orchard,
    reconstruct,
    reduce_pair,
    reduction_trace,
)
from orchards.enewick_io import parse
from orchards.exceptions import MalformedSequenceError, UnknownTaxonError
from orchards.network_core import are_isomorphic, canonical_form, contract_arc, summary, validate
from tests.config import HYPOTHESIS_SETTINGS, TEST_TRIALS
from tests.helpers import CROWN_ARCS, THIRTEEN_LEAF_SEQUENCE, load_fixture, named_network
from tests.strategies import orchard_networks

SMALLEST_RETICULATION = '((a)#H1,(#H1,b));'


class PairKindTest(SimpleTestCase):
    """Tests para pair_kind y find_reducible_pairs"""

    def test_cherry(self):
        """Test: Dos hojas hermanas forman un cherry en ambos sentidos"""
        net = parse('(a,b);')
        self.assertEqual(pair_kind(net, 'a', 'b'), PairKind.CHERRY)
        self.assertEqual(find_reducible_pairs(net), [
            ReduciblePair('a', 'b', PairKind.CHERRY),
            ReduciblePair('b', 'a', PairKind.CHERRY),
        ])

    def test_reticulated_cherry_is_directed(self):
        """Test: El cherry reticulado solo se reduce desde la hoja bajo la reticulación"""
        net = parse(SMALLEST_RETICULATION)
        self.assertEqual(pair_kind(net, 'a', 'b'), PairKind.RETICULATED_CHERRY)
        self.assertIsNone(pair_kind(net, 'b', 'a'))
        self.assertEqual(find_reducible_pairs(net), [ReduciblePair('a', 'b', PairKind.RETICULATED_CHERRY)])

    def test_same_taxon(self):
        """Test: (x, x) nunca es reducible"""
        self.assertIsNone(pair_kind(parse('(a,b);'), 'a', 'a'))

    def test_unknown_taxon(self):
        """Test: Un taxón ausente lanza UnknownTaxonError"""
        with self.assertRaises(UnknownTaxonError):
            pair_kind(parse('(a,b);'), 'a', 'z')


class ReduceTest(SimpleTestCase):
    """Tests para reduce_pair y apply_sequence"""

    def test_reduce_cherry(self):
        """Test: Reducir un cherry borra x y suprime su padre"""
        reduced = reduce_pair(parse('(a,b);'), 'a', 'b')
        self.assertTrue(is_one_leaf_tree(reduced))
        self.assertEqual(reduced.taxa, frozenset({'b'}))

    def test_reduce_reticulated_cherry(self):
        """Test: Reducir un cherry reticulado borra el arco horizontal"""
        reduced = reduce_pair(parse(SMALLEST_RETICULATION), 'a', 'b')
        self.assertTrue(are_isomorphic(reduced, parse('(a,b);')))
        self.assertTrue(validate(reduced).is_valid)

    def test_non_reducible_pair_is_identity(self):
        """Test: Un par no reducible devuelve la misma red"""
        net = parse(SMALLEST_RETICULATION)
        self.assertIs(reduce_pair(net, 'b', 'a'), net)

    @settings(max_examples=TEST_TRIALS['structure'], **HYPOTHESIS_SETTINGS)
    @given(orchard_networks(max_leaves=5, max_retics=2))
    def test_reduction_removes_arcs(self, net):
        """Test: Reducir un par reducible quita arcos; uno no reducible deja la red igual"""
        reducible = {(pair.x, pair.y) for pair in find_reducible_pairs(net)}
        for x in sorted(net.taxa):
            for y in sorted(net.taxa - {x}):
                reduced = reduce_pair(net, x, y)
                if (x, y) in reducible:
                    self.assertLess(len(reduced.arcs), len(net.arcs))
                else:
                    self.assertIs(reduced, net)

    def test_thirteen_leaf_reference_sequence(self):
        """Test: La secuencia de catorce pares reduce la red de trece hojas"""
        net = load_fixture('thirteen_leaves.enwk')
        reduced = apply_sequence(net, CherrySequence(tuple(THIRTEEN_LEAF_SEQUENCE)))
        self.assertTrue(is_one_leaf_tree(reduced))
        self.assertEqual(reduced.taxa, frozenset({'13'}))

    def test_reduction_trace_keeps_every_step(self):
        """Test: reduction_trace incluye la red inicial y todas las intermedias"""
        net = load_fixture('thirteen_leaves.enwk')
        networks = reduction_trace(net, CherrySequence(tuple(THIRTEEN_LEAF_SEQUENCE)))
        self.assertEqual(len(networks), 15)
        self.assertIs(networks[0], net)
        for step in networks:
            self.assertTrue(validate(step).is_valid)


class IsOrchardTest(SimpleTestCase):
    """Tests para is_orchard y sus variantes"""

    def test_thirteen_leaf_is_orchard(self):
        """Test: La red de trece hojas es orchard con una secuencia de n-1+k pares"""
        net = load_fixture('thirteen_leaves.enwk')
        seq = is_orchard(net)
        self.assertIsNotNone(seq)
        self.assertEqual(len(seq), 14)
        self.assertTrue(is_one_leaf_tree(apply_sequence(net, seq)))

    def test_crown_is_not_orchard(self):
        """Test: La corona no tiene pares reducibles"""
        net = load_fixture('crown.enwk')
        self.assertIsNone(is_orchard(net))
        self.assertEqual(find_reducible_pairs(net), [])
        self.assertFalse(all_orders_reduce(net))

    def test_one_leaf_tree(self):
        """Test: El árbol de una hoja es orchard con la secuencia vacía"""
        self.assertEqual(is_orchard(one_leaf_tree('a')), CherrySequence(()))

    def test_every_order_reduces_an_orchard(self):
        """Test: En una red orchard cualquier orden de reducción termina"""
        self.assertTrue(all_orders_reduce(load_fixture('thirteen_leaves.enwk')))

    def test_nonbinary_orchard(self):
        """Test: La red con una reticulación de tres padres es orchard"""
        net = load_fixture('nonbinary.enwk')
        self.assertIsNotNone(is_orchard(net))
        self.assertTrue(is_orchard_nonbinary_via_resolutions(net))

    def test_contracted_crown_has_no_orchard_resolution(self):
        """Test: Ninguna resolución de la corona contraída es orchard"""
        net, ids = named_network(CROWN_ARCS)
        contracted = contract_arc(net, (ids['top'], ids['A']))
        self.assertIsNone(is_orchard(contracted))
        self.assertFalse(is_orchard_nonbinary_via_resolutions(contracted))

    def test_sequence_str(self):
        """Test: La secuencia se imprime como pares concatenados"""
        seq = CherrySequence((('a', 'b'), ('b', 'c')))
        self.assertEqual(str(seq), '(a,b)(b,c)')
        self.assertEqual(seq.survivor, 'c')


class ReconstructTest(SimpleTestCase):
    """Tests para reconstruct y attach_pair"""

    def test_attach_new_leaf(self):
        """Test: Añadir (b, a) al árbol de una hoja da el cherry (a,b)"""
        net = attach_pair(one_leaf_tree('a'), 'b', 'a')
        self.assertTrue(are_isomorphic(net, parse('(a,b);')))

    def test_attach_reticulation(self):
        """Test: Añadir (a, b) sobre el cherry crea un cherry reticulado"""
        net = attach_pair(parse('(a,b);'), 'a', 'b')
        self.assertTrue(are_isomorphic(net, parse(SMALLEST_RETICULATION)))

    def test_attach_rejects_bad_pairs(self):
        """Test: Pares repetidos o con y desconocido lanzan MalformedSequenceError"""
        with self.assertRaises(MalformedSequenceError):
            attach_pair(parse('(a,b);'), 'a', 'a')
        with self.assertRaises(MalformedSequenceError):
            attach_pair(parse('(a,b);'), 'a', 'z')

    def test_thirteen_leaf_roundtrip(self):
        """Test: Reconstruir la secuencia de is_orchard devuelve la red original"""
        net = load_fixture('thirteen_leaves.enwk')
        self.assertTrue(are_isomorphic(reconstruct(is_orchard(net)), net))
        rebuilt = reconstruct(CherrySequence(tuple(THIRTEEN_LEAF_SEQUENCE)))
        self.assertTrue(are_isomorphic(rebuilt, net))

    def test_empty_sequence_needs_survivor(self):
        """Test: La secuencia vacía con superviviente es el árbol de una hoja"""
        self.assertTrue(is_one_leaf_tree(reconstruct(CherrySequence(()), survivor='a')))
        with self.assertRaises(MalformedSequenceError):
            reconstruct(CherrySequence(()))

    def test_survivor_mismatch(self):
        """Test: Un superviviente distinto de y_m es un error"""
        with self.assertRaises(MalformedSequenceError):
            reconstruct(CherrySequence((('a', 'b'),)), survivor='a')

    def test_full_taxa_mismatch(self):
        """Test: Los taxones introducidos deben coincidir con los esperados"""
        with self.assertRaises(MalformedSequenceError):
            reconstruct(CherrySequence((('a', 'b'),)), full_taxa={'a', 'b', 'c'})

    @settings(max_examples=TEST_TRIALS['characterization'], **HYPOTHESIS_SETTINGS)
    @given(orchard_networks())
    def test_reconstruct_inverts_is_orchard(self, net):
        """Test: reconstruct(is_orchard(N)) es isomorfa a N"""
        seq = is_orchard(net)
        self.assertIsNotNone(seq)
        self.assertTrue(are_isomorphic(reconstruct(seq), net))


class RandomGenerationTest(SimpleTestCase):
    """Tests para random_orchard y random_network"""

    def test_random_orchard_is_deterministic(self):
        """Test: La misma semilla produce la misma red"""
        first = random_orchard(5, 2, seed=7)
        second = random_orchard(5, 2, seed=7)
        self.assertEqual(canonical_form(first), canonical_form(second))

    def test_random_orchard_shape(self):
        """Test: La red aleatoria tiene n hojas, k reticulaciones y es orchard"""
        for seed in range(10):
            net = random_orchard(6, 3, seed=seed)
            info = summary(net)
            self.assertEqual((info.n_leaves, info.reticulation_number), (6, 3))
            self.assertTrue(info.is_binary)
            self.assertIsNotNone(is_orchard(net))

    def test_random_orchard_rejects_bad_sizes(self):
        """Test: n < 1 o una hoja con reticulaciones lanzan ValueError"""
        with self.assertRaises(ValueError):
            random_orchard(0, 0)
        with self.assertRaises(ValueError):
            random_orchard(1, 1)
        with self.assertRaises(ValueError):
            random_orchard(3, -1)

    def test_random_network_shape(self):
        """Test: random_network da redes binarias válidas con k reticulaciones"""
        for seed in range(10):
            info = summary(random_network(5, 2, seed=seed))
            self.assertEqual((info.n_leaves, info.reticulation_number), (5, 2))
            self.assertTrue(info.is_binary)
