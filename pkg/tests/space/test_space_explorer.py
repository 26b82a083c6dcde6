"""
Tests para la enumeración de Orch(n,k), el grafo rNNI, el diámetro, la
auditoría de caminos y el volcado del espacio
"""
import os
import re
import tempfile

import networkx as nx
import pandas as pd
from django.test import SimpleTestCase, override_settings

from orchards.cherry_engine import is_orchard
from orchards.exceptions import BudgetExceededError, DisconnectedSpaceError
from orchards.network_core import canonical_form, is_binary, reticulation_number, validate
from orchards.rearrangement import rnni_neighbors
from orchards.space_explorer import (
    SpaceGraph,
    audit_paths,
    brute_force_count,
    build_space,
    diameter,
    distance,
    dump_space,
    enumerate_space,
    is_connected,
    reachable_from,
    space_summary,
    theorem_bound,
    vertex_id,
)


class EnumerateTest(SimpleTestCase):
    """Tests para enumerate_space y el oráculo de fuerza bruta"""

    def test_trivial_sizes(self):
        """Test: Orch(1,0) tiene una red, Orch(1,1) ninguna y Orch(3,0) tres árboles"""
        self.assertEqual(len(enumerate_space(1, 0)), 1)
        self.assertEqual(len(enumerate_space(1, 1)), 0)
        self.assertEqual(len(enumerate_space(2, 0)), 1)
        self.assertEqual(len(enumerate_space(3, 0)), 3)

    def test_vertices_are_binary_orchards(self):
        """Test: Cada vértice es una red binaria orchard válida sobre x1..xn"""
        for key, net in enumerate_space(3, 1).items():
            self.assertTrue(validate(net).is_valid)
            self.assertTrue(is_binary(net))
            self.assertIsNotNone(is_orchard(net))
            self.assertEqual(reticulation_number(net), 1)
            self.assertEqual(net.taxa, frozenset({'x1', 'x2', 'x3'}))

    def test_matches_brute_force(self):
        """Test: La enumeración coincide con el conteo independiente"""
        for n, k in ((2, 0), (3, 0), (2, 1)):
            with self.subTest(n=n, k=k):
                self.assertEqual(len(enumerate_space(n, k)), brute_force_count(n, k))

    def test_budget(self):
        """Test: Superar el presupuesto lanza BudgetExceededError"""
        with self.assertRaises(BudgetExceededError):
            enumerate_space(3, 1, budget=2)

    @override_settings(ORCHARDKIT_BUDGET=2)
    def test_budget_from_settings(self):
        """Test: El presupuesto por defecto sale de la configuración"""
        with self.assertRaises(BudgetExceededError):
            enumerate_space(3, 1)

    def test_bad_parameters(self):
        """Test: n < 1 o k < 0 lanzan ValueError"""
        with self.assertRaises(ValueError):
            enumerate_space(0, 0)
        with self.assertRaises(ValueError):
            enumerate_space(2, -1)


class SpaceGraphTest(SimpleTestCase):
    """Tests para build_space, conectividad y diámetro"""

    def test_single_vertex(self):
        """Test: Orch(2,0) es un único vértice sin aristas y diámetro 0"""
        space = build_space(2, 0)
        self.assertEqual((len(space), space.edge_count), (1, 0))
        self.assertTrue(is_connected(space))
        self.assertEqual(diameter(space), 0)

    def test_three_leaf_trees_form_triangle(self):
        """Test: Los tres árboles de tres hojas son adyacentes dos a dos"""
        space = build_space(3, 0)
        self.assertEqual(len(space), 3)
        self.assertEqual(space.edge_count, 3)
        self.assertEqual(diameter(space), 1)

    def test_one_reticulation_two_leaves(self):
        """Test: Orch(2,1) es conexo con diámetro dentro de la cota"""
        space = build_space(2, 1)
        self.assertEqual(space.stray_neighbors, 0)
        self.assertTrue(is_connected(space))
        self.assertLessEqual(diameter(space), theorem_bound(2, 1))
        first = space.keys()[0]
        self.assertEqual(reachable_from(space, first), set(space.keys()))
        self.assertEqual(distance(space, first, first), 0)

    def test_edges_are_symmetric(self):
        """Test: Cada vecino orchard ve de vuelta al vértice de partida en Orch(2,1) y Orch(3,1)"""
        for n, k in ((2, 1), (3, 1)):
            space = build_space(n, k)
            with self.subTest(n=n, k=k):
                for key, net in space.vertices.items():
                    for _, neighbor in rnni_neighbors(net, orchard_only=True):
                        back = rnni_neighbors(space.network(canonical_form(neighbor)), orchard_only=True)
                        self.assertIn(key, {canonical_form(result) for _, result in back})
                self.assertEqual(nx.number_of_selfloops(space.graph), 0)

    def test_theorem_bound(self):
        """Test: Cota del diámetro por sustitución"""
        self.assertEqual(theorem_bound(2, 1), 16)
        self.assertEqual(theorem_bound(3, 1), 30)
        self.assertEqual(theorem_bound(2, 2), 26)

    def test_empty_and_disconnected(self):
        """Test: El diámetro de un espacio vacío o no conexo lanza DisconnectedSpaceError"""
        empty = SpaceGraph(n=1, k=1)
        self.assertFalse(is_connected(empty))
        with self.assertRaises(DisconnectedSpaceError):
            diameter(empty)

        apart = SpaceGraph(n=2, k=0)
        apart.graph.add_nodes_from([b'a', b'b'])
        apart.vertices.update({b'a': None, b'b': None})
        with self.assertRaises(DisconnectedSpaceError):
            diameter(apart)
        self.assertIsNone(distance(apart, b'a', b'b'))

    def test_summary(self):
        """Test: Resumen del espacio con diámetro"""
        summary = space_summary(build_space(2, 1), with_diameter=True)
        self.assertEqual(summary['n'], 2)
        self.assertTrue(summary['connected'])
        self.assertEqual(summary['bound'], 16)
        self.assertLessEqual(summary['diameter'], 16)


class AuditTest(SimpleTestCase):
    """Tests para audit_paths"""

    def test_all_pairs_two_leaves(self):
        """Test: Todos los pares de Orch(2,1) pasan la auditoría"""
        space = build_space(2, 1)
        report = audit_paths(space)
        self.assertEqual(len(report.rows), len(space) ** 2)
        self.assertTrue(report.passed, report.failures())
        frame = report.to_frame()
        self.assertTrue(frame['passed'].all())
        self.assertTrue((frame['path_length'] >= frame['distance']).all())

    def test_sampled_pairs_are_reproducible(self):
        """Test: Con semilla fija se auditan los mismos pares"""
        space = build_space(3, 0)
        first = audit_paths(space, trials=5, seed=3)
        second = audit_paths(space, trials=5, seed=3)
        self.assertEqual(
            [(row.source, row.target) for row in first.rows],
            [(row.source, row.target) for row in second.rows],
        )
        self.assertTrue(first.passed)

    def test_identical_pair(self):
        """Test: Un par idéntico tiene distancia y camino de longitud 0"""
        space = build_space(2, 1)
        key = space.keys()[0]
        trivial = SpaceGraph(n=2, k=1, vertices={key: space.network(key)}, graph=space.graph.subgraph([key]).copy())
        row = audit_paths(trivial).rows[0]
        self.assertEqual((row.distance, row.path_length), (0, 0))
        self.assertTrue(row.passed)


class DumpTest(SimpleTestCase):
    """Tests para el volcado de aristas y manifiesto"""

    def test_dump_files(self):
        """Test: Aristas como pares de SHA-1 y manifiesto CSV id,enewick"""
        space = build_space(3, 0)
        with tempfile.TemporaryDirectory() as tmp:
            edges_path = os.path.join(tmp, 'edges.txt')
            manifest_path = os.path.join(tmp, 'manifest.csv')
            dump_space(space, edges_path, manifest_path)

            edges = pd.read_csv(edges_path, sep=' ', header=None, dtype=str)
            manifest = pd.read_csv(manifest_path, dtype=str)

        self.assertEqual(edges.shape, (3, 2))
        self.assertEqual(list(manifest.columns), ['id', 'enewick'])
        self.assertEqual(len(manifest), 3)
        self.assertTrue(all(re.fullmatch(r'[0-9a-f]{40}', value) for value in manifest['id']))
        self.assertEqual(set(edges[0]) | set(edges[1]), set(manifest['id']))
        self.assertEqual(list(manifest['id']), sorted(vertex_id(key) for key in space.keys()))
