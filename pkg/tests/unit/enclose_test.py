import conecert.enclose as m
from conecert.cover import Bounded, GridSpec
from conecert.digraph import DiGraph
from conecert.dynsys import HenonMap, LinearMap
from conecert.errors import exceptions as ex

from tests.unit import TestBase


def c(i):
    return (i,)


def graph_from_pairs(n, pairs):
    return DiGraph([c(i) for i in range(n)],
                   [(c(a), c(b)) for a, b in pairs])


class TestFindSeed(TestBase):
    def setUp(self):
        super().setUp()
        self.grid = GridSpec([Bounded(-8, 8), Bounded(-8, 8)], 3)

    def test_contracting(self):
        system = LinearMap([[0.5, 0.0], [0.0, 0.5]])
        self.assertEqual(m.find_seed(self.grid, system, [0.9, 0.9], 10),
                         (0, 0))

    def test_no_transient(self):
        system = LinearMap([[0.5, 0.0], [0.0, 0.5]])
        self.assertEqual(m.find_seed(self.grid, system, [0.9, 0.9], 0),
                         (7, 7))

    def test_escapes(self):
        system = LinearMap([[2.0, 0.0], [0.0, 2.0]])
        with self.assertRaises(ex.SeedEscapedError) as cm:
            m.find_seed(self.grid, system, [0.9, 0.9], 10)
        self.assertEqual(cm.exception.context['step'], 1)

    def test_start_outside(self):
        system = LinearMap([[0.5, 0.0], [0.0, 0.5]])
        with self.assertRaises(ex.SeedEscapedError) as cm:
            m.find_seed(self.grid, system, [3.0, 0.0], 10)
        self.assertEqual(cm.exception.context['step'], 0)


class TestEncloseAttractor(TestBase):
    def setUp(self):
        super().setUp()
        self.grid = GridSpec([Bounded(-8, 8), Bounded(-8, 8)], 3)
        self.system = LinearMap([[0.5, 0.0], [0.0, 0.5]])

    def test_chain_to_origin(self):
        result = m.enclose_attractor((7, 7), self.grid, self.system)
        graph = result.graph
        self.assertEqual(graph.vertices, ((0, 0), (1, 1), (3, 3), (7, 7)))
        self.assertEqual(graph.out((7, 7)), frozenset({(3, 3)}))
        self.assertEqual(graph.out((0, 0)), frozenset({(0, 0)}))
        self.assertEqual(result.strategy, 'attractor')
        self.assertFalse(result.escaped)

    def test_audit_passes(self):
        result = m.enclose_attractor((7, 7), self.grid, self.system)
        self.assertEqual(m.audit_invariance(result, self.system), [])

    def test_audit_detects_violation(self):
        result = m.enclose_attractor((7, 7), self.grid, self.system)
        other = LinearMap([[0.25, 0.0], [0.0, 0.75]])
        self.assertNotEqual(m.audit_invariance(result, other), [])

    def test_escape(self):
        system = LinearMap([[4.0, 0.0], [0.0, 4.0]])
        with self.assertRaises(ex.EnclosureFailure) as cm:
            m.enclose_attractor((7, 7), self.grid, system)
        self.assertEqual(cm.exception.cube, (7, 7))

    def test_seed_outside(self):
        with self.assertRaises(ex.OutOfRangeCubeError):
            m.enclose_attractor((8, 0), self.grid, self.system)

    def test_parallel_identical(self):
        grid = self.grid.refine().refine()
        sequential = m.enclose_attractor((31, 31), grid, self.system)
        parallel = m.enclose_attractor((31, 31), grid, self.system,
                                       processes=2)
        self.assertEqual(sequential.graph, parallel.graph)


class TestPruning(TestBase):
    def test_prune_to_core(self):
        graph = graph_from_pairs(4, [(0, 1), (1, 2), (2, 1), (2, 3)])
        core = m.prune_to_core(graph)
        self.assertEqual(core.vertices, (c(1), c(2)))

    def test_prune_everything(self):
        graph = graph_from_pairs(3, [(0, 1), (1, 2)])
        self.assertEqual(len(m.prune_to_core(graph)), 0)

    def test_recurrent_core(self):
        graph = graph_from_pairs(4, [(0, 0), (0, 1), (1, 2), (2, 1), (1, 3),
                                     (3, 0)])
        self.assertEqual(len(m.recurrent_core(graph)), 4)
        graph = graph_from_pairs(4, [(0, 0), (0, 1), (1, 2), (2, 1),
                                     (1, 3)])
        self.assertEqual(m.recurrent_core(graph).vertices,
                         (c(0), c(1), c(2)))


class TestEncloseOuter(TestBase):
    def test_saddle(self):
        grid = GridSpec([Bounded(-4, 4), Bounded(-4, 4)], 2)
        system = LinearMap([[2.0, 0.0], [0.0, 0.5]])
        result = m.enclose_invariant_outer(grid, system, grid.all_cubes(),
                                           max_refine=2)
        self.assertEqual(result.grid.k, 4)
        self.assertEqual(set(result.graph.vertices),
                         {(-1, -1), (-1, 0), (0, -1), (0, 0)})
        self.assertTrue(result.escaped)
        self.assertEqual(result.strategy, 'outer')

    def test_scc_core(self):
        grid = GridSpec([Bounded(-4, 4), Bounded(-4, 4)], 2)
        system = LinearMap([[2.0, 0.0], [0.0, 0.5]])
        result = m.enclose_invariant_outer(grid, system, grid.all_cubes(),
                                           max_refine=1, scc_core=True)
        self.assertEqual(len(result.graph), 4)

    def test_no_invariant_set(self):
        grid = GridSpec([Bounded(4, 8), Bounded(4, 8)], 2)
        with self.assertRaises(ex.NoInvariantSetError):
            m.enclose_invariant_outer(grid, HenonMap(), grid.all_cubes(),
                                      max_refine=1)

    def test_empty_region(self):
        grid = GridSpec([Bounded(-4, 4), Bounded(-4, 4)], 2)
        with self.assertRaises(ex.EmptyCubeSetError):
            m.enclose_invariant_outer(grid, HenonMap(), [], max_refine=1)
