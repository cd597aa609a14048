import numpy as np

import conecert.cones as m
from conecert.cover import Bounded, GridSpec, realize
from conecert.digraph import DiGraph
from conecert.dynsys import HenonMap, LinearMap
from conecert.errors import exceptions as ex
from conecert.frames import CoordinateFrame, FrameAssignment
from conecert.interval import IntervalMatrix, IntervalVector

from tests.unit import TestBase


RING = [(0, 0), (1, 0), (1, 1), (0, 1)]


def ring_graph():
    return DiGraph(RING, [(RING[i], RING[(i + 1) % len(RING)])
                          for i in range(len(RING))])


def identity_frames(cubes):
    frame = CoordinateFrame.from_matrix(np.eye(2), 'spread')
    return FrameAssignment({cube: frame for cube in cubes})


class TestQuadraticForm(TestBase):
    def test_bad_signature(self):
        for u, s in [(0, 0), (-1, 2), (1, -1)]:
            with self.assertRaises(ex.PreconditionError):
                m.QuadraticForm(u, s)

    def test_matrix(self):
        q = m.QuadraticForm(1, 2)
        self.assertEqual(q.dimension, 3)
        np.testing.assert_array_equal(q.matrix, np.diag([1.0, -1.0, -1.0]))

    def test_value(self):
        q = m.QuadraticForm(1, 1)
        self.assertEqual(q.value(np.array([3.0, 2.0])), 5.0)
        self.assertEqual(q.value(np.array([1.0, 2.0])), -3.0)

    def test_eq(self):
        self.assertEqual(m.QuadraticForm(1, 1), m.QuadraticForm(1, 1))
        self.assertNotEqual(m.QuadraticForm(1, 1), m.QuadraticForm(2, 0))
        self.assertEqual(len({m.QuadraticForm(1, 1), m.QuadraticForm(1, 1)}),
                         1)


class TestEnclosures(TestBase):
    def test_quadratic_image(self):
        q = m.QuadraticForm(1, 1)
        for _ in range(100):
            mid = self.rng.normal(size=(2, 2))
            box = IntervalMatrix(mid - 0.01, mid + 0.01)
            image = m.quadratic_image(box, q)
            for a in self.rng.uniform(box.lo, box.hi, size=(5, 2, 2)):
                self.assertTrue(image.contains(a.T @ q.matrix @ a))

    def test_edge_matrix(self):
        c_w = np.array([[1.0, 2.0], [0.0, 1.0]])
        jacobian = IntervalMatrix.point([[2.0, 0.0], [0.0, 0.5]])
        inv_v = IntervalMatrix.point([[1.0, -2.0], [0.0, 1.0]])
        image = m.edge_matrix(c_w, jacobian, inv_v)
        self.assertTrue(image.contains([[2.0, -3.0], [0.0, 0.5]]))


class TestVerifyConeConditions(TestBase):
    def setUp(self):
        super().setUp()
        self.grid = GridSpec([Bounded(-8, 8), Bounded(-8, 8)], 3)
        self.graph = ring_graph()
        self.frames = identity_frames(RING)
        self.q = m.QuadraticForm(1, 1)

    def test_saddle_verified(self):
        report = m.verify_cone_conditions(
            self.graph, self.frames, self.q,
            LinearMap([[2.0, 0.0], [0.0, 0.5]]), self.grid)
        self.assertTrue(report.verified)
        self.assertEqual(report.failed_edges, ())
        self.assertEqual(report.edge_count, 4)
        self.assertEqual(report.vertex_count, 4)
        self.assertGreater(report.min_margin, 0.0)

    def test_identity_fails(self):
        report = m.verify_cone_conditions(
            self.graph, self.frames, self.q, LinearMap(np.eye(2)), self.grid)
        self.assertFalse(report.verified)
        self.assertEqual(report.unverified, frozenset(RING))
        self.assertEqual(len(report.failed_edges), 4)
        self.assertIsNone(report.min_margin)

    def test_swapped_frame_fails(self):
        frames = identity_frames(RING[1:])
        frames.claim(RING[0], CoordinateFrame.from_matrix(
            np.array([[0.0, 1.0], [1.0, 0.0]]), 'spread'))
        report = m.verify_cone_conditions(
            self.graph, frames, self.q, LinearMap([[2.0, 0.0], [0.0, 0.5]]),
            self.grid)
        # Edges out of and into the swapped vertex break.
        self.assertEqual(report.unverified, frozenset({RING[0], RING[3]}))

    def test_parallel_identical(self):
        system = LinearMap([[2.0, 0.1], [0.0, 0.5]])
        sequential = m.verify_cone_conditions(self.graph, self.frames,
                                              self.q, system, self.grid)
        parallel = m.verify_cone_conditions(self.graph, self.frames, self.q,
                                            system, self.grid, processes=2)
        self.assertEqual(sequential, parallel)

    def test_missing_frame(self):
        with self.assertRaises(ex.MissingFrameError):
            m.verify_cone_conditions(self.graph, identity_frames(RING[:2]),
                                     self.q, LinearMap(np.eye(2)), self.grid)

    def test_dimension(self):
        with self.assertRaises(ex.DimensionMismatchError):
            m.verify_cone_conditions(self.graph, self.frames,
                                     m.QuadraticForm(2, 1),
                                     LinearMap(np.eye(2)), self.grid)


class TestCertifyRates(TestBase):
    def setUp(self):
        super().setUp()
        self.grid = GridSpec([Bounded(-8, 8), Bounded(-8, 8)], 3)
        self.graph = ring_graph()
        self.frames = identity_frames(RING)
        self.q = m.QuadraticForm(1, 1)

    def test_saddle(self):
        rates = m.certify_rates(self.graph, self.frames, self.q,
                                LinearMap([[2.0, 0.0], [0.0, 0.5]]),
                                self.grid, bisect_tol=1e-3)
        # M^T Q M - lambda Q = diag(4 - lambda, lambda - 1/4)
        self.assertLess(rates.lambda_bar, 4.0)
        self.assertGreater(rates.lambda_bar, 4.0 - 2e-3)
        self.assertLessEqual(rates.lam, rates.lambda_bar ** 0.5)
        self.assertAlmostEqual(rates.lam, 2.0, places=3)
        self.assertGreater(rates.l_bound, 0.0)
        self.assertGreaterEqual(rates.d1, 2 ** 0.5)
        self.assertGreaterEqual(rates.d2, 2 ** 0.5)
        self.assertLessEqual(rates.r, 0.5)
        self.assertGreater(rates.c, 0.0)
        self.assertGreater(rates.stable_lambda_bar, 0.25)
        self.assertLess(rates.stable_lambda_bar, 0.25 + 2e-3)
        self.assertAlmostEqual(rates.stable_lam, 2.0, places=2)

    def test_lambda_max_reached(self):
        rates = m.certify_rates(self.graph, self.frames, self.q,
                                LinearMap([[4.0, 0.0], [0.0, 0.25]]),
                                self.grid, lambda_max=4.0)
        self.assertEqual(rates.lambda_bar, 4.0)
        self.assertEqual(rates.stable_lambda_bar, 0.25)

    def test_not_hyperbolic(self):
        with self.assertRaises(ex.RatesNotVerifiableError):
            m.certify_rates(self.graph, self.frames, self.q,
                            LinearMap(np.eye(2)), self.grid)

    def test_no_edges(self):
        graph = DiGraph(RING, [])
        with self.assertRaises(ex.RatesNotVerifiableError):
            m.certify_rates(graph, self.frames, self.q,
                            LinearMap(np.eye(2)), self.grid)


class TestShrinkingBoxes(TestBase):
    """Verified edges stay verified when vertex boxes shrink."""

    _to_patch = ['conecert.cones.realize']

    def setUp(self):
        super().setUp()
        self.grid = GridSpec([Bounded(-8, 8), Bounded(-8, 8)], 3)
        # One row of cubes across x = 0, where the cone condition of the
        # Henon map breaks down.
        row = [(c, 0) for c in range(-8, 8)]
        self.graph = DiGraph(row, [(row[i], row[(i + 1) % len(row)])
                                   for i in range(len(row))])
        self.frames = identity_frames(row)
        self.system = HenonMap(a=5.4, b=-1.0)
        self.q = m.QuadraticForm(1, 1)
        self.realize = self._mocks['realize']

    def _shrink(self, grid, cube):
        box = realize(grid, cube)
        t = np.sort(self.rng.uniform(0.0, 1.0, size=(2, grid.dim)), axis=0)
        width = box.hi - box.lo
        return IntervalVector(box.lo + t[0] * width, box.lo + t[1] * width)

    def _report(self):
        return m.verify_cone_conditions(self.graph, self.frames, self.q,
                                        self.system, self.grid)

    def test_random_sub_boxes(self):
        self.realize.side_effect = realize
        full = self._report()
        self.assertGreater(len(full.failed_edges), 0)
        self.assertLess(len(full.failed_edges), full.edge_count)
        self.realize.side_effect = self._shrink
        for _ in range(50):
            shrunk = self._report()
            self.assertLessEqual(set(shrunk.failed_edges),
                                 set(full.failed_edges))
            self.assertLessEqual(shrunk.unverified, full.unverified)

    def test_point_boxes(self):
        self.realize.side_effect = realize
        full = self._report()
        self.realize.side_effect = lambda grid, cube: IntervalVector.point(
            grid.centre(cube))
        point = self._report()
        self.assertLessEqual(point.unverified, full.unverified)
