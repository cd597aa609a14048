import math

import conecert.cover as m
from conecert.errors import exceptions as ex
from conecert.interval import IntervalVector

from tests.unit import TestBase


def smale_grid(k=4):
    side = 2 ** k
    return m.GridSpec([m.Bounded(-side, side), m.Bounded(-side, side),
                       m.Periodic(side)], k)


class TestDimension(TestBase):
    def test_bounded_refine(self):
        self.assertEqual(m.Bounded(-2, 3).refine(), m.Bounded(-4, 6))

    def test_periodic_refine(self):
        self.assertEqual(m.Periodic(8).refine(), m.Periodic(16))

    def test_empty_bounded(self):
        with self.assertRaises(ex.PreconditionError):
            m.Bounded(2, 2)

    def test_bad_modulus(self):
        with self.assertRaises(ex.PreconditionError):
            m.Periodic(0)

    def test_descriptor(self):
        self.assertEqual(m.Bounded(-16, 16).to_descriptor(),
                         'bounded(-16:16)')
        self.assertEqual(m.parse_dimension('periodic(16)'), m.Periodic(16))
        self.assertEqual(m.parse_dimension(' bounded(-3:5) '),
                         m.Bounded(-3, 5))

    def test_bad_descriptor(self):
        with self.assertRaises(ex.ArtifactFormatError):
            m.parse_dimension('circle(3)')

    def test_hash(self):
        self.assertEqual(len({m.Periodic(4), m.Periodic(4)}), 1)


class TestGridSpec(TestBase):
    def test_no_dimensions(self):
        with self.assertRaises(ex.PreconditionError):
            m.GridSpec([], 0)

    def test_bad_resolution(self):
        with self.assertRaises(ex.PreconditionError):
            m.GridSpec([m.Periodic(1)], m.MAX_RESOLUTION + 1)

    def test_properties(self):
        grid = smale_grid()
        self.assertEqual(grid.dim, 3)
        self.assertEqual(grid.side, 1 / 16)
        self.assertEqual(grid.periods, (None, None, 1.0))
        self.assertEqual(grid.domain_descriptor(),
                         'bounded(-16:16);bounded(-16:16);periodic(16)')

    def test_refine(self):
        grid = smale_grid(4).refine()
        self.assertEqual(grid, smale_grid(5))
        self.assertEqual(grid.periods, (None, None, 1.0))

    def test_size_all_cubes(self):
        grid = m.GridSpec([m.Bounded(0, 3), m.Periodic(2)], 0)
        cubes = list(grid.all_cubes())
        self.assertEqual(len(cubes), grid.size())
        self.assertEqual(cubes[0], (0, 0))
        self.assertEqual(cubes, sorted(cubes))

    def test_validate(self):
        grid = smale_grid()
        grid.validate((-16, 15, 0))
        with self.assertRaises(ex.OutOfRangeCubeError):
            grid.validate((16, 0, 0))
        with self.assertRaises(ex.OutOfRangeCubeError):
            grid.validate((0, 0, 16))
        with self.assertRaises(ex.OutOfRangeCubeError):
            grid.validate((0, 0))

    def test_children(self):
        grid = m.GridSpec([m.Bounded(-2, 2), m.Bounded(-2, 2)], 1)
        self.assertEqual(grid.children((1, -1)),
                         [(2, -2), (2, -1), (3, -2), (3, -1)])

    def test_centre(self):
        grid = smale_grid()
        self.assertEqual(grid.centre((0, -1, 3)).tolist(),
                         [1 / 32, -1 / 32, 7 / 32])

    def test_reduce_point(self):
        grid = smale_grid()
        self.assertEqual(grid.reduce_point([2.0, -3.0, -0.25]).tolist(),
                         [2.0, -3.0, 0.75])
        self.assertEqual(grid.reduce_point([0.0, 0.0, 7.0]).tolist(),
                         [0.0, 0.0, 0.0])

    def test_locate(self):
        grid = smale_grid()
        self.assertEqual(grid.locate([0.0, -0.01, 1.5]), (0, -1, 8))
        self.assertEqual(grid.locate([1.0, 0.0, 0.0]), (15, 0, 0))
        self.assertIsNone(grid.locate([1.01, 0.0, 0.0]))
        self.assertIsNone(grid.locate([math.nan, 0.0, 0.0]))
        self.assertEqual(grid.locate([0.0, 0.0, -0.01]), (0, 0, 15))


class TestRealize(TestBase):
    def test_exact_endpoints(self):
        box = m.realize(smale_grid(), (0, -1, 15))
        self.assertEqual(box.lo.tolist(), [0.0, -1 / 16, 15 / 16])
        self.assertEqual(box.hi.tolist(), [1 / 16, 0.0, 1.0])

    def test_out_of_range(self):
        with self.assertRaises(ex.OutOfRangeCubeError):
            m.realize(smale_grid(), (0, 0, -1))


class TestMinCover(TestBase):
    def setUp(self):
        super().setUp()
        self.plane = m.GridSpec([m.Bounded(-8, 8), m.Bounded(-8, 8)], 3)
        self.circle = m.GridSpec([m.Periodic(16)], 4)

    def test_interior_point(self):
        cover = m.min_cover(self.plane, IntervalVector.point([0.01, 0.01]))
        self.assertEqual(cover.cubes, frozenset({(0, 0)}))
        self.assertFalse(cover.escaped)

    def test_point_on_face(self):
        cover = m.min_cover(self.plane, IntervalVector.point([0.0, 0.01]))
        self.assertEqual(cover.cubes, frozenset({(-1, 0), (0, 0)}))

    def test_point_on_corner(self):
        cover = m.min_cover(self.plane, IntervalVector.point([0.125, 0.0]))
        self.assertEqual(len(cover.cubes), 4)

    def test_box_ending_on_plane(self):
        box = IntervalVector([0.0, 0.0], [0.125, 0.125])
        cover = m.min_cover(self.plane, box)
        self.assertEqual(cover.cubes, frozenset({(0, 0)}))

    def test_lower_end_on_plane(self):
        line = m.GridSpec([m.Bounded(-4, 4)], 2)
        cover = m.min_cover(line, IntervalVector([0.25], [0.3]))
        self.assertEqual(cover.cubes, frozenset({(1,)}))

    def test_upper_end_on_plane(self):
        line = m.GridSpec([m.Bounded(-4, 4)], 2)
        cover = m.min_cover(line, IntervalVector([0.1], [0.25]))
        self.assertEqual(cover.cubes, frozenset({(0,)}))

    def test_across_plane(self):
        line = m.GridSpec([m.Bounded(-4, 4)], 2)
        cover = m.min_cover(line, IntervalVector([0.1], [0.3]))
        self.assertEqual(cover.cubes, frozenset({(0,), (1,)}))

    def test_doubled_cell(self):
        # t -> 2t maps cell 3 of 16 exactly onto the cells 6 and 7.
        cell = m.realize(self.circle, (3,))
        cover = m.min_cover(self.circle, IntervalVector(2 * cell.lo,
                                                        2 * cell.hi))
        self.assertEqual(cover.cubes, frozenset({(6,), (7,)}))

    def test_periodic_wrap(self):
        cover = m.min_cover(self.circle, IntervalVector([-0.01], [0.01]))
        self.assertEqual(cover.cubes, frozenset({(15,), (0,)}))

    def test_periodic_far_representative(self):
        cover = m.min_cover(self.circle, IntervalVector([3.01], [3.02]))
        self.assertEqual(cover.cubes, frozenset({(0,)}))

    def test_full_period(self):
        cover = m.min_cover(self.circle, IntervalVector([0.2], [1.3]))
        self.assertEqual(len(cover.cubes), 16)

    def test_escape_clipped(self):
        box = IntervalVector([0.9, 0.0], [1.1, 0.01])
        cover = m.min_cover(self.plane, box)
        self.assertTrue(cover.escaped)
        self.assertEqual(cover.cubes, frozenset({(7, 0)}))

    def test_fully_outside(self):
        cover = m.min_cover(self.plane, IntervalVector.point([3.0, 3.0]))
        self.assertTrue(cover.escaped)
        self.assertEqual(cover.cubes, frozenset())

    def test_dimension_mismatch(self):
        with self.assertRaises(ex.DimensionMismatchError):
            m.min_cover(self.plane, IntervalVector.point([0.0]))

    def test_random_boxes(self):
        grid = m.GridSpec([m.Bounded(-8, 8), m.Periodic(8)], 3)
        for _ in range(1000):
            lo = self.rng.uniform([-1.2, -2.0], [1.0, 2.0])
            hi = lo + self.rng.uniform(1e-6, 0.6, size=2)
            box = IntervalVector(lo, hi)
            cover = m.min_cover(grid, box)
            inside = -1.0 <= lo[0] and hi[0] <= 1.0
            self.assertEqual(cover.escaped, not inside)
            # Every sampled point of the box lies in a cover cube.
            for x in self.rng.uniform(lo, hi, size=(10, 2)):
                cube = grid.locate(x)
                if cube is not None:
                    self.assertIn(cube, cover.cubes)
            # Every cover cube meets the interior of the box.
            for cube in cover.cubes:
                self.assertTrue(self._meets(grid, cube, lo, hi))

    @staticmethod
    def _meets(grid, cube, lo, hi):
        side = grid.side
        a, b = cube[0] * side, (cube[0] + 1) * side
        if not max(a, lo[0]) < min(b, hi[0]):
            return False
        for shift in range(-3, 4):
            a = cube[1] * side + shift
            if max(a, lo[1]) < min(a + side, hi[1]):
                return True
        return False


class TestIsConnected(TestBase):
    def setUp(self):
        super().setUp()
        self.plane = m.GridSpec([m.Bounded(-8, 8), m.Bounded(-8, 8)], 3)

    def test_single(self):
        self.assertTrue(m.is_connected(self.plane, [(0, 0)]))

    def test_diagonal_neighbours(self):
        self.assertTrue(m.is_connected(self.plane, [(0, 0), (1, 1)]))

    def test_gap(self):
        self.assertFalse(m.is_connected(self.plane, [(0, 0), (2, 0)]))

    def test_periodic_wrap(self):
        circle = m.GridSpec([m.Periodic(16)], 4)
        self.assertTrue(m.is_connected(circle, [(0,), (15,)]))

    def test_bounded_no_wrap(self):
        line = m.GridSpec([m.Bounded(0, 16)], 4)
        self.assertFalse(m.is_connected(line, [(0,), (15,)]))

    def test_empty(self):
        with self.assertRaises(ex.EmptyCubeSetError):
            m.is_connected(self.plane, [])
