import conecert.workers as m
from conecert.cover import Bounded, GridSpec
from conecert.dynsys import LinearMap

from tests.unit import TestBase


class TestMapItems(TestBase):
    def test_sequential(self):
        self.assertEqual(m.map_items(abs, [-1, 2, -3]), [1, 2, 3])

    def test_parallel_matches_sequential(self):
        items = list(range(-100, 100))
        self.assertEqual(m.map_items(abs, items, processes=2),
                         m.map_items(abs, items, processes=1))

    def test_small_input_stays_in_process(self):
        with self.assertLogs('conecert.workers', level='DEBUG') as cm:
            m.map_items(abs, list(range(200)), processes=2)
            m.logger.debug('marker')
        self.assertEqual(len(cm.output), 2)
        with self.assertLogs('conecert.workers', level='DEBUG') as cm:
            m.map_items(abs, [1, 2], processes=2)
            m.logger.debug('marker')
        self.assertEqual(len(cm.output), 1)


class TestImageCovers(TestBase):
    def setUp(self):
        super().setUp()
        self.grid = GridSpec([Bounded(-8, 8), Bounded(-8, 8)], 3)
        self.system = LinearMap([[0.5, 0.0], [0.0, 0.5]])

    def test_image_cover(self):
        cube, cover = m.image_cover(self.system, self.grid, (7, 7))
        self.assertEqual(cube, (7, 7))
        self.assertEqual(cover.cubes, frozenset({(3, 3)}))
        self.assertFalse(cover.escaped)

    def test_parallel_order(self):
        cubes = sorted(self.grid.all_cubes())
        sequential = m.image_covers(self.system, self.grid, cubes)
        parallel = m.image_covers(self.system, self.grid, cubes, processes=2)
        self.assertEqual(sequential, parallel)
        self.assertEqual([c for c, _ in parallel], cubes)
