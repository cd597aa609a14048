"""Per-vertex work distribution.

Stages that evaluate something independently for every vertex (image covers,
cone checks) hand a picklable top-level function to `map_items`. With one
process the work runs in order in the calling process. Otherwise it runs in
a `multiprocessing.Pool` and the results are returned in input order, so
callers that merge by key get the same result in either mode.

"""
import logging
import multiprocessing as mp
from functools import partial
from typing import Callable, List, Sequence, Tuple, TypeVar

from conecert.cover import CoverResult, Cube, GridSpec, min_cover, realize
from conecert.dynsys import MapSystem


logger = logging.getLogger(__name__)

T = TypeVar('T')
R = TypeVar('R')

# Below this many items a pool costs more than it saves.
_MIN_PARALLEL_ITEMS = 64


def map_items(func: Callable[[T], R], items: Sequence[T],
              processes: int = 1) -> List[R]:
    """Apply `func` to every item, optionally in a process pool.

    Args:
        func: A picklable callable (top-level function or `partial` of one).
        items: The inputs.
        processes: Number of worker processes. 1 runs in order in-process.

    Returns:
        The results in input order.

    """
    if processes <= 1 or len(items) < _MIN_PARALLEL_ITEMS:
        return [func(item) for item in items]
    chunksize = max(1, len(items) // (4 * processes))
    logger.debug('Mapping %d items on %d processes', len(items), processes)
    with mp.Pool(processes) as pool:
        return pool.map(func, items, chunksize=chunksize)


def image_cover(system: MapSystem, grid: GridSpec, cube: Cube) \
        -> Tuple[Cube, CoverResult]:
    """Cover the rigorous image of one cube."""
    return cube, min_cover(grid, system.eval_i(realize(grid, cube)))


def image_covers(system: MapSystem, grid: GridSpec, cubes: Sequence[Cube],
                 processes: int = 1) -> List[Tuple[Cube, CoverResult]]:
    """Cover the rigorous images of many cubes.

    Args:
        system: The map.
        grid: The grid.
        cubes: The cubes to map.
        processes: Number of worker processes.

    Returns:
        (cube, cover) pairs in the order of `cubes`.

    """
    func: Callable[[Cube], Tuple[Cube, CoverResult]] = \
        partial(image_cover, system, grid)
    return map_items(func, cubes, processes)

