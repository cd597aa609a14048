"""Rigorous cubical enclosures of invariant sets.

Two strategies build a graph whose edges cover the map:

* attractor (inner): start from one cube near the attractor and add the
  rigorous image covers of newly reached cubes until nothing new appears.
  The support of the result is positively invariant.
* outer: cover a candidate region, drop cubes that can't lie on a
  bi-infinite path inside the region, bisect the survivors and repeat.

"""
import logging
import time
from typing import Dict, FrozenSet, Iterable, List, NamedTuple, Set, Tuple

from typing_extensions import Literal

from conecert.cover import Cube, GridSpec
from conecert.digraph import DiGraph, scc_ids
from conecert.dynsys import MapSystem, PointLike
from conecert.errors import exceptions as ex
from conecert.workers import image_covers


logger = logging.getLogger(__name__)

Strategy = Literal['attractor', 'outer']


class EnclosureResult(NamedTuple):
    """Result of an enclosure strategy."""

    graph: DiGraph
    grid: GridSpec
    strategy: Strategy
    # True if some image box left the domain and its cover was clipped.
    escaped: bool


def find_seed(grid: GridSpec, system: MapSystem, start: PointLike,
              transient: int) -> Cube:
    """Locate a cube near the attractor by float iteration.

    Args:
        grid: The grid.
        system: The map.
        start: Initial point.
        transient: Number of iterates to discard.

    Returns:
        The cube containing the `transient`-th iterate.

    Raises:
        conecert.errors.SeedEscapedError: if an iterate leaves the domain.

    """
    point = grid.reduce_point(start)
    if grid.locate(point) is None:
        raise ex.SeedEscapedError(0)
    for step in range(1, transient + 1):
        point = grid.reduce_point(system.eval(point))
        if grid.locate(point) is None:
            raise ex.SeedEscapedError(step)
    cube = grid.locate(point)
    assert cube is not None
    return cube


def enclose_attractor(seed: Cube, grid: GridSpec, system: MapSystem,
                      processes: int = 1) -> EnclosureResult:
    """Enclose the forward trajectory of a seed cube.

    Args:
        seed: A cube of the grid.
        grid: The grid.
        system: The map.
        processes: Worker processes used to map each frontier.

    Returns:
        The closed graph. Every vertex's image cover is a subset of its
        vertices.

    Raises:
        conecert.errors.OutOfRangeCubeError: if the seed isn't in the grid.
        conecert.errors.EnclosureFailure: if an image leaves the domain.

    """
    grid.validate(seed)
    out_sets: Dict[Cube, FrozenSet[Cube]] = {}
    visited: Set[Cube] = {seed}
    frontier: List[Cube] = [seed]
    level = 0
    while frontier:
        new: Set[Cube] = set()
        for cube, cover in image_covers(system, grid, frontier, processes):
            if cover.escaped:
                raise ex.EnclosureFailure(cube)
            out_sets[cube] = cover.cubes
            new.update(c for c in cover.cubes if c not in visited)
        visited.update(new)
        frontier = sorted(new)
        level += 1
        logger.debug('Enclosure level %d: %d new, %d total',
                     level, len(frontier), len(visited))
    graph = DiGraph.from_out_sets(out_sets)
    return EnclosureResult(graph=graph, grid=grid, strategy='attractor',
                           escaped=False)


def prune_to_core(graph: DiGraph) -> DiGraph:
    """Drop vertices with no in-edge or no out-edge until none remain.

    The result is the largest subgraph in which every vertex lies on a
    bi-infinite path.

    """
    n = len(graph)
    out_deg = [len(graph.out_ids(v)) for v in range(n)]
    in_deg = [len(graph.in_ids(v)) for v in range(n)]
    removed = [False] * n
    stack = [v for v in range(n) if out_deg[v] == 0 or in_deg[v] == 0]
    while stack:
        v = stack.pop()
        if removed[v]:
            continue
        removed[v] = True
        for w in graph.out_ids(v):
            in_deg[w] -= 1
            if in_deg[w] == 0 and not removed[w]:
                stack.append(w)
        for w in graph.in_ids(v):
            out_deg[w] -= 1
            if out_deg[w] == 0 and not removed[w]:
                stack.append(w)
    return graph.subgraph(graph.cube_of(v) for v in range(n)
                          if not removed[v])


def recurrent_core(graph: DiGraph) -> DiGraph:
    """Keep only vertices of strongly connected components with a cycle."""
    keep: List[Cube] = []
    for comp in scc_ids(graph):
        v = comp[0]
        if len(comp) > 1 or v in graph.out_ids(v):
            keep.extend(graph.cube_of(i) for i in comp)
    return graph.subgraph(keep)


def _outer_graph(system: MapSystem, grid: GridSpec, cubes: Iterable[Cube],
                 processes: int) -> Tuple[DiGraph, bool]:
    vertices = sorted(set(cubes))
    members = set(vertices)
    escaped = False
    out_sets: Dict[Cube, List[Cube]] = {}
    for cube, cover in image_covers(system, grid, vertices, processes):
        escaped = escaped or cover.escaped
        out_sets[cube] = [c for c in cover.cubes if c in members]
    return DiGraph.from_out_sets(out_sets), escaped


def enclose_invariant_outer(grid: GridSpec, system: MapSystem,
                            initial: Iterable[Cube], max_refine: int,
                            scc_core: bool = False,
                            processes: int = 1) -> EnclosureResult:
    """Enclose the maximal invariant set of a region.

    Args:
        grid: The grid of `initial`.
        system: The map.
        initial: The cubes whose support is the region.
        max_refine: Number of bisection rounds after the first pruning.
        scc_core: Also restrict to the recurrent core after each pruning.
        processes: Worker processes used to map the cubes.

    Returns:
        The pruned graph at resolution `grid.k + max_refine`.

    Raises:
        conecert.errors.EmptyCubeSetError: if `initial` is empty.
        conecert.errors.NoInvariantSetError: if pruning removes every cube.

    """
    cubes = sorted(set(initial))
    if not cubes:
        raise ex.EmptyCubeSetError('outer enclosure of an empty region')
    for cube in cubes:
        grid.validate(cube)
    escaped_any = False
    level = 0
    while True:
        started = time.perf_counter()
        graph, escaped = _outer_graph(system, grid, cubes, processes)
        escaped_any = escaped_any or escaped
        graph = prune_to_core(graph)
        if scc_core:
            graph = recurrent_core(graph)
        logger.info('Outer enclosure k=%d: %d of %d cubes kept (%.2fs)',
                    grid.k, len(graph), len(cubes),
                    time.perf_counter() - started)
        if len(graph) == 0:
            raise ex.NoInvariantSetError()
        if level >= max_refine:
            break
        cubes = sorted(child for v in graph.vertices
                       for child in grid.children(v))
        grid = grid.refine()
        level += 1
    return EnclosureResult(graph=graph, grid=grid, strategy='outer',
                           escaped=escaped_any)


def audit_invariance(result: EnclosureResult, system: MapSystem,
                     processes: int = 1) -> List[Cube]:
    """Recompute every image cover and check it stays in the vertex set.

    Args:
        result: An attractor enclosure.
        system: The map it was computed for.
        processes: Worker processes used to map the cubes.

    Returns:
        The vertices whose image escapes the domain or leaves the vertex
        set. Empty means the support is positively invariant.

    """
    graph = result.graph
    vertices = set(graph.vertices)
    violators = []
    for cube, cover in image_covers(system, result.grid, graph.vertices,
                                    processes):
        if cover.escaped or not cover.cubes <= vertices:
            violators.append(cube)
    return violators
