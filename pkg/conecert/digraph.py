"""Directed graphs over cubes representing combinatorial maps.

Vertices are interned to dense integer ids in sorted cube order, so two
graphs with the same vertex and edge sets are identical, ids included.

"""
from typing import Dict, FrozenSet, Iterable, Iterator, List, Mapping, \
    Optional, Sequence, Set, Tuple

from conecert.cover import Cube
from conecert.errors import exceptions as ex


Edge = Tuple[Cube, Cube]


class DiGraph:
    """Directed graph whose vertices are cubes.

    Instances are immutable after construction and safe to share across
    threads once the lazy in-set index has been built.

    """

    @classmethod
    def from_out_sets(cls, out_sets: Mapping[Cube, Iterable[Cube]]) \
            -> 'DiGraph':
        """Create a graph from a vertex -> out-set mapping.

        Every key is a vertex. Targets must be keys as well.

        """
        edges = [(v, w) for v, targets in out_sets.items() for w in targets]
        return cls(out_sets.keys(), edges)

    @classmethod
    def from_id_edges(cls, cubes: Sequence[Cube],
                      id_edges: Iterable[Tuple[int, int]]) -> 'DiGraph':
        """Create a graph from a vertex table and integer edge pairs.

        Args:
            cubes: Vertex table indexed by id.
            id_edges: Edges as (src_id, dst_id) pairs into `cubes`.

        Raises:
            conecert.errors.UnknownVertexError: if an id is out of range.

        """
        n = len(cubes)
        edges: List[Edge] = []
        for src, dst in id_edges:
            if not (0 <= src < n and 0 <= dst < n):
                raise ex.UnknownVertexError(
                    f'edge ({src}, {dst}) out of range')
            edges.append((cubes[src], cubes[dst]))
        return cls(cubes, edges)

    def __init__(self, vertices: Iterable[Cube], edges: Iterable[Edge]):
        """Initialize a DiGraph instance.

        Args:
            vertices: The vertex cubes.
            edges: The (source, target) pairs.

        Raises:
            conecert.errors.UnknownVertexError: if an edge endpoint is not a
                vertex.

        """
        self._cubes: List[Cube] = sorted(set(vertices))
        self._ids: Dict[Cube, int] = {c: i for i, c in enumerate(self._cubes)}
        out: List[Set[int]] = [set() for _ in self._cubes]
        for src, dst in edges:
            out[self._require_id(src)].add(self._require_id(dst))
        self._out: List[Tuple[int, ...]] = [tuple(sorted(s)) for s in out]
        self._in: Optional[List[Tuple[int, ...]]] = None

    def _require_id(self, cube: Cube) -> int:
        try:
            return self._ids[cube]
        except KeyError:
            raise ex.UnknownVertexError(f'{cube} is not a vertex')

    def __len__(self) -> int:
        return len(self._cubes)

    def __contains__(self, cube: object) -> bool:
        return cube in self._ids

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, DiGraph):
            return NotImplemented
        return self._cubes == other._cubes and self._out == other._out

    def __hash__(self) -> int:
        return hash((tuple(self._cubes), tuple(self._out)))

    def __repr__(self) -> str:
        return f'DiGraph(vertices={len(self)}, edges={self.edge_count})'

    @property
    def vertices(self) -> Tuple[Cube, ...]:
        """Get the vertices in id order."""
        return tuple(self._cubes)

    @property
    def edge_count(self) -> int:
        """Get the number of edges."""
        return sum(len(s) for s in self._out)

    def vertex_id(self, cube: Cube) -> int:
        """Get the dense id of a vertex.

        Raises:
            conecert.errors.UnknownVertexError: if `cube` is not a vertex.

        """
        return self._require_id(cube)

    def cube_of(self, vertex_id: int) -> Cube:
        """Get the cube of a dense id."""
        if not 0 <= vertex_id < len(self._cubes):
            raise ex.UnknownVertexError(f'no vertex with id {vertex_id}')
        return self._cubes[vertex_id]

    def edges(self) -> Iterator[Edge]:
        """Iterate over edges sorted by (source id, target id)."""
        for i, targets in enumerate(self._out):
            for j in targets:
                yield self._cubes[i], self._cubes[j]

    def id_edges(self) -> Iterator[Tuple[int, int]]:
        """Iterate over edges as sorted (source id, target id) pairs."""
        for i, targets in enumerate(self._out):
            for j in targets:
                yield i, j

    def out_ids(self, vertex_id: int) -> Tuple[int, ...]:
        """Get the sorted out-neighbour ids of a vertex id."""
        return self._out[vertex_id]

    def in_ids(self, vertex_id: int) -> Tuple[int, ...]:
        """Get the sorted in-neighbour ids of a vertex id."""
        if self._in is None:
            incoming: List[List[int]] = [[] for _ in self._cubes]
            for i, targets in enumerate(self._out):
                for j in targets:
                    incoming[j].append(i)
            self._in = [tuple(s) for s in incoming]
        return self._in[vertex_id]

    def out(self, cube: Cube) -> FrozenSet[Cube]:
        """Get out(V) = {W : (V, W) is an edge}.

        Raises:
            conecert.errors.UnknownVertexError: if `cube` is not a vertex.

        """
        return frozenset(self._cubes[j]
                         for j in self._out[self._require_id(cube)])

    def in_(self, cube: Cube) -> FrozenSet[Cube]:
        """Get in(V) = {W : (W, V) is an edge}.

        Raises:
            conecert.errors.UnknownVertexError: if `cube` is not a vertex.

        """
        return frozenset(self._cubes[j]
                         for j in self.in_ids(self._require_id(cube)))

    def transpose(self) -> 'DiGraph':
        """Get the graph with every edge reversed."""
        return DiGraph(self._cubes, ((w, v) for v, w in self.edges()))

    def subgraph(self, vertices: Iterable[Cube]) -> 'DiGraph':
        """Get the subgraph induced by a vertex subset.

        Raises:
            conecert.errors.UnknownVertexError: if a cube is not a vertex.

        """
        keep = {self._require_id(c) for c in vertices}
        edges = [(self._cubes[i], self._cubes[j])
                 for i in keep for j in self._out[i] if j in keep]
        return DiGraph((self._cubes[i] for i in keep), edges)

    def reachable_ids(self, sources: Iterable[int],
                      backward: bool = False) -> Set[int]:
        """Get all ids reachable from `sources` by paths of length >= 0."""
        seen = set(sources)
        stack = list(seen)
        while stack:
            v = stack.pop()
            nbrs = self.in_ids(v) if backward else self._out[v]
            for w in nbrs:
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        return seen


def out(graph: DiGraph, cube: Cube) -> FrozenSet[Cube]:
    """Get the out-set of a vertex."""
    return graph.out(cube)


def transpose(graph: DiGraph) -> DiGraph:
    """Get the edge-reversed graph."""
    return graph.transpose()


def scc_ids(graph: DiGraph) -> List[List[int]]:
    """Partition vertex ids into strongly connected components.

    Iterative Tarjan. Components are listed in reverse topological order of
    the condensation and each component's ids are sorted.

    """
    n = len(graph)
    index = [-1] * n
    low = [0] * n
    on_stack = [False] * n
    stack: List[int] = []
    components: List[List[int]] = []
    counter = 0
    for root in range(n):
        if index[root] != -1:
            continue
        work: List[Tuple[int, int]] = [(root, 0)]
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on_stack[root] = True
        while work:
            v, pos = work[-1]
            targets = graph.out_ids(v)
            if pos < len(targets):
                work[-1] = (v, pos + 1)
                w = targets[pos]
                if index[w] == -1:
                    index[w] = low[w] = counter
                    counter += 1
                    stack.append(w)
                    on_stack[w] = True
                    work.append((w, 0))
                elif on_stack[w]:
                    low[v] = min(low[v], index[w])
                continue
            work.pop()
            if work:
                parent = work[-1][0]
                low[parent] = min(low[parent], low[v])
            if low[v] == index[v]:
                component = []
                while True:
                    w = stack.pop()
                    on_stack[w] = False
                    component.append(w)
                    if w == v:
                        break
                components.append(sorted(component))
    return components


def scc(graph: DiGraph) -> List[FrozenSet[Cube]]:
    """Partition the vertices into strongly connected components."""
    return [frozenset(graph.cube_of(i) for i in comp)
            for comp in scc_ids(graph)]


def is_single_scc(graph: DiGraph) -> bool:
    """Whether the graph is non-empty and strongly connected."""
    return len(graph) > 0 and len(scc_ids(graph)) == 1


def cycle_vertex_sets(graph: DiGraph, max_period: int) \
        -> List[FrozenSet[Cube]]:
    """Group vertices by the shortest closed walk through them.

    Args:
        graph: The graph.
        max_period: The largest walk length N considered.

    Returns:
        A list of N sets where entry i - 1 holds the vertices lying on a
        closed walk of length i and on none shorter.

    Raises:
        conecert.errors.PreconditionError: if `max_period < 1`.

    """
    if max_period < 1:
        raise ex.PreconditionError(f'max_period {max_period} < 1')
    groups: List[Set[Cube]] = [set() for _ in range(max_period)]
    for v in range(len(graph)):
        frontier = set(graph.out_ids(v))
        for length in range(1, max_period + 1):
            if v in frontier:
                groups[length - 1].add(graph.cube_of(v))
                break
            if not frontier or length == max_period:
                break
            nxt: Set[int] = set()
            for w in frontier:
                nxt.update(graph.out_ids(w))
            frontier = nxt
    return [frozenset(g) for g in groups]
