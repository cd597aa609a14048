"""Per-vertex coordinate frames.

A frame C_V maps tangent vectors at points of cube V into adapted
coordinates: the first coordinates follow the expanding directions, the rest
the contracting ones. The columns of C_V^-1 are the frame vectors.

Frames are heuristics. They only need to be invertible, which is certified
by an enclosure of C_V^-1 kept alongside the float matrix.

"""
import logging
from functools import partial
from typing import Callable, Dict, Iterable, Iterator, List, NamedTuple, \
    Optional, Sequence, Tuple

import numpy as np

from typing_extensions import Literal

from conecert.cover import Cube, GridSpec, min_cover
from conecert.digraph import DiGraph, is_single_scc
from conecert.dynsys import MapSystem, PointLike, iterate, orbit_jacobian
from conecert.errors import exceptions as ex
from conecert.interval import FloatArray, IntervalMatrix, IntervalVector, \
    verified_inverse
from conecert.periodic import PeriodicCandidate
from conecert.workers import map_items


logger = logging.getLogger(__name__)

Provenance = Literal['periodic-seed', 'spread']

MAX_EIGENVECTOR_CONDITION = 1e8


class CoordinateFrame:
    """Float coordinate system C with a verified enclosure of C^-1."""

    __slots__ = ('_matrix', '_inverse', '_provenance')

    @classmethod
    def from_matrix(cls, matrix: FloatArray,
                    provenance: Provenance) -> 'CoordinateFrame':
        """Create a frame, certifying that `matrix` is invertible.

        Raises:
            conecert.errors.InverseNotVerifiableError: if C^-1 can't be
                enclosed.

        """
        arr = np.array(matrix, dtype=np.float64)
        return cls(arr, verified_inverse(arr), provenance)

    def __init__(self, matrix: FloatArray, inverse: IntervalMatrix,
                 provenance: Provenance):
        """Initialize a CoordinateFrame instance.

        Args:
            matrix: The coordinate system C.
            inverse: An enclosure of C^-1.
            provenance: How the frame was obtained.

        """
        arr = np.array(matrix, dtype=np.float64)
        arr.setflags(write=False)
        self._matrix = arr
        self._inverse = inverse
        self._provenance = provenance

    @property
    def matrix(self) -> FloatArray:
        """Get C (read-only)."""
        return self._matrix

    @property
    def inverse(self) -> IntervalMatrix:
        """Get the enclosure of C^-1."""
        return self._inverse

    @property
    def provenance(self) -> Provenance:
        """Get how the frame was obtained."""
        return self._provenance

    def frame_vectors(self) -> FloatArray:
        """Get the float midpoint of C^-1, whose columns are the frame."""
        return self._inverse.mid()

    def __repr__(self) -> str:
        return f'CoordinateFrame({self._matrix.tolist()}, ' \
               f'{self._provenance!r})'


class FrameAssignment:
    """Mapping from vertices to frames. Unassigned vertices have no frame."""

    def __init__(self, frames: Optional[Dict[Cube, CoordinateFrame]] = None):
        """Initialize a FrameAssignment instance."""
        self._frames: Dict[Cube, CoordinateFrame] = dict(frames or {})

    def __len__(self) -> int:
        return len(self._frames)

    def __contains__(self, cube: object) -> bool:
        return cube in self._frames

    def __iter__(self) -> Iterator[Cube]:
        return iter(sorted(self._frames))

    def get(self, cube: Cube) -> Optional[CoordinateFrame]:
        """Get the frame of a vertex or None if it is unset."""
        return self._frames.get(cube)

    def require(self, cube: Cube) -> CoordinateFrame:
        """Get the frame of a vertex.

        Raises:
            conecert.errors.MissingFrameError: if it is unset.

        """
        try:
            return self._frames[cube]
        except KeyError:
            raise ex.MissingFrameError(f'no frame for vertex {cube}')

    def claim(self, cube: Cube, frame: CoordinateFrame) -> bool:
        """Set the frame of a vertex unless it is already set.

        Returns:
            True if the frame was stored.

        """
        if cube in self._frames:
            return False
        self._frames[cube] = frame
        return True

    def items(self) -> List[Tuple[Cube, CoordinateFrame]]:
        """Get (vertex, frame) pairs sorted by vertex."""
        return sorted(self._frames.items())

    def missing(self, vertices: Iterable[Cube]) -> List[Cube]:
        """Get the vertices without a frame, sorted."""
        return sorted(v for v in vertices if v not in self._frames)


def normalize_columns(m: FloatArray) -> FloatArray:
    """Scale every column to unit Euclidean norm.

    Raises:
        conecert.errors.IllConditionedFrameError: if a column vanishes.

    """
    norms = np.linalg.norm(m, axis=0)
    if np.any(norms == 0.0) or not np.all(np.isfinite(norms)):
        raise ex.IllConditionedFrameError(float('inf'))
    return np.asarray(m / norms, dtype=np.float64)


def gram_schmidt(m: FloatArray) -> FloatArray:
    """Orthonormalize the columns of a square matrix, first column first.

    Modified Gram-Schmidt, so column j of the result spans the same flag as
    the first j + 1 columns of `m`.

    Raises:
        conecert.errors.IllConditionedFrameError: if the columns are
            numerically dependent.

    """
    out = np.array(m, dtype=np.float64)
    scale = float(np.max(np.abs(out))) if out.size else 0.0
    for i in range(out.shape[1]):
        norm = float(np.linalg.norm(out[:, i]))
        if not norm > 1e-14 * scale:
            raise ex.IllConditionedFrameError(float('inf'))
        out[:, i] /= norm
        for j in range(i + 1, out.shape[1]):
            out[:, j] -= np.dot(out[:, j], out[:, i]) * out[:, i]
    return out


def _canonical_sign(v: FloatArray) -> FloatArray:
    """Flip a vector so that its largest component is positive."""
    i = int(np.argmax(np.abs(v)))
    return -v if v[i] < 0 else v


def eigen_basis(a: FloatArray) -> FloatArray:
    """Get normalized real eigen-directions sorted by decreasing |lambda|.

    A complex conjugate pair contributes the real and imaginary parts of its
    eigenvector, adjacent, spanning the invariant plane.

    Raises:
        conecert.errors.IllConditionedFrameError: if the eigenvector matrix
            has condition number above 1e8.

    """
    values, vectors = np.linalg.eig(np.asarray(a, dtype=np.float64))
    order = sorted(range(len(values)), key=lambda i: (-abs(values[i]), i))
    columns: List[FloatArray] = []
    for i in order:
        lam, vec = values[i], vectors[:, i]
        if abs(lam.imag) <= 1e-12 * max(1.0, abs(lam)):
            columns.append(_canonical_sign(np.real(vec)))
        elif lam.imag > 0:
            columns.append(np.real(vec))
            columns.append(np.imag(vec))
    m = normalize_columns(np.column_stack(columns))
    cond = float(np.linalg.cond(m))
    if not cond <= MAX_EIGENVECTOR_CONDITION:
        raise ex.IllConditionedFrameError(cond)
    return m


def eigen_frame(system: MapSystem, y: PointLike,
                period: int) -> CoordinateFrame:
    """Build the frame of a periodic point from its eigen-directions.

    Args:
        system: The map.
        y: An approximate periodic point.
        period: Its period.

    Returns:
        The frame C = M^-1, M the sorted eigenvector matrix of Df^period(y).

    Raises:
        conecert.errors.IllConditionedFrameError: if the eigenvector matrix
            is near defective.

    """
    m = eigen_basis(orbit_jacobian(system, y, period))
    try:
        return CoordinateFrame.from_matrix(np.linalg.inv(m), 'periodic-seed')
    except (np.linalg.LinAlgError, ex.InverseNotVerifiableError):
        raise ex.IllConditionedFrameError(float(np.linalg.cond(m)))


def _candidate_vertex(grid: GridSpec, graph: DiGraph,
                      point: FloatArray) -> Optional[Cube]:
    located = grid.locate(point)
    if located is not None and located in graph:
        return located
    cover = min_cover(grid, IntervalVector.point(point))
    for cube in sorted(cover.cubes):
        if cube in graph:
            return cube
    return None


def seed_frames(assignment: FrameAssignment,
                candidates: Sequence[Sequence[PeriodicCandidate]],
                system: MapSystem, graph: DiGraph,
                grid: GridSpec) -> FrameAssignment:
    """Assign eigen frames to the cubes containing periodic points.

    Periods are processed in ascending order and a vertex keeps the first
    frame it gets, so it carries the frame of a lowest period point.

    Args:
        assignment: Frames so far. Updated in place.
        candidates: Entry i - 1 holds candidates of period i.
        system: The map.
        graph: The enclosure graph.
        grid: Its grid.

    Returns:
        The updated assignment.

    """
    for group in candidates:
        for cand in group:
            cube = _candidate_vertex(grid, graph, cand.point)
            if cube is None:
                logger.warning('Periodic point %s outside of the enclosure',
                               cand.point.tolist())
                continue
            if cube in assignment:
                continue
            try:
                frame = eigen_frame(system, cand.point, cand.period)
            except ex.IllConditionedFrameError as e:
                logger.warning('No frame at %s: %s', cand.point.tolist(), e)
                continue
            assignment.claim(cube, frame)
    return assignment


class PropagatedFrame(NamedTuple):
    """Frame matrix pushed from a vertex to its out-neighbours."""

    source: Cube
    matrix: Optional[FloatArray]
    # True if the orthonormalized frame replaced the pulled back one.
    fallback: bool


def propagate_frame(system: MapSystem, grid: GridSpec, k: int,
                    item: Tuple[Cube, FloatArray]) -> PropagatedFrame:
    """Carry a frame one step forward along the map.

    The frame vectors M = C_V^-1 at the centre u of V are pushed forward k
    steps, orthonormalized, and pulled back k - 1 steps, which places them at
    f(u).

    Args:
        system: The map.
        grid: The grid.
        k: Number of forward steps (>= 1).
        item: The source vertex and its frame matrix C_V.

    Returns:
        The new frame matrix C_W, or None if no frame could be built. The
        fallback flag is set when the orthonormalized frame was used.

    """
    cube, c_v = item
    u = grid.centre(cube)
    points = iterate(system, u, k - 1)
    jacobians = [system.jac(p) for p in points]
    try:
        m = np.linalg.inv(c_v)
        for a in jacobians:
            m = a @ m
        q = gram_schmidt(m)
    except (np.linalg.LinAlgError, ex.IllConditionedFrameError):
        return PropagatedFrame(cube, None, True)
    m = q
    try:
        for a in reversed(jacobians[1:]):
            m = np.linalg.solve(a, m)
        m = normalize_columns(m)
        # Invertibility is certified once the frame is built in
        # `spread_frames`.
        if np.linalg.cond(m) <= MAX_EIGENVECTOR_CONDITION:
            return PropagatedFrame(cube, np.linalg.inv(m), False)
    except (np.linalg.LinAlgError, ex.IllConditionedFrameError):
        pass
    return PropagatedFrame(cube, q.T.copy(), True)


def spread_frames(graph: DiGraph, assignment: FrameAssignment,
                  system: MapSystem, grid: GridSpec, k: int = 2,
                  require_single_scc: bool = True,
                  processes: int = 1) -> FrameAssignment:
    """Propagate frames from seeded vertices along the edges.

    Frontiers are processed breadth first. Every frontier vertex pushes its
    frame to its out-neighbours and each unset neighbour takes the frame of
    the first frontier vertex in id order that reaches it.

    Args:
        graph: The enclosure graph.
        assignment: Frames so far, at least one set. Updated in place.
        system: The map.
        grid: The grid.
        k: Forward steps per propagation, >= 2 as a rule.
        require_single_scc: Fail if the graph isn't strongly connected.
        processes: Worker processes computing a frontier's frames.

    Returns:
        The updated assignment.

    Raises:
        conecert.errors.NotStronglyConnectedError: if `require_single_scc`
            and the graph has several components.
        conecert.errors.PreconditionError: if no vertex is seeded or k < 1.
        conecert.errors.MissingFrameError: if some vertex is left unset.

    """
    if k < 1:
        raise ex.PreconditionError(f'spread_k {k} < 1')
    if require_single_scc and not is_single_scc(graph):
        raise ex.NotStronglyConnectedError(
            'frames can only be spread over a strongly connected graph')
    frontier = [v for v in graph.vertices if v in assignment]
    if not frontier:
        raise ex.PreconditionError('no seeded frame to spread')
    func: Callable[[Tuple[Cube, FloatArray]], PropagatedFrame] = \
        partial(propagate_frame, system, grid, k)
    passes = 0
    fallbacks = 0
    while frontier:
        passes += 1
        items = [(v, assignment.require(v).matrix) for v in frontier]
        nxt: List[Cube] = []
        for result in map_items(func, items, processes):
            if result.matrix is None:
                logger.warning('Could not propagate frame from %s',
                               result.source)
                continue
            targets = [w for w in sorted(graph.out(result.source))
                       if w not in assignment]
            if not targets:
                continue
            if result.fallback:
                fallbacks += 1
                logger.warning('Using orthonormalized frame from %s',
                               result.source)
            try:
                frame = CoordinateFrame.from_matrix(result.matrix, 'spread')
            except ex.InverseNotVerifiableError:
                logger.warning('Frame from %s not invertible', result.source)
                continue
            for w in targets:
                if assignment.claim(w, frame):
                    nxt.append(w)
        frontier = nxt
    missing = assignment.missing(graph.vertices)
    logger.info('Spread frames in %d passes, %d fallbacks, %d unset',
                passes, fallbacks, len(missing))
    if missing:
        raise ex.MissingFrameError(
            f'{len(missing)} vertices without frame, eg. {missing[0]}')
    return assignment


def reachable_from_frames(graph: DiGraph,
                          assignment: FrameAssignment) -> DiGraph:
    """Restrict a graph to the vertices reachable from framed vertices.

    Spreading can only reach these vertices. The restriction is forward
    invariant, so every out-edge of a kept vertex is kept.

    Args:
        graph: The enclosure graph.
        assignment: The seeded frames.

    Returns:
        The induced subgraph.

    Raises:
        conecert.errors.PreconditionError: if no vertex of the graph has a
            frame.

    """
    sources = [graph.vertex_id(v) for v in graph.vertices if v in assignment]
    if not sources:
        raise ex.PreconditionError('no seeded frame to spread')
    ids = graph.reachable_ids(sources)
    return graph.subgraph(graph.cube_of(i) for i in sorted(ids))
