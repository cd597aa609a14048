"""Cone conditions and certified expansion rates.

For every edge (V, W) the matrix M = C_W [Df(|V|)] C_V^-1 encloses the
derivative in adapted coordinates. The edge satisfies the cone condition
when M^T Q M - Q is positive definite, Q = diag(I_u, -I_s). If every edge
passes, the map is hyperbolic on the maximal invariant set of the support of
the graph.

With all edges passing, bisection on lambda finds the largest lambda_bar
such that M^T Q M - lambda_bar Q stays positive definite on every edge. The
forward expansion rate is then sqrt(lambda_bar). The same search below one
gives the expansion rate of the inverse on the negative cones.

"""
import logging
import math
from functools import partial
from typing import Callable, FrozenSet, List, NamedTuple, Optional, \
    Sequence, Tuple

import numpy as np

from conecert.cover import Cube, GridSpec, realize
from conecert.digraph import DiGraph, Edge
from conecert.dynsys import MapSystem
from conecert.errors import exceptions as ex
from conecert.frames import FrameAssignment
from conecert.interval import FloatArray, Interval, IntervalMatrix, \
    cholesky_min_pivot, mat_mul
from conecert.workers import map_items


logger = logging.getLogger(__name__)


class QuadraticForm:
    """Diagonal form Q = diag(I_u, -I_s) of signature (u, s)."""

    def __init__(self, u: int, s: int):
        """Initialize a QuadraticForm instance.

        Args:
            u: Number of expanding directions.
            s: Number of contracting directions.

        Raises:
            conecert.errors.PreconditionError: if a count is negative or
                both are zero.

        """
        if u < 0 or s < 0 or u + s == 0:
            raise ex.PreconditionError(f'bad signature ({u}, {s})')
        self._u = int(u)
        self._s = int(s)

    @property
    def u(self) -> int:
        """Get the number of expanding directions."""
        return self._u

    @property
    def s(self) -> int:
        """Get the number of contracting directions."""
        return self._s

    @property
    def dimension(self) -> int:
        """Get u + s."""
        return self._u + self._s

    @property
    def signs(self) -> FloatArray:
        """Get the diagonal of Q."""
        return np.array([1.0] * self._u + [-1.0] * self._s)

    @property
    def matrix(self) -> FloatArray:
        """Get Q."""
        return np.diag(self.signs)

    def value(self, v: FloatArray) -> float:
        """Evaluate Q(v) = |v_u|^2 - |v_s|^2 in floating point."""
        return float(np.dot(self.signs * v, v))

    def __repr__(self) -> str:
        return f'QuadraticForm(u={self._u}, s={self._s})'

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, QuadraticForm):
            return NotImplemented
        return self._u == other._u and self._s == other._s

    def __hash__(self) -> int:
        return hash((self._u, self._s))


class EdgeMargin(NamedTuple):
    """Outcome of the cone test on one edge."""

    edge: Edge
    # Lower bound of the smallest Cholesky pivot, None if not verified.
    margin: Optional[float]


class ConeReport(NamedTuple):
    """Result of `verify_cone_conditions`."""

    # Source vertices of failing edges.
    unverified: FrozenSet[Cube]
    failed_edges: Tuple[Edge, ...]
    # Smallest pivot bound over all verified edges.
    min_margin: Optional[float]
    vertex_count: int
    edge_count: int

    @property
    def verified(self) -> bool:
        """Whether every edge passed."""
        return not self.unverified


class CertifiedRates(NamedTuple):
    """Certified hyperbolicity constants."""

    lambda_bar: float
    # sqrt(lambda_bar), rounded down.
    lam: float
    d1: float
    d2: float
    r: float
    l_bound: float
    c: float
    # Backward constants, None if lambda_bar_s < 1 could not be verified.
    stable_lambda_bar: Optional[float] = None
    stable_lam: Optional[float] = None
    stable_l_bound: Optional[float] = None
    stable_c: Optional[float] = None


def _apply_signs(m: IntervalMatrix, signs: FloatArray) -> IntervalMatrix:
    """Multiply row i by signs[i] in {1, -1}, exactly."""
    col = signs.reshape(-1, 1)
    lo = np.where(col > 0, m.lo, -m.hi)
    hi = np.where(col > 0, m.hi, -m.lo)
    return IntervalMatrix(lo, hi)


def quadratic_image(m: IntervalMatrix, q: QuadraticForm) -> IntervalMatrix:
    """Enclose M^T Q M."""
    return mat_mul(m.T, _apply_signs(m, q.signs))


def edge_matrix(c_w: FloatArray, jacobian: IntervalMatrix,
                inv_v: IntervalMatrix) -> IntervalMatrix:
    """Enclose C_W D C_V^-1 as (C_W D) C_V^-1."""
    return mat_mul(mat_mul(IntervalMatrix.point(c_w), jacobian), inv_v)


class _VertexTask(NamedTuple):
    cube: Cube
    inv_v: IntervalMatrix
    targets: Tuple[Tuple[Cube, FloatArray], ...]


def _vertex_quadratic_images(system: MapSystem, grid: GridSpec,
                             q: QuadraticForm, task: _VertexTask) \
        -> List[Tuple[Edge, IntervalMatrix]]:
    jacobian = system.jac_i(realize(grid, task.cube))
    return [((task.cube, w), quadratic_image(
                edge_matrix(c_w, jacobian, task.inv_v), q))
            for w, c_w in task.targets]


def _check_vertex(system: MapSystem, grid: GridSpec, q: QuadraticForm,
                  task: _VertexTask) -> List[EdgeMargin]:
    shift = IntervalMatrix.point(q.matrix)
    return [EdgeMargin(edge, cholesky_min_pivot(p - shift))
            for edge, p in _vertex_quadratic_images(system, grid, q, task)]


def _tasks(graph: DiGraph, frames: FrameAssignment) -> List[_VertexTask]:
    tasks = []
    for v in graph.vertices:
        inv_v = frames.require(v).inverse
        targets = tuple((w, frames.require(w).matrix)
                        for w in sorted(graph.out(v)))
        tasks.append(_VertexTask(v, inv_v, targets))
    return tasks


def _check_dimensions(system: MapSystem, q: QuadraticForm) -> None:
    if q.dimension != system.dimension:
        raise ex.DimensionMismatchError(
            f'signature ({q.u}, {q.s}) on a {system.dimension}-dimensional '
            f'map')


def verify_cone_conditions(graph: DiGraph, frames: FrameAssignment,
                           q: QuadraticForm, system: MapSystem,
                           grid: GridSpec,
                           processes: int = 1) -> ConeReport:
    """Check the cone condition on every edge.

    Args:
        graph: The enclosure graph.
        frames: A frame for every vertex.
        q: The quadratic form.
        system: The map.
        grid: The grid of the graph.
        processes: Worker processes, one task per source vertex.

    Returns:
        The report. An empty unverified set proves hyperbolicity.

    Raises:
        conecert.errors.MissingFrameError: if a vertex has no frame.
        conecert.errors.DimensionMismatchError: if the signature doesn't
            match the map.

    """
    _check_dimensions(system, q)
    func: Callable[[_VertexTask], List[EdgeMargin]] = \
        partial(_check_vertex, system, grid, q)
    unverified = set()
    failed: List[Edge] = []
    margins: List[float] = []
    edge_count = 0
    for results in map_items(func, _tasks(graph, frames), processes):
        for result in results:
            edge_count += 1
            if result.margin is None:
                unverified.add(result.edge[0])
                failed.append(result.edge)
                logger.debug('Cone condition fails on %s -> %s', *result.edge)
            else:
                margins.append(result.margin)
    logger.info('Cone conditions: %d of %d edges verified, %d vertices '
                'unverified', edge_count - len(failed), edge_count,
                len(unverified))
    return ConeReport(unverified=frozenset(unverified),
                      failed_edges=tuple(failed),
                      min_margin=min(margins) if margins else None,
                      vertex_count=len(graph), edge_count=edge_count)


def _all_pd(images: Sequence[IntervalMatrix], q: QuadraticForm,
            lam: float, shift: float = 0.0) -> Optional[float]:
    """Smallest pivot bound of P - lam Q - shift I over all P, or None."""
    target = IntervalMatrix.point(lam * q.matrix + shift * np.eye(q.dimension))
    best = math.inf
    for p in images:
        margin = cholesky_min_pivot(p - target)
        if margin is None:
            return None
        best = min(best, margin)
    return best


def _uniform_lower_bound(images: Sequence[IntervalMatrix], q: QuadraticForm,
                         lam: float) -> Optional[float]:
    """Certify L > 0 with P - lam Q - L I positive definite for all P."""
    mids = [np.linalg.eigvalsh(0.5 * (p.mid() + p.mid().T)
                               - lam * q.matrix) for p in images]
    guess = 0.5 * min(float(np.min(ev)) for ev in mids)
    if not guess > 0.0:
        return None
    for _ in range(40):
        if _all_pd(images, q, lam, guess) is not None:
            return guess
        guess *= 0.5
    return None


def _bisect(feasible: Callable[[float], bool], good: float, bad: float,
            tol: float) -> float:
    """Move `good` toward `bad` while staying feasible."""
    while abs(bad - good) > tol:
        mid = 0.5 * (good + bad)
        if feasible(mid):
            good = mid
        else:
            bad = mid
    return good


def _frame_norms(frames: FrameAssignment,
                 vertices: Sequence[Cube]) -> Tuple[float, float]:
    d1 = 0.0
    d2 = 0.0
    for v in vertices:
        frame = frames.require(v)
        d1 = max(d1, IntervalMatrix.point(frame.matrix).frobenius_upper())
        d2 = max(d2, frame.inverse.frobenius_upper())
    return d1, d2


def _rate_constant(d1: float, d2: float, l_bound: float,
                   lam: Interval) -> float:
    """Lower bound of c = (R L)^1/2 / (lam D2) with R = D1^-2."""
    r = 1 / Interval(d1).sqr()
    c = (r * l_bound).sqrt() / (lam * d2)
    return c.lo


def certify_rates(graph: DiGraph, frames: FrameAssignment, q: QuadraticForm,
                  system: MapSystem, grid: GridSpec, bisect_tol: float = 1e-3,
                  lambda_max: float = 16.0,
                  processes: int = 1) -> CertifiedRates:
    """Certify expansion constants for a verified graph.

    Args:
        graph: The enclosure graph, every edge verified.
        frames: A frame for every vertex.
        q: The quadratic form.
        system: The map.
        grid: The grid of the graph.
        bisect_tol: Bisection stops when the bracket is this narrow.
        lambda_max: Upper end of the search for lambda_bar.
        processes: Worker processes for the per-edge enclosures.

    Returns:
        The certified constants.

    Raises:
        conecert.errors.RatesNotVerifiableError: if no lambda_bar > 1 (or no
            L > 0) can be certified.

    """
    _check_dimensions(system, q)
    func: Callable[[_VertexTask], List[Tuple[Edge, IntervalMatrix]]] = \
        partial(_vertex_quadratic_images, system, grid, q)
    images = [p for results in map_items(func, _tasks(graph, frames),
                                         processes)
              for _, p in results]
    if not images:
        raise ex.RatesNotVerifiableError('graph has no edges')

    def feasible(lam: float) -> bool:
        return _all_pd(images, q, lam) is not None

    if feasible(lambda_max):
        lambda_bar = lambda_max
    else:
        lambda_bar = _bisect(feasible, 1.0, lambda_max, bisect_tol)
    if not lambda_bar > 1.0 or not feasible(lambda_bar):
        raise ex.RatesNotVerifiableError('no expansion rate above one')
    l_bound = _uniform_lower_bound(images, q, lambda_bar)
    if l_bound is None:
        raise ex.RatesNotVerifiableError('no positive uniform bound L')
    d1, d2 = _frame_norms(frames, graph.vertices)
    lam_i = Interval(lambda_bar).sqrt()
    rates = CertifiedRates(lambda_bar=lambda_bar, lam=lam_i.lo, d1=d1, d2=d2,
                           r=(1 / Interval(d1).sqr()).lo, l_bound=l_bound,
                           c=_rate_constant(d1, d2, l_bound, lam_i))

    lambda_min = 1.0 / lambda_max
    if feasible(lambda_min):
        stable_bar = lambda_min
    else:
        stable_bar = _bisect(feasible, 1.0, lambda_min, bisect_tol)
    if stable_bar < 1.0 and feasible(stable_bar):
        stable_l = _uniform_lower_bound(images, q, stable_bar)
        if stable_l is not None:
            stable_lam = (1 / Interval(stable_bar).sqrt())
            rates = rates._replace(
                stable_lambda_bar=stable_bar, stable_lam=stable_lam.lo,
                stable_l_bound=stable_l,
                stable_c=_rate_constant(d1, d2, stable_l, stable_lam))
    logger.info('Certified lambda_bar=%.6g lambda=%.6g c=%.3g',
                rates.lambda_bar, rates.lam, rates.c)
    return rates

