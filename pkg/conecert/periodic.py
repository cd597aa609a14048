"""Periodic points: float Newton refinement and interval Newton proofs.

Candidates are found by the float Newton method on g(x) = f^i(x) - x seeded
at the centres of cubes that lie on closed walks of length i. Candidates are
then proved by the interval Newton operator

    N(x0, X) = x0 - [Dg(X)]^-1 g(x0),

where N strictly inside X implies that g has exactly one zero in X, and that
zero lies in N. Periodic orbits of period p are proved on the multiple
shooting system F(x_0, ..., x_{p-1}) = (f(x_0) - x_1, ..., f(x_{p-1}) - x_0).

In periodic dimensions residuals are taken in a local chart: the integer
number of periods closest to the float residual is subtracted.

"""
import itertools
import logging
from abc import ABC, abstractmethod
from typing import Collection, List, NamedTuple, Optional, Sequence

import numpy as np

from conecert.cover import Cube, GridSpec, min_cover
from conecert.digraph import DiGraph
from conecert.dynsys import MapSystem, PointLike, iterate, orbit_jacobian
from conecert.errors import exceptions as ex
from conecert.interval import FloatArray, Interval, IntervalMatrix, \
    IntervalVector, interval_solve


logger = logging.getLogger(__name__)

Periods = Sequence[Optional[float]]


class PeriodicCandidate(NamedTuple):
    """Float approximation of a periodic point."""

    point: FloatArray
    # Principal period.
    period: int
    # Cube whose centre seeded the Newton iteration.
    cube: Cube


class RigorousOrbitProof(NamedTuple):
    """Outcome of an interval Newton test."""

    center: FloatArray
    radius: float
    # None if the operator could not be evaluated.
    newton_image: Optional[IntervalVector]
    verdict: bool
    # Upper bound of the max-norm distance from N to the centre.
    distance: float
    # Whether N lies in the support of the enclosure, if it was checked.
    in_support: Optional[bool] = None


def _chart_offsets(diff: FloatArray, periods: Periods) -> FloatArray:
    """Multiples of the periods nearest to a float difference."""
    out = np.zeros_like(diff)
    n = len(periods)
    for i, d in enumerate(diff):
        period = periods[i % n]
        if period is not None:
            out[i] = round(float(d) / period) * period
    return out


def periodic_distance(x: PointLike, y: PointLike, periods: Periods) -> float:
    """Max-norm distance with periodic coordinates compared on the circle."""
    diff = np.asarray(x, dtype=np.float64) - np.asarray(y, dtype=np.float64)
    return float(np.max(np.abs(diff - _chart_offsets(diff, periods))))


class ResidualSystem(ABC):
    """Abstract base class of maps g whose zeros are sought."""

    @property
    @abstractmethod
    def dimension(self) -> int:
        """Get the number of unknowns."""
        raise NotImplementedError  # pragma: no cover

    @abstractmethod
    def eval(self, x: FloatArray) -> FloatArray:
        """Evaluate g in floating point."""
        raise NotImplementedError  # pragma: no cover

    @abstractmethod
    def jac(self, x: FloatArray) -> FloatArray:
        """Evaluate Dg in floating point."""
        raise NotImplementedError  # pragma: no cover

    @abstractmethod
    def eval_i(self, box: IntervalVector) -> IntervalVector:
        """Enclose g over a box."""
        raise NotImplementedError  # pragma: no cover

    @abstractmethod
    def jac_i(self, box: IntervalVector) -> IntervalMatrix:
        """Enclose Dg over a box."""
        raise NotImplementedError  # pragma: no cover


class OrbitResidual(ResidualSystem):
    """Multiple shooting residual of a period-p orbit."""

    def __init__(self, system: MapSystem, period: int,
                 periods: Optional[Periods] = None):
        """Initialize an OrbitResidual instance.

        Args:
            system: The map f.
            period: The orbit length p.
            periods: Period length per dimension of the phase space, None
                for non-periodic dimensions.

        Raises:
            conecert.errors.PreconditionError: if `period < 1`.

        """
        if period < 1:
            raise ex.PreconditionError(f'period {period} < 1')
        self._system = system
        self._period = period
        n = system.dimension
        self._periods: Periods = list(periods) if periods is not None \
            else [None] * n
        if len(self._periods) != n:
            raise ex.DimensionMismatchError(
                f'{len(self._periods)} periods for dimension {n}')

    @property
    def dimension(self) -> int:
        """Get the number of unknowns p * n."""
        return self._period * self._system.dimension

    def _blocks(self, x: FloatArray) -> List[FloatArray]:
        n = self._system.dimension
        return [x[j * n:(j + 1) * n] for j in range(self._period)]

    def _raw(self, x: FloatArray) -> FloatArray:
        blocks = self._blocks(np.asarray(x, dtype=np.float64))
        images = [self._system.eval(b) for b in blocks]
        return np.concatenate([images[j] - blocks[(j + 1) % self._period]
                               for j in range(self._period)])

    def eval(self, x: FloatArray) -> FloatArray:
        raw = self._raw(x)
        return raw - _chart_offsets(raw, self._periods)

    def jac(self, x: FloatArray) -> FloatArray:
        n, p = self._system.dimension, self._period
        out = np.zeros((n * p, n * p))
        for j, block in enumerate(self._blocks(np.asarray(x, dtype=float))):
            nxt = (j + 1) % p
            rows = slice(j * n, (j + 1) * n)
            out[rows, rows] += self._system.jac(block)
            out[rows, nxt * n:(nxt + 1) * n] -= np.eye(n)
        return out

    def eval_i(self, box: IntervalVector) -> IntervalVector:
        n, p = self._system.dimension, self._period
        offsets = _chart_offsets(self._raw(box.mid()), self._periods)
        comps = list(box)
        out: List[Interval] = []
        for j in range(p):
            image = self._system.eval_i(
                IntervalVector.from_intervals(comps[j * n:(j + 1) * n]))
            nxt = comps[((j + 1) % p) * n:((j + 1) % p + 1) * n]
            for d in range(n):
                out.append(image[d] - nxt[d] - float(offsets[j * n + d]))
        return IntervalVector.from_intervals(out)

    def jac_i(self, box: IntervalVector) -> IntervalMatrix:
        n, p = self._system.dimension, self._period
        lo = np.zeros((n * p, n * p))
        hi = np.zeros((n * p, n * p))
        comps = list(box)
        for j in range(p):
            block = self._system.jac_i(
                IntervalVector.from_intervals(comps[j * n:(j + 1) * n]))
            nxt = (j + 1) % p
            rows = slice(j * n, (j + 1) * n)
            lo[rows, j * n:(j + 1) * n] = block.lo
            hi[rows, j * n:(j + 1) * n] = block.hi
            # Adding -I to a diagonal block only happens when p == 1.
            if nxt == j:
                diag = IntervalMatrix(lo[rows, rows], hi[rows, rows]) - \
                    IntervalMatrix.identity(n)
                lo[rows, rows] = diag.lo
                hi[rows, rows] = diag.hi
            else:
                lo[rows, nxt * n:(nxt + 1) * n] = -np.eye(n)
                hi[rows, nxt * n:(nxt + 1) * n] = -np.eye(n)
        return IntervalMatrix(lo, hi)


def interval_newton(residual: ResidualSystem, center: PointLike,
                    radius: float) -> RigorousOrbitProof:
    """Test the interval Newton condition on the max-norm ball.

    Args:
        residual: The system g.
        center: The ball centre x0.
        radius: The ball radius r.

    Returns:
        The proof record. A true verdict means g has exactly one zero in the
        ball and it lies in the Newton image.

    Raises:
        conecert.errors.NewtonOperatorUndefinedError: if the interval
            Jacobian over the ball is not verifiably invertible.

    """
    x0 = np.asarray(center, dtype=np.float64)
    ball = IntervalVector.ball(x0, radius)
    value = residual.eval_i(IntervalVector.point(x0))
    jacobian = residual.jac_i(ball)
    try:
        step = interval_solve(jacobian, value)
    except (ex.SingularIntervalMatrixError, ex.IntervalDomainError):
        raise ex.NewtonOperatorUndefinedError()
    image = IntervalVector.point(x0) - step
    return RigorousOrbitProof(center=x0, radius=float(radius),
                              newton_image=image,
                              verdict=image.is_interior(ball),
                              distance=image.max_distance(x0))


def _image_in_support(image: IntervalVector, n: int, grid: GridSpec,
                      vertices: Collection[Cube]) -> bool:
    comps = list(image)
    for j in range(len(comps) // n):
        block = IntervalVector.from_intervals(comps[j * n:(j + 1) * n])
        cover = min_cover(grid, block)
        if cover.escaped or not all(c in vertices for c in cover.cubes):
            return False
    return True


def prove_orbit(system: MapSystem, points: Sequence[PointLike],
                radius: float, grid: Optional[GridSpec] = None,
                vertices: Optional[Collection[Cube]] = None) \
        -> RigorousOrbitProof:
    """Prove a periodic orbit through approximate points.

    Args:
        system: The map.
        points: Approximate orbit x_0, ..., x_{p-1} with f(x_j) ~ x_{j+1}.
        radius: Ball radius around each point.
        grid: The grid. Supplies periodic dimensions and the support check.
        vertices: Enclosure cubes. If given with `grid`, the proof also
            records whether N lies in their support.

    Returns:
        The proof record on the product ball.

    Raises:
        conecert.errors.PreconditionError: if two points are not more than
            2 * radius apart, since the proved zeros could then coincide.
        conecert.errors.NewtonOperatorUndefinedError: as `interval_newton`.

    """
    if not points:
        raise ex.PreconditionError('orbit needs at least one point')
    periods: Periods = grid.periods if grid is not None \
        else [None] * system.dimension
    if not orbit_radius_ok(points, radius, periods):
        raise ex.PreconditionError('orbit points must be more than 2r apart')
    residual = OrbitResidual(system, len(points), periods)
    center = np.concatenate([np.asarray(p, dtype=np.float64) for p in points])
    proof = interval_newton(residual, center, radius)
    if grid is not None and vertices is not None and \
            proof.newton_image is not None:
        proof = proof._replace(in_support=_image_in_support(
            proof.newton_image, system.dimension, grid, vertices))
    return proof


def prove_fixed_point(system: MapSystem, center: PointLike, radius: float,
                      grid: Optional[GridSpec] = None,
                      vertices: Optional[Collection[Cube]] = None) \
        -> RigorousOrbitProof:
    """Prove a fixed point of f in the ball around `center`."""
    return prove_orbit(system, [center], radius, grid, vertices)


def prove_period_two(system: MapSystem, x: PointLike, y: PointLike,
                     radius: float, grid: Optional[GridSpec] = None,
                     vertices: Optional[Collection[Cube]] = None) \
        -> RigorousOrbitProof:
    """Prove a period-2 orbit with F(x, y) = (f(x) - y, f(y) - x).

    Raises:
        conecert.errors.PreconditionError: if `x` and `y` are not more than
            2 * radius apart.

    """
    return prove_orbit(system, [x, y], radius, grid, vertices)


def _in_support(grid: GridSpec, vertices: Collection[Cube],
                x: FloatArray) -> bool:
    cover = min_cover(grid, IntervalVector.point(x))
    return not cover.escaped and any(c in vertices for c in cover.cubes)


def newton_periodic_point(system: MapSystem, grid: GridSpec,
                          start: PointLike, period: int,
                          newton_tol: float = 1e-12,
                          max_iter: int = 50) -> Optional[FloatArray]:
    """Run the float Newton method on f^period(x) - x.

    Returns:
        The reduced zero, or None if the iteration failed to converge.

    """
    periods = grid.periods
    n = system.dimension
    x = grid.reduce_point(start)
    for _ in range(max_iter):
        with np.errstate(all='ignore'):
            image = iterate(system, x, period)[-1]
            diff = image - x
            residual = diff - _chart_offsets(diff, periods)
            if not np.all(np.isfinite(residual)):
                return None
            if float(np.max(np.abs(residual))) <= newton_tol:
                return x
            jacobian = orbit_jacobian(system, x, period) - np.eye(n)
        try:
            step = np.linalg.solve(jacobian, -residual)
        except np.linalg.LinAlgError:
            return None
        x = grid.reduce_point(x + step)
        if not np.all(np.isfinite(x)):
            return None
    return None


def principal_period_ok(system: MapSystem, grid: GridSpec, x: FloatArray,
                        period: int, sep_tol: float) -> bool:
    """Whether f^j(x) stays away from x for every j < period."""
    orbit = iterate(system, x, period - 1)
    return all(periodic_distance(orbit[j], x, grid.periods) >= sep_tol
               for j in range(1, period))


def refine_cycles(graph: DiGraph, grid: GridSpec, system: MapSystem,
                  cycle_sets: Sequence[Collection[Cube]],
                  newton_tol: float = 1e-12, max_iter: int = 50,
                  dedup_tol: float = 1e-8,
                  period_sep_tol: float = 1e-6) \
        -> List[List[PeriodicCandidate]]:
    """Turn cycle vertex sets into periodic point candidates.

    Args:
        graph: The enclosure graph.
        grid: Its grid.
        system: The map.
        cycle_sets: Entry i - 1 holds the vertices on closed walks of
            length i (and no shorter).
        newton_tol: Max-norm residual at which Newton stops.
        max_iter: Newton iteration limit.
        dedup_tol: Points closer than this count as one.
        period_sep_tol: Minimal distance between x and f^j(x), j < period.

    Returns:
        Entry i - 1 holds the candidates of principal period i, in the order
        their seed cubes sort.

    """
    vertices = set(graph.vertices)
    periods = grid.periods
    found: List[List[PeriodicCandidate]] = []
    for period, cubes in enumerate(cycle_sets, start=1):
        accepted: List[PeriodicCandidate] = []
        for cube in sorted(cubes):
            x = newton_periodic_point(system, grid, grid.centre(cube), period,
                                      newton_tol, max_iter)
            if x is None:
                logger.debug('Newton did not converge from %s (period %d)',
                             cube, period)
                continue
            if not _in_support(grid, vertices, x):
                continue
            if not principal_period_ok(system, grid, x, period,
                                       period_sep_tol):
                continue
            if any(periodic_distance(c.point, x, periods) < dedup_tol
                   for c in accepted):
                continue
            accepted.append(PeriodicCandidate(point=x, period=period,
                                              cube=cube))
        logger.info('Period %d: %d seed cubes, %d points',
                    period, len(cubes), len(accepted))
        found.append(accepted)
    return found


def group_orbits(system: MapSystem, grid: GridSpec,
                 candidates: Sequence[PeriodicCandidate],
                 tol: float = 1e-8) -> List[List[PeriodicCandidate]]:
    """Group candidates of one period into orbits.

    Each orbit lists its candidates in the order the map visits them,
    starting with the first candidate of the orbit in `candidates`.

    """
    assigned = [False] * len(candidates)
    orbits: List[List[PeriodicCandidate]] = []
    for i, cand in enumerate(candidates):
        if assigned[i]:
            continue
        orbit: List[PeriodicCandidate] = []
        for point in iterate(system, cand.point, max(cand.period - 1, 0)):
            for j, other in enumerate(candidates):
                if not assigned[j] and periodic_distance(
                        other.point, point, grid.periods) < tol:
                    assigned[j] = True
                    orbit.append(other)
                    break
        orbits.append(orbit)
    return orbits


def orbit_radius_ok(points: Sequence[PointLike], radius: float,
                    periods: Periods) -> bool:
    """Whether orbit points are far enough apart for a proof of radius r."""
    return all(periodic_distance(a, b, periods) > 2 * radius
               for a, b in itertools.combinations(points, 2))
