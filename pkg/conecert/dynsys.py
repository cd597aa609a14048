"""Explicit maps with float and interval evaluation.

Every system provides four evaluations: the point value, the point
Jacobian, and interval enclosures of both over a box. The float forms drive
the heuristic steps (seeding, Newton, frames); only the interval forms are
used in rigorous checks.

"""
import math
from abc import ABC, abstractmethod
from typing import Any, Callable, Dict, List, Mapping, Sequence, Tuple, \
    Union

import numpy as np

from typing_extensions import Literal

from conecert.errors import exceptions as ex
from conecert.interval import FloatArray, Interval, IntervalMatrix, \
    IntervalVector, PI, TWO_PI


PointLike = Union[Sequence[float], FloatArray]
SystemName = Literal['smale', 'henon', 'linear']


class MapSystem(ABC):
    """Abstract base class of explicit smooth maps f: R^n -> R^n."""

    @property
    @abstractmethod
    def name(self) -> SystemName:
        """Get the system name used in configuration documents."""
        raise NotImplementedError  # pragma: no cover

    @property
    @abstractmethod
    def dimension(self) -> int:
        """Get the ambient dimension n."""
        raise NotImplementedError  # pragma: no cover

    @property
    @abstractmethod
    def params(self) -> Dict[str, Any]:
        """Get the parameter record."""
        raise NotImplementedError  # pragma: no cover

    @abstractmethod
    def eval(self, x: PointLike) -> FloatArray:
        """Evaluate f at a point in floating point."""
        raise NotImplementedError  # pragma: no cover

    @abstractmethod
    def jac(self, x: PointLike) -> FloatArray:
        """Evaluate Df at a point in floating point."""
        raise NotImplementedError  # pragma: no cover

    @abstractmethod
    def eval_i(self, box: IntervalVector) -> IntervalVector:
        """Enclose {f(x) : x in box}."""
        raise NotImplementedError  # pragma: no cover

    @abstractmethod
    def jac_i(self, box: IntervalVector) -> IntervalMatrix:
        """Enclose {Df(x) : x in box}."""
        raise NotImplementedError  # pragma: no cover

    def __repr__(self) -> str:
        return f'{type(self).__name__}({self.params})'

    def _check_dim(self, n: int) -> None:
        if n != self.dimension:
            raise ex.DimensionMismatchError(
                f'{self.name} map takes {self.dimension} coordinates, got {n}')


class SmaleMap(MapSystem):
    """Smale solenoid s(x, y, t) = (cx + r cos 2pi t, cy + r sin 2pi t, 2t).

    The t coordinate is returned unreduced. Reduction modulo 1 is left to the
    periodic dimension of the grid.

    """

    def __init__(self, contraction: float = 0.1, radius: float = 0.5):
        """Initialize a SmaleMap instance.

        Args:
            contraction: Contraction factor in x and y.
            radius: Radius of the core circle.

        """
        self._c = float(contraction)
        self._r = float(radius)
        self._c_i = Interval.from_decimal(contraction)
        self._r_i = Interval.from_decimal(radius)

    @property
    def name(self) -> Literal['smale']:
        """Get the system name."""
        return 'smale'

    @property
    def dimension(self) -> int:
        """Get the ambient dimension."""
        return 3

    @property
    def params(self) -> Dict[str, Any]:
        """Get the parameter record."""
        return {'contraction': self._c, 'radius': self._r}

    def eval(self, x: PointLike) -> FloatArray:
        self._check_dim(len(x))
        px, py, t = (float(v) for v in x)
        angle = 2.0 * math.pi * t
        return np.array([self._c * px + self._r * math.cos(angle),
                         self._c * py + self._r * math.sin(angle),
                         2.0 * t])

    def jac(self, x: PointLike) -> FloatArray:
        self._check_dim(len(x))
        angle = 2.0 * math.pi * float(x[2])
        scale = 2.0 * math.pi * self._r
        return np.array([[self._c, 0.0, -scale * math.sin(angle)],
                         [0.0, self._c, scale * math.cos(angle)],
                         [0.0, 0.0, 2.0]])

    def eval_i(self, box: IntervalVector) -> IntervalVector:
        self._check_dim(box.dimension)
        bx, by, bt = box
        angle = TWO_PI * bt
        return IntervalVector.from_intervals([
            self._c_i * bx + self._r_i * angle.cos(),
            self._c_i * by + self._r_i * angle.sin(),
            bt * 2,
        ])

    def jac_i(self, box: IntervalVector) -> IntervalMatrix:
        self._check_dim(box.dimension)
        angle = TWO_PI * box[2]
        scale = PI * self._r_i * 2
        zero = Interval(0.0)
        return IntervalMatrix.from_intervals([
            [self._c_i, zero, -(scale * angle.sin())],
            [zero, self._c_i, scale * angle.cos()],
            [zero, zero, Interval(2.0)],
        ])


class HenonMap(MapSystem):
    """Henon map H(x, y) = (1 + y - a x^2, b x)."""

    def __init__(self, a: float = 5.4, b: float = -1.0):
        """Initialize a HenonMap instance.

        Args:
            a: The quadratic coefficient.
            b: The linear coefficient.

        """
        self._a = float(a)
        self._b = float(b)
        self._a_i = Interval.from_decimal(a)
        self._b_i = Interval.from_decimal(b)

    @property
    def name(self) -> Literal['henon']:
        """Get the system name."""
        return 'henon'

    @property
    def dimension(self) -> int:
        """Get the ambient dimension."""
        return 2

    @property
    def params(self) -> Dict[str, Any]:
        """Get the parameter record."""
        return {'a': self._a, 'b': self._b}

    def fixed_points(self) -> List[FloatArray]:
        """Get the real fixed points in float (closed form)."""
        # x = 1 + bx - ax^2  <=>  ax^2 + (1 - b)x - 1 = 0
        a, p = self._a, 1.0 - self._b
        disc = p * p + 4.0 * a
        if a == 0.0 or disc < 0.0:
            return []
        root = math.sqrt(disc)
        xs = sorted([(-p + root) / (2.0 * a), (-p - root) / (2.0 * a)])
        return [np.array([x, self._b * x]) for x in xs]

    def eval(self, x: PointLike) -> FloatArray:
        self._check_dim(len(x))
        px, py = float(x[0]), float(x[1])
        return np.array([1.0 + py - self._a * px * px, self._b * px])

    def jac(self, x: PointLike) -> FloatArray:
        self._check_dim(len(x))
        return np.array([[-2.0 * self._a * float(x[0]), 1.0],
                         [self._b, 0.0]])

    def eval_i(self, box: IntervalVector) -> IntervalVector:
        self._check_dim(box.dimension)
        bx, by = box
        return IntervalVector.from_intervals([
            1 + by - self._a_i * bx.sqr(),
            self._b_i * bx,
        ])

    def jac_i(self, box: IntervalVector) -> IntervalMatrix:
        self._check_dim(box.dimension)
        return IntervalMatrix.from_intervals([
            [-(self._a_i * box[0] * 2), Interval(1.0)],
            [self._b_i, Interval(0.0)],
        ])


class LinearMap(MapSystem):
    """Linear map f(x) = A x with a float matrix A."""

    def __init__(self, matrix: Sequence[Sequence[float]]):
        """Initialize a LinearMap instance.

        Args:
            matrix: The square matrix A.

        Raises:
            conecert.errors.DimensionMismatchError: if A is not square.

        """
        arr = np.array(matrix, dtype=np.float64)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
            raise ex.DimensionMismatchError(f'not square: {arr.shape}')
        arr.setflags(write=False)
        self._matrix = arr
        self._matrix_i = IntervalMatrix.point(arr)

    @property
    def name(self) -> Literal['linear']:
        """Get the system name."""
        return 'linear'

    @property
    def dimension(self) -> int:
        """Get the ambient dimension."""
        return int(self._matrix.shape[0])

    @property
    def params(self) -> Dict[str, Any]:
        """Get the parameter record."""
        return {'matrix': self._matrix.tolist()}

    def eval(self, x: PointLike) -> FloatArray:
        self._check_dim(len(x))
        return self._matrix @ np.asarray(x, dtype=np.float64)

    def jac(self, x: PointLike) -> FloatArray:
        self._check_dim(len(x))
        return self._matrix.copy()

    def eval_i(self, box: IntervalVector) -> IntervalVector:
        self._check_dim(box.dimension)
        return self._matrix_i @ box

    def jac_i(self, box: IntervalVector) -> IntervalMatrix:
        self._check_dim(box.dimension)
        return self._matrix_i


_SYSTEMS: Dict[str, Callable[..., MapSystem]] = {
    'smale': SmaleMap,
    'henon': HenonMap,
    'linear': LinearMap,
}


def create_system(name: str, params: Mapping[str, Any]) -> MapSystem:
    """Instantiate a system by name.

    Args:
        name: One of 'smale', 'henon', 'linear'.
        params: Keyword arguments of the system constructor.

    Returns:
        The map.

    Raises:
        conecert.errors.ConfigValidationError: if the name or the parameters
            are not valid.

    """
    try:
        factory = _SYSTEMS[name]
    except KeyError:
        raise ex.ConfigValidationError(
            'system.name', f'unknown system {name!r}')
    try:
        return factory(**params)
    except TypeError as e:
        raise ex.ConfigValidationError('system.params', str(e))


def system_names() -> Tuple[str, ...]:
    """Get the registered system names."""
    return tuple(sorted(_SYSTEMS))


def iterate(system: MapSystem, x: PointLike, n: int) -> List[FloatArray]:
    """Get the float orbit x, f(x), ..., f^n(x)."""
    orbit = [np.asarray(x, dtype=np.float64)]
    for _ in range(n):
        orbit.append(system.eval(orbit[-1]))
    return orbit


def orbit_jacobian(system: MapSystem, x: PointLike, n: int) -> FloatArray:
    """Get Df^n(x) = Df(f^{n-1}(x)) ... Df(x) by the chain rule."""
    point = np.asarray(x, dtype=np.float64)
    acc = np.eye(system.dimension)
    for _ in range(n):
        acc = system.jac(point) @ acc
        point = system.eval(point)
    return acc


