"""Outward rounded interval arithmetic and verified linear algebra.

Every endpoint operation rounds outward. Sums and products are rounded with
error-free transformations (TwoSum, TwoProduct) so that an exact result is
not inflated, while inexact results are moved one unit in the last place
away from the enclosed value. Library transcendental functions are not
correctly rounded, so their endpoints are inflated by two units instead.

Scalars are `Interval` objects. Vectors and matrices keep their endpoints in
numpy arrays and use the same rounding kernels elementwise.

"""
import math
from fractions import Fraction
from typing import Iterable, Iterator, List, Optional, Sequence, Tuple, \
    TypeVar, Union, overload

import numpy as np
import numpy.typing as npt

from typing_extensions import Literal

from conecert.errors import exceptions as ex


FloatArray = npt.NDArray[np.float64]
Real = Union[int, float]
ArrayOrFloat = TypeVar('ArrayOrFloat', float, FloatArray)

# Veltkamp splitting constant for binary64: 2^27 + 1.
_SPLITTER = 134217729.0

# Slack (in periods) when testing whether a trigonometric extremum lies in
# an argument interval. Detecting an extremum that isn't there only widens
# the result.
_EXTREMUM_SLACK = 1e-9

# Outside of these magnitudes the error-free product transforms are not
# exact, so results are widened by one ulp instead.
_TINY = 1e-290
_HUGE = 1e300


def _down(x: float) -> float:
    return math.nextafter(x, -math.inf)


def _up(x: float) -> float:
    return math.nextafter(x, math.inf)


def _two_sum_err(a: ArrayOrFloat, b: ArrayOrFloat,
                 s: ArrayOrFloat) -> ArrayOrFloat:
    """Get the exact rounding error of s = fl(a + b)."""
    bb = s - a
    return (a - (s - bb)) + (b - bb)


def _split(a: ArrayOrFloat) -> Tuple[ArrayOrFloat, ArrayOrFloat]:
    c = _SPLITTER * a
    high = c - (c - a)
    return high, a - high


def _two_product_err(a: ArrayOrFloat, b: ArrayOrFloat,
                     p: ArrayOrFloat) -> ArrayOrFloat:
    """Get the exact rounding error of p = fl(a * b)."""
    ah, al = _split(a)
    bh, bl = _split(b)
    return ((ah * bh - p) + ah * bl + al * bh) + al * bl


def _check_finite(*values: float) -> None:
    for v in values:
        if not math.isfinite(v):
            raise ex.IntervalDomainError('interval endpoint overflow')


def _add_bounds(a: float, b: float) -> Tuple[float, float]:
    s = a + b
    _check_finite(s)
    err = _two_sum_err(a, b, s)
    return (s if err >= 0 else _down(s)), (s if err <= 0 else _up(s))


def _mul_bounds(a: float, b: float) -> Tuple[float, float]:
    p = a * b
    _check_finite(p)
    if a == 0.0 or b == 0.0:
        return 0.0, 0.0
    if abs(a) > _HUGE or abs(b) > _HUGE or abs(p) < _TINY:
        return _down(p), _up(p)
    err = _two_product_err(a, b, p)
    return (p if err >= 0 else _down(p)), (p if err <= 0 else _up(p))


def _div_bounds(a: float, b: float) -> Tuple[float, float]:
    q = a / b
    _check_finite(q)
    if a == 0.0:
        return 0.0, 0.0
    if abs(q) < _TINY or abs(q) > _HUGE or abs(b) > _HUGE:
        return _down(q), _up(q)
    # The residual a - q*b is exact in sign: p + e == q*b exactly and
    # a - p is exact by Sterbenz' lemma.
    p = q * b
    e = _two_product_err(q, b, p)
    r = (a - p) - e
    if r == 0.0:
        return q, q
    # True quotient is q + r/b.
    if (r > 0) == (b > 0):
        return q, _up(q)
    return _down(q), q


def _sqrt_bounds(a: float) -> Tuple[float, float]:
    s = math.sqrt(a)
    if s == 0.0:
        return 0.0, 0.0
    if a < _TINY:
        return _down(s), _up(s)
    p = s * s
    e = _two_product_err(s, s, p)
    r = (a - p) - e
    if r == 0.0:
        return s, s
    if r > 0:
        return s, _up(s)
    return _down(s), s


def _periodic_extrema(a: float, b: float, phase: float) -> Tuple[bool, bool]:
    """Whether [a, b] may contain phase + 2*pi*m (max) or + pi (min)."""
    period = 2.0 * math.pi
    lo = (a - phase) / period
    hi = (b - phase) / period
    has_max = math.ceil(lo - _EXTREMUM_SLACK) <= \
        math.floor(hi + _EXTREMUM_SLACK)
    has_min = math.ceil(lo - 0.5 - _EXTREMUM_SLACK) <= \
        math.floor(hi - 0.5 + _EXTREMUM_SLACK)
    return has_max, has_min


class Interval:
    """Closed interval [lo, hi] of reals with finite endpoints.

    Instances are immutable. Arithmetic with plain numbers treats them as
    exact point intervals.

    """

    __slots__ = ('_lo', '_hi')

    @classmethod
    def point(cls, value: Real) -> 'Interval':
        """Create a point interval, widened if the value isn't a float.

        Args:
            value: The value to enclose.

        Returns:
            The tightest interval containing `value`.

        """
        f = float(value)
        if isinstance(value, int) and int(f) != value:
            return cls(_down(f), _up(f))
        return cls(f, f)

    @classmethod
    def from_decimal(cls, value: Union[str, Real]) -> 'Interval':
        """Enclose a decimal constant that may not be a binary float.

        Floats are read back through their shortest repr, so 0.1 is
        enclosed as the decimal 1/10 rather than the nearest double.

        Args:
            value: A decimal string or number, eg. '5.4' or 5.4.

        Returns:
            The tightest float interval containing the decimal value.

        """
        text = repr(value) if isinstance(value, float) else str(value)
        exact = Fraction(text)
        f = float(exact)
        approx = Fraction(f)
        if approx == exact:
            return cls(f, f)
        if approx < exact:
            return cls(f, _up(f))
        return cls(_down(f), f)

    @classmethod
    def hull_of(cls, values: Iterable[Real]) -> 'Interval':
        """Get the smallest interval containing all values."""
        items = [float(v) for v in values]
        if not items:
            raise ex.EmptyCubeSetError('hull of no values')
        return cls(min(items), max(items))

    def __init__(self, lo: Real, hi: Optional[Real] = None):
        """Initialize an Interval instance.

        Args:
            lo: The lower endpoint.
            hi: The upper endpoint. Defaults to `lo` (point interval).

        Raises:
            conecert.errors.IntervalDomainError: if an endpoint is not finite
                or `lo > hi`.

        """
        lo_f = float(lo)
        hi_f = lo_f if hi is None else float(hi)
        if not (math.isfinite(lo_f) and math.isfinite(hi_f)):
            raise ex.IntervalDomainError(f'non-finite endpoint [{lo}, {hi}]')
        if lo_f > hi_f:
            raise ex.IntervalDomainError(f'empty interval [{lo}, {hi}]')
        self._lo = lo_f
        self._hi = hi_f

    @property
    def lo(self) -> float:
        """Get the lower endpoint."""
        return self._lo

    @property
    def hi(self) -> float:
        """Get the upper endpoint."""
        return self._hi

    @property
    def width(self) -> float:
        """Get the width rounded upward."""
        return _add_bounds(self._hi, -self._lo)[1]

    @property
    def mid(self) -> float:
        """Get the float midpoint (not rigorous)."""
        return 0.5 * self._lo + 0.5 * self._hi

    @property
    def rad(self) -> float:
        """Get an upper bound of the radius around `mid`."""
        m = self.mid
        return max(_add_bounds(self._hi, -m)[1], _add_bounds(m, -self._lo)[1])

    @property
    def mag(self) -> float:
        """Get the largest absolute value of a member."""
        return max(abs(self._lo), abs(self._hi))

    @property
    def mig(self) -> float:
        """Get the smallest absolute value of a member."""
        if self._lo <= 0.0 <= self._hi:
            return 0.0
        return min(abs(self._lo), abs(self._hi))

    def __repr__(self) -> str:
        return f'Interval({self._lo!r}, {self._hi!r})'

    def __eq__(self, other: object) -> bool:
        if isinstance(other, Interval):
            return self._lo == other._lo and self._hi == other._hi
        if isinstance(other, (int, float)):
            return self._lo == self._hi == other
        return NotImplemented

    def __hash__(self) -> int:
        return hash((self._lo, self._hi))

    def __contains__(self, value: object) -> bool:
        if isinstance(value, Interval):
            return self._lo <= value._lo and value._hi <= self._hi
        if isinstance(value, (int, float)):
            return self._lo <= value <= self._hi
        return False

    def is_interior(self, other: 'Interval') -> bool:
        """Whether this interval lies in the interior of `other`."""
        return other._lo < self._lo and self._hi < other._hi

    def contains_zero(self) -> bool:
        """Whether zero is a member."""
        return self._lo <= 0.0 <= self._hi

    def hull(self, other: 'Operand') -> 'Interval':
        """Get the smallest interval containing both operands."""
        o = _as_interval(other)
        return Interval(min(self._lo, o._lo), max(self._hi, o._hi))

    def intersect(self, other: 'Operand') -> Optional['Interval']:
        """Get the intersection or None if the operands are disjoint."""
        o = _as_interval(other)
        lo = max(self._lo, o._lo)
        hi = min(self._hi, o._hi)
        if lo > hi:
            return None
        return Interval(lo, hi)

    def __neg__(self) -> 'Interval':
        return Interval(-self._hi, -self._lo)

    def __pos__(self) -> 'Interval':
        return self

    def __add__(self, other: 'Operand') -> 'Interval':
        o = _as_interval(other)
        return Interval(_add_bounds(self._lo, o._lo)[0],
                        _add_bounds(self._hi, o._hi)[1])

    def __radd__(self, other: 'Operand') -> 'Interval':
        return self.__add__(other)

    def __sub__(self, other: 'Operand') -> 'Interval':
        o = _as_interval(other)
        return Interval(_add_bounds(self._lo, -o._hi)[0],
                        _add_bounds(self._hi, -o._lo)[1])

    def __rsub__(self, other: 'Operand') -> 'Interval':
        return _as_interval(other).__sub__(self)

    def __mul__(self, other: 'Operand') -> 'Interval':
        o = _as_interval(other)
        bounds = [_mul_bounds(a, b)
                  for a in (self._lo, self._hi)
                  for b in (o._lo, o._hi)]
        return Interval(min(b[0] for b in bounds), max(b[1] for b in bounds))

    def __rmul__(self, other: 'Operand') -> 'Interval':
        return self.__mul__(other)

    def __truediv__(self, other: 'Operand') -> 'Interval':
        o = _as_interval(other)
        if o.contains_zero():
            raise ex.ZeroDivisionIntervalError()
        bounds = [_div_bounds(a, b)
                  for a in (self._lo, self._hi)
                  for b in (o._lo, o._hi)]
        return Interval(min(b[0] for b in bounds), max(b[1] for b in bounds))

    def __rtruediv__(self, other: 'Operand') -> 'Interval':
        return _as_interval(other).__truediv__(self)

    def sqr(self) -> 'Interval':
        """Get the enclosure of {x^2 : x in self}."""
        lo_sq = _mul_bounds(self._lo, self._lo)
        hi_sq = _mul_bounds(self._hi, self._hi)
        upper = max(lo_sq[1], hi_sq[1])
        if self.contains_zero():
            return Interval(0.0, upper)
        return Interval(min(lo_sq[0], hi_sq[0]), upper)

    def sqrt(self) -> 'Interval':
        """Get the enclosure of the square root.

        Raises:
            conecert.errors.IntervalDomainError: if `lo < 0`.

        """
        if self._lo < 0.0:
            raise ex.IntervalDomainError(f'sqrt of {self!r}')
        return Interval(_sqrt_bounds(self._lo)[0], _sqrt_bounds(self._hi)[1])

    def _trig(self, fn: Literal['sin', 'cos']) -> 'Interval':
        if self._hi - self._lo >= 2.0 * math.pi:
            return Interval(-1.0, 1.0)
        func = math.sin if fn == 'sin' else math.cos
        phase = 0.5 * math.pi if fn == 'sin' else 0.0
        va = func(self._lo)
        vb = func(self._hi)
        lo = _down(_down(min(va, vb)))
        hi = _up(_up(max(va, vb)))
        has_max, has_min = _periodic_extrema(self._lo, self._hi, phase)
        if has_max:
            hi = 1.0
        if has_min:
            lo = -1.0
        return Interval(max(lo, -1.0), min(hi, 1.0))

    def sin(self) -> 'Interval':
        """Get the enclosure of the sine image."""
        return self._trig('sin')

    def cos(self) -> 'Interval':
        """Get the enclosure of the cosine image."""
        return self._trig('cos')


Operand = Union[Interval, int, float]

PI = Interval(math.pi, _up(math.pi))
TWO_PI = Interval(2.0 * math.pi, _up(2.0 * math.pi))


def _as_interval(value: Operand) -> Interval:
    if isinstance(value, Interval):
        return value
    return Interval.point(value)


ElementaryName = Literal['sin', 'cos', 'sqr', 'sqrt']


def elementary(fn: ElementaryName, a: Interval) -> Interval:
    """Evaluate an elementary function over an interval.

    Args:
        fn: One of 'sin', 'cos', 'sqr', 'sqrt'.
        a: The argument.

    Returns:
        An enclosure of the exact image.

    Raises:
        conecert.errors.IntervalDomainError: on a domain violation or an
            unknown function name.

    """
    if fn == 'sin':
        return a.sin()
    if fn == 'cos':
        return a.cos()
    if fn == 'sqr':
        return a.sqr()
    if fn == 'sqrt':
        return a.sqrt()
    raise ex.IntervalDomainError(f'unknown function {fn!r}')


def _np_add_bounds(a: FloatArray, b: FloatArray) \
        -> Tuple[FloatArray, FloatArray]:
    s = a + b
    err = _two_sum_err(a, b, s)
    lo = np.where(err < 0, np.nextafter(s, -np.inf), s)
    hi = np.where(err > 0, np.nextafter(s, np.inf), s)
    return lo, hi


def _np_mul_bounds(a: FloatArray, b: FloatArray) \
        -> Tuple[FloatArray, FloatArray]:
    p = a * b
    with np.errstate(all='ignore'):
        err = _two_product_err(a, b, p)
    zero = (a == 0.0) | (b == 0.0)
    inexact = ~zero & ((np.abs(p) < _TINY) | (np.abs(a) > _HUGE) |
                       (np.abs(b) > _HUGE))
    lo = np.where((err < 0) | inexact, np.nextafter(p, -np.inf), p)
    hi = np.where((err > 0) | inexact, np.nextafter(p, np.inf), p)
    return lo, hi


def _np_interval_mul(alo: FloatArray, ahi: FloatArray,
                     blo: FloatArray, bhi: FloatArray) \
        -> Tuple[FloatArray, FloatArray]:
    cands = [_np_mul_bounds(x, y) for x in (alo, ahi) for y in (blo, bhi)]
    lo = np.minimum.reduce([c[0] for c in cands])
    hi = np.maximum.reduce([c[1] for c in cands])
    return lo, hi


def _as_float_array(values: Union[Sequence[Real], FloatArray]) -> FloatArray:
    return np.array(values, dtype=np.float64)


class IntervalVector:
    """Vector of intervals (an axis aligned box)."""

    __slots__ = ('_lo', '_hi')

    @classmethod
    def from_intervals(cls, items: Iterable[Interval]) -> 'IntervalVector':
        """Create a vector from intervals."""
        its = list(items)
        return cls([i.lo for i in its], [i.hi for i in its])

    @classmethod
    def point(cls, x: Union[Sequence[Real], FloatArray]) -> 'IntervalVector':
        """Create a degenerate box at a point."""
        arr = _as_float_array(x)
        return cls(arr, arr)

    @classmethod
    def ball(cls, center: Union[Sequence[Real], FloatArray],
             r: float) -> 'IntervalVector':
        """Create the max-norm ball of radius `r` around `center`.

        The endpoints are rounded outward, so the box contains the exact
        ball.

        """
        c = _as_float_array(center)
        radius = np.full_like(c, float(r))
        return cls(_np_add_bounds(c, -radius)[0],
                   _np_add_bounds(c, radius)[1])

    def __init__(self, lo: Union[Sequence[Real], FloatArray],
                 hi: Union[Sequence[Real], FloatArray]):
        """Initialize an IntervalVector instance.

        Args:
            lo: Lower endpoints.
            hi: Upper endpoints.

        Raises:
            conecert.errors.IntervalDomainError: if the endpoints are not
                finite or not ordered.
            conecert.errors.DimensionMismatchError: if the lengths differ.

        """
        lo_a = _as_float_array(lo).reshape(-1)
        hi_a = _as_float_array(hi).reshape(-1)
        if lo_a.shape != hi_a.shape:
            raise ex.DimensionMismatchError('endpoint lengths differ')
        if not (np.all(np.isfinite(lo_a)) and np.all(np.isfinite(hi_a))):
            raise ex.IntervalDomainError('non-finite endpoint')
        if np.any(lo_a > hi_a):
            raise ex.IntervalDomainError('empty component')
        lo_a.setflags(write=False)
        hi_a.setflags(write=False)
        self._lo = lo_a
        self._hi = hi_a

    @property
    def lo(self) -> FloatArray:
        """Get the lower endpoints (read-only array)."""
        return self._lo

    @property
    def hi(self) -> FloatArray:
        """Get the upper endpoints (read-only array)."""
        return self._hi

    @property
    def dimension(self) -> int:
        """Get the number of components."""
        return int(self._lo.shape[0])

    def __len__(self) -> int:
        return self.dimension

    def __getitem__(self, i: int) -> Interval:
        return Interval(self._lo[i], self._hi[i])

    def __iter__(self) -> Iterator[Interval]:
        for i in range(self.dimension):
            yield self[i]

    def __repr__(self) -> str:
        parts = ', '.join(f'[{a!r}, {b!r}]'
                          for a, b in zip(self._lo, self._hi))
        return f'IntervalVector({parts})'

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, IntervalVector):
            return NotImplemented
        return bool(np.array_equal(self._lo, other._lo) and
                    np.array_equal(self._hi, other._hi))

    def __hash__(self) -> int:
        return hash((self._lo.tobytes(), self._hi.tobytes()))

    def mid(self) -> FloatArray:
        """Get the float midpoint (not rigorous)."""
        return 0.5 * self._lo + 0.5 * self._hi

    def width(self) -> FloatArray:
        """Get the componentwise widths rounded upward."""
        return _np_add_bounds(self._hi, -self._lo)[1]

    def contains(self, x: Union[Sequence[Real], FloatArray]) -> bool:
        """Whether a point is a member of the box."""
        arr = _as_float_array(x)
        return bool(np.all(self._lo <= arr) and np.all(arr <= self._hi))

    def is_subset(self, other: 'IntervalVector') -> bool:
        """Whether this box is contained in `other`."""
        return bool(np.all(other._lo <= self._lo) and
                    np.all(self._hi <= other._hi))

    def is_interior(self, other: 'IntervalVector') -> bool:
        """Whether this box lies in the interior of `other`."""
        return bool(np.all(other._lo < self._lo) and
                    np.all(self._hi < other._hi))

    def hull(self, other: 'IntervalVector') -> 'IntervalVector':
        """Get the smallest box containing both boxes."""
        return IntervalVector(np.minimum(self._lo, other._lo),
                              np.maximum(self._hi, other._hi))

    def intersect(self, other: 'IntervalVector') \
            -> Optional['IntervalVector']:
        """Get the intersection or None if the boxes are disjoint."""
        lo = np.maximum(self._lo, other._lo)
        hi = np.minimum(self._hi, other._hi)
        if np.any(lo > hi):
            return None
        return IntervalVector(lo, hi)

    def max_distance(self, center: Union[Sequence[Real], FloatArray]) \
            -> float:
        """Get an upper bound of the max-norm distance to a point."""
        c = _as_float_array(center)
        up_hi = _np_add_bounds(self._hi, -c)[1]
        up_lo = _np_add_bounds(c, -self._lo)[1]
        return float(np.max(np.maximum(np.abs(up_hi), np.abs(up_lo))))

    def __add__(self, other: 'IntervalVector') -> 'IntervalVector':
        _check_same_shape(self._lo, other._lo)
        return IntervalVector(_np_add_bounds(self._lo, other._lo)[0],
                              _np_add_bounds(self._hi, other._hi)[1])

    def __sub__(self, other: 'IntervalVector') -> 'IntervalVector':
        _check_same_shape(self._lo, other._lo)
        return IntervalVector(_np_add_bounds(self._lo, -other._hi)[0],
                              _np_add_bounds(self._hi, -other._lo)[1])

    def __neg__(self) -> 'IntervalVector':
        return IntervalVector(-self._hi, -self._lo)


def _check_same_shape(a: FloatArray, b: FloatArray) -> None:
    if a.shape != b.shape:
        raise ex.DimensionMismatchError(f'shapes {a.shape} and {b.shape}')


class IntervalMatrix:
    """Matrix of intervals."""

    __slots__ = ('_lo', '_hi')

    @classmethod
    def from_intervals(cls, rows: Sequence[Sequence[Operand]]) \
            -> 'IntervalMatrix':
        """Create a matrix from rows of intervals or numbers."""
        items = [[_as_interval(v) for v in row] for row in rows]
        return cls([[v.lo for v in row] for row in items],
                   [[v.hi for v in row] for row in items])

    @classmethod
    def point(cls, m: Union[Sequence[Sequence[Real]], FloatArray]) \
            -> 'IntervalMatrix':
        """Create a degenerate interval matrix from a float matrix."""
        arr = np.array(m, dtype=np.float64)
        return cls(arr, arr)

    @classmethod
    def identity(cls, n: int) -> 'IntervalMatrix':
        """Create the n x n identity."""
        return cls.point(np.eye(n))

    def __init__(self, lo: Union[Sequence[Sequence[Real]], FloatArray],
                 hi: Union[Sequence[Sequence[Real]], FloatArray]):
        """Initialize an IntervalMatrix instance.

        Args:
            lo: Lower endpoints, a 2-D array.
            hi: Upper endpoints, a 2-D array.

        Raises:
            conecert.errors.IntervalDomainError: if the endpoints are not
                finite or not ordered.
            conecert.errors.DimensionMismatchError: if the shapes differ or
                aren't 2-D.

        """
        lo_a = np.array(lo, dtype=np.float64)
        hi_a = np.array(hi, dtype=np.float64)
        if lo_a.ndim != 2 or lo_a.shape != hi_a.shape:
            raise ex.DimensionMismatchError(
                f'bad endpoint shapes {lo_a.shape} and {hi_a.shape}')
        if not (np.all(np.isfinite(lo_a)) and np.all(np.isfinite(hi_a))):
            raise ex.IntervalDomainError('non-finite endpoint')
        if np.any(lo_a > hi_a):
            raise ex.IntervalDomainError('empty entry')
        lo_a.setflags(write=False)
        hi_a.setflags(write=False)
        self._lo = lo_a
        self._hi = hi_a

    @property
    def lo(self) -> FloatArray:
        """Get the lower endpoints (read-only array)."""
        return self._lo

    @property
    def hi(self) -> FloatArray:
        """Get the upper endpoints (read-only array)."""
        return self._hi

    @property
    def shape(self) -> Tuple[int, int]:
        """Get the (rows, columns) shape."""
        return int(self._lo.shape[0]), int(self._lo.shape[1])

    @property
    def T(self) -> 'IntervalMatrix':  # noqa: N802
        """Get the transpose."""
        return IntervalMatrix(self._lo.T, self._hi.T)

    def __getitem__(self, ij: Tuple[int, int]) -> Interval:
        i, j = ij
        return Interval(self._lo[i, j], self._hi[i, j])

    def __repr__(self) -> str:
        return f'IntervalMatrix(lo={self._lo.tolist()}, ' \
               f'hi={self._hi.tolist()})'

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, IntervalMatrix):
            return NotImplemented
        return bool(np.array_equal(self._lo, other._lo) and
                    np.array_equal(self._hi, other._hi))

    def __hash__(self) -> int:
        return hash((self._lo.tobytes(), self._hi.tobytes()))

    def rows(self) -> List[List[Interval]]:
        """Get the entries as nested lists of intervals."""
        n, m = self.shape
        return [[self[i, j] for j in range(m)] for i in range(n)]

    def mid(self) -> FloatArray:
        """Get the float midpoint matrix (not rigorous)."""
        return 0.5 * self._lo + 0.5 * self._hi

    def mag(self) -> FloatArray:
        """Get entrywise upper bounds of absolute values."""
        return np.maximum(np.abs(self._lo), np.abs(self._hi))

    def contains(self, m: Union[Sequence[Sequence[Real]], FloatArray]) \
            -> bool:
        """Whether a float matrix is a member."""
        arr = np.array(m, dtype=np.float64)
        return bool(np.all(self._lo <= arr) and np.all(arr <= self._hi))

    def is_subset(self, other: 'IntervalMatrix') -> bool:
        """Whether every entry is contained in the entry of `other`."""
        return bool(np.all(other._lo <= self._lo) and
                    np.all(self._hi <= other._hi))

    def hull(self, other: 'IntervalMatrix') -> 'IntervalMatrix':
        """Get the entrywise hull."""
        return IntervalMatrix(np.minimum(self._lo, other._lo),
                              np.maximum(self._hi, other._hi))

    def intersect(self, other: 'IntervalMatrix') \
            -> Optional['IntervalMatrix']:
        """Get the entrywise intersection or None if some entry is empty."""
        lo = np.maximum(self._lo, other._lo)
        hi = np.minimum(self._hi, other._hi)
        if np.any(lo > hi):
            return None
        return IntervalMatrix(lo, hi)

    def symmetrize(self) -> Optional['IntervalMatrix']:
        """Intersect the matrix with its transpose.

        Returns:
            The intersection, or None if it contains no symmetric matrix.

        """
        return self.intersect(self.T)

    def norm_inf_upper(self) -> float:
        """Get an upper bound of the max row sum norm over all members."""
        mag = self.mag()
        best = 0.0
        for row in mag:
            acc = 0.0
            for v in row:
                acc = _add_bounds(acc, float(v))[1]
            best = max(best, acc)
        return best

    def frobenius_upper(self) -> float:
        """Get an upper bound of the Frobenius norm over all members."""
        acc = Interval(0.0)
        for v in self.mag().ravel():
            acc = acc + Interval(float(v)).sqr()
        return acc.sqrt().hi

    def __neg__(self) -> 'IntervalMatrix':
        return IntervalMatrix(-self._hi, -self._lo)

    def __add__(self, other: 'IntervalMatrix') -> 'IntervalMatrix':
        _check_same_shape(self._lo, other._lo)
        return IntervalMatrix(_np_add_bounds(self._lo, other._lo)[0],
                              _np_add_bounds(self._hi, other._hi)[1])

    def __sub__(self, other: 'IntervalMatrix') -> 'IntervalMatrix':
        _check_same_shape(self._lo, other._lo)
        return IntervalMatrix(_np_add_bounds(self._lo, -other._hi)[0],
                              _np_add_bounds(self._hi, -other._lo)[1])

    def scale(self, factor: Operand) -> 'IntervalMatrix':
        """Multiply every entry by an interval or number."""
        f = _as_interval(factor)
        shape = self._lo.shape
        flo = np.full(shape, f.lo)
        fhi = np.full(shape, f.hi)
        return IntervalMatrix(*_np_interval_mul(self._lo, self._hi, flo, fhi))

    @overload
    def __matmul__(self, other: 'IntervalMatrix') -> 'IntervalMatrix':
        ...  # pragma: no cover

    @overload
    def __matmul__(self, other: IntervalVector) -> IntervalVector:
        ...  # pragma: no cover

    def __matmul__(self, other: Union['IntervalMatrix', IntervalVector]) \
            -> Union['IntervalMatrix', IntervalVector]:
        if isinstance(other, IntervalVector):
            col = IntervalMatrix(other.lo.reshape(-1, 1),
                                 other.hi.reshape(-1, 1))
            res = mat_mul(self, col)
            return IntervalVector(res.lo[:, 0], res.hi[:, 0])
        return mat_mul(self, other)


def mat_mul(a: IntervalMatrix, b: IntervalMatrix) -> IntervalMatrix:
    """Multiply two interval matrices.

    Args:
        a: Left factor, n x m.
        b: Right factor, m x p.

    Returns:
        An n x p enclosure of all products of member matrices.

    Raises:
        conecert.errors.DimensionMismatchError: if the inner dimensions
            don't agree.

    """
    n, m = a.shape
    m2, p = b.shape
    if m != m2:
        raise ex.DimensionMismatchError(
            f'cannot multiply {a.shape} by {b.shape}')
    acc_lo = np.zeros((n, p))
    acc_hi = np.zeros((n, p))
    for k in range(m):
        alo = np.repeat(a.lo[:, k:k + 1], p, axis=1)
        ahi = np.repeat(a.hi[:, k:k + 1], p, axis=1)
        blo = np.repeat(b.lo[k:k + 1, :], n, axis=0)
        bhi = np.repeat(b.hi[k:k + 1, :], n, axis=0)
        tlo, thi = _np_interval_mul(alo, ahi, blo, bhi)
        acc_lo = _np_add_bounds(acc_lo, tlo)[0]
        acc_hi = _np_add_bounds(acc_hi, thi)[1]
    return IntervalMatrix(acc_lo, acc_hi)


def verified_inverse(c: Union[Sequence[Sequence[Real]], FloatArray]) \
        -> IntervalMatrix:
    """Enclose the inverse of a float matrix.

    An approximate inverse B is computed in floating point. With
    R = I - BC enclosed in interval arithmetic and rho >= ||R||_inf < 1,
    the Neumann series gives ||C^-1 - B||_inf <= rho ||B||_inf / (1 - rho),
    so B widened entrywise by that bound contains C^-1.

    Args:
        c: A square float matrix.

    Returns:
        An interval matrix containing the exact inverse of `c`.

    Raises:
        conecert.errors.DimensionMismatchError: if `c` is not square.
        conecert.errors.InverseNotVerifiableError: if rho >= 1 or `c` is
            numerically singular.

    """
    arr = np.array(c, dtype=np.float64)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise ex.DimensionMismatchError(f'not square: {arr.shape}')
    n = arr.shape[0]
    try:
        b = np.linalg.inv(arr)
    except np.linalg.LinAlgError:
        raise ex.InverseNotVerifiableError(math.inf)
    if not np.all(np.isfinite(b)):
        raise ex.InverseNotVerifiableError(math.inf)
    bi = IntervalMatrix.point(b)
    residual = IntervalMatrix.identity(n) - \
        mat_mul(bi, IntervalMatrix.point(arr))
    rho = residual.norm_inf_upper()
    if rho >= 1.0:
        raise ex.InverseNotVerifiableError(rho)
    b_norm = bi.norm_inf_upper()
    delta = (Interval(rho) * b_norm / (1.0 - Interval(rho))).hi
    return IntervalMatrix(np.nextafter(b - delta, -np.inf),
                          np.nextafter(b + delta, np.inf))


def interval_solve(a: IntervalMatrix, b: IntervalVector) -> IntervalVector:
    """Enclose the solution set of A x = b over all members.

    Preconditions the system with the inverse of the midpoint of `a` and
    runs Gaussian elimination in interval arithmetic without pivoting.

    Args:
        a: Square interval matrix.
        b: Right-hand side.

    Returns:
        A box containing A^-1 b for every A in `a` and b in `b`.

    Raises:
        conecert.errors.DimensionMismatchError: on shape mismatch.
        conecert.errors.SingularIntervalMatrixError: if some member may be
            singular (a pivot contains zero).

    """
    n, m = a.shape
    if n != m or b.dimension != n:
        raise ex.DimensionMismatchError(
            f'cannot solve {a.shape} system with rhs of length {b.dimension}')
    try:
        precond = np.linalg.inv(a.mid())
    except np.linalg.LinAlgError:
        raise ex.SingularIntervalMatrixError('midpoint matrix is singular')
    if not np.all(np.isfinite(precond)):
        raise ex.SingularIntervalMatrixError('midpoint matrix is singular')
    p = IntervalMatrix.point(precond)
    rows = (p @ a).rows()
    rhs = list(p @ b)
    for k in range(n):
        pivot = rows[k][k]
        if pivot.contains_zero():
            raise ex.SingularIntervalMatrixError(f'pivot {k} contains zero')
        for i in range(k + 1, n):
            factor = rows[i][k] / pivot
            for j in range(k + 1, n):
                rows[i][j] = rows[i][j] - factor * rows[k][j]
            rhs[i] = rhs[i] - factor * rhs[k]
    x: List[Interval] = [Interval(0.0)] * n
    for i in reversed(range(n)):
        acc = rhs[i]
        for j in range(i + 1, n):
            acc = acc - rows[i][j] * x[j]
        x[i] = acc / rows[i][i]
    return IntervalVector.from_intervals(x)


def cholesky_min_pivot(a: IntervalMatrix) -> Optional[float]:
    """Run interval Cholesky on the symmetrized matrix.

    Args:
        a: A square interval matrix enclosing a symmetric family.

    Returns:
        A lower bound of the smallest squared pivot if every pivot interval
        is strictly positive, otherwise None.

    Raises:
        conecert.errors.DimensionMismatchError: if `a` is not square.

    """
    n, m = a.shape
    if n != m:
        raise ex.DimensionMismatchError(f'not square: {a.shape}')
    sym = a.symmetrize()
    if sym is None:
        return None
    entries = sym.rows()
    chol: List[List[Interval]] = [[Interval(0.0)] * n for _ in range(n)]
    min_pivot = math.inf
    for j in range(n):
        s = entries[j][j]
        for k in range(j):
            s = s - chol[j][k].sqr()
        if s.lo <= 0.0:
            return None
        min_pivot = min(min_pivot, s.lo)
        diag = s.sqrt()
        chol[j][j] = diag
        for i in range(j + 1, n):
            t = entries[i][j]
            for k in range(j):
                t = t - chol[i][k] * chol[j][k]
            chol[i][j] = t / diag
    return min_pivot


def is_positive_definite(a: IntervalMatrix) -> bool:
    """Prove that every symmetric member of `a` is positive definite.

    The matrix is intersected with its transpose before an interval Cholesky
    decomposition. False means "could not verify", not "indefinite".

    Args:
        a: A square interval matrix.

    Returns:
        True if positive definiteness was proved.

    """
    return cholesky_min_pivot(a) is not None
