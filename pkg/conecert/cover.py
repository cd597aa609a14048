"""Dyadic uniform cubical covers of a box domain.

A grid at resolution k splits every dimension into cells of side 2^-k. A
dimension is either bounded, covering the lattice range [lo, hi), or
periodic, where cell coordinates are taken modulo `modulus` and the planes
0 and modulus / 2^k are identified.

A cube is the tuple of its integer lattice coordinates. Its realization
Prod [c_i, c_i + 1] / 2^k has exact dyadic endpoints.

"""
import itertools
import math
import re
from abc import ABC, abstractmethod
from typing import Dict, FrozenSet, Iterable, Iterator, List, NamedTuple, \
    Optional, Sequence, Tuple, Union

import numpy as np

from typing_extensions import Literal

from conecert.errors import exceptions as ex
from conecert.interval import FloatArray, IntervalVector


Cube = Tuple[int, ...]

MAX_RESOLUTION = 26
MAX_COORDINATE = 2 ** 25


class Dimension(ABC):
    """Abstract base class of grid dimension descriptors."""

    @property
    @abstractmethod
    def kind(self) -> Literal['bounded', 'periodic']:
        """Get the descriptor kind."""
        raise NotImplementedError  # pragma: no cover

    @abstractmethod
    def refine(self) -> 'Dimension':
        """Get the descriptor of the same segment at resolution k + 1."""
        raise NotImplementedError  # pragma: no cover

    @abstractmethod
    def cell_range(self) -> range:
        """Get the valid (reduced) cell coordinates."""
        raise NotImplementedError  # pragma: no cover

    @abstractmethod
    def to_descriptor(self) -> str:
        """Get the descriptor used in box-list headers."""
        raise NotImplementedError  # pragma: no cover

    def __repr__(self) -> str:
        return self.to_descriptor()

    def __hash__(self) -> int:
        return hash(self.to_descriptor())

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Dimension):
            return NotImplemented
        return self.to_descriptor() == other.to_descriptor()


class Bounded(Dimension):
    """Bounded lattice range [lo, hi) of cell coordinates."""

    def __init__(self, lo: int, hi: int):
        """Initialize a Bounded instance.

        Args:
            lo: First cell coordinate. The segment starts at lo / 2^k.
            hi: One past the last cell coordinate. The segment ends at
                hi / 2^k.

        Raises:
            conecert.errors.PreconditionError: if `lo >= hi` or the range is
                too large for exact dyadic endpoints.

        """
        if lo >= hi:
            raise ex.PreconditionError(f'empty bounded range {lo}:{hi}')
        if max(abs(lo), abs(hi)) > MAX_COORDINATE:
            raise ex.PreconditionError(f'bounded range {lo}:{hi} too large')
        self._lo = int(lo)
        self._hi = int(hi)

    @property
    def kind(self) -> Literal['bounded']:
        """Get the descriptor kind."""
        return 'bounded'

    @property
    def lo(self) -> int:
        """Get the first cell coordinate."""
        return self._lo

    @property
    def hi(self) -> int:
        """Get one past the last cell coordinate."""
        return self._hi

    def refine(self) -> 'Bounded':
        """Get the descriptor of the same segment at resolution k + 1."""
        return Bounded(2 * self._lo, 2 * self._hi)

    def cell_range(self) -> range:
        """Get the valid cell coordinates."""
        return range(self._lo, self._hi)

    def to_descriptor(self) -> str:
        """Get the descriptor used in box-list headers."""
        return f'bounded({self._lo}:{self._hi})'


class Periodic(Dimension):
    """Circle of `modulus` cells."""

    def __init__(self, modulus: int):
        """Initialize a Periodic instance.

        Args:
            modulus: Number of cells around the circle.

        Raises:
            conecert.errors.PreconditionError: if `modulus < 1` or it is too
                large for exact dyadic endpoints.

        """
        if modulus < 1:
            raise ex.PreconditionError(f'modulus {modulus} < 1')
        if modulus > MAX_COORDINATE:
            raise ex.PreconditionError(f'modulus {modulus} too large')
        self._modulus = int(modulus)

    @property
    def kind(self) -> Literal['periodic']:
        """Get the descriptor kind."""
        return 'periodic'

    @property
    def modulus(self) -> int:
        """Get the number of cells around the circle."""
        return self._modulus

    def refine(self) -> 'Periodic':
        """Get the descriptor of the same circle at resolution k + 1."""
        return Periodic(2 * self._modulus)

    def cell_range(self) -> range:
        """Get the valid (reduced) cell coordinates."""
        return range(self._modulus)

    def to_descriptor(self) -> str:
        """Get the descriptor used in box-list headers."""
        return f'periodic({self._modulus})'


_DESCRIPTOR_RE = re.compile(
    r'^(?:bounded\((-?\d+):(-?\d+)\)|periodic\((\d+)\))$')


def parse_dimension(descriptor: str) -> Dimension:
    """Parse a box-list header dimension descriptor.

    Args:
        descriptor: Eg. 'bounded(-16:16)' or 'periodic(16)'.

    Returns:
        The dimension.

    Raises:
        conecert.errors.ArtifactFormatError: if the descriptor is malformed.

    """
    match = _DESCRIPTOR_RE.match(descriptor.strip())
    if not match:
        raise ex.ArtifactFormatError(
            f'bad dimension descriptor {descriptor!r}')
    lo, hi, modulus = match.groups()
    if modulus is not None:
        return Periodic(int(modulus))
    return Bounded(int(lo), int(hi))


class CoverResult(NamedTuple):
    """Result of `min_cover`."""

    cubes: FrozenSet[Cube]
    # True if the box leaves the domain in some bounded dimension. The cube
    # set is then clipped to the domain.
    escaped: bool


class GridSpec:
    """Uniform cubical grid at resolution k over a box domain."""

    def __init__(self, dimensions: Sequence[Dimension], k: int):
        """Initialize a GridSpec instance.

        Args:
            dimensions: One descriptor per dimension.
            k: The resolution. Cubes have side 2^-k.

        Raises:
            conecert.errors.PreconditionError: if there are no dimensions or
                `k` is outside of [0, 26].

        """
        if not dimensions:
            raise ex.PreconditionError('grid needs at least one dimension')
        if not 0 <= k <= MAX_RESOLUTION:
            raise ex.PreconditionError(
                f'resolution {k} outside of [0, {MAX_RESOLUTION}]')
        self._dims = tuple(dimensions)
        self._k = int(k)
        self._scale = math.ldexp(1.0, self._k)

    @property
    def dimensions(self) -> Tuple[Dimension, ...]:
        """Get the dimension descriptors."""
        return self._dims

    @property
    def dim(self) -> int:
        """Get the number of dimensions."""
        return len(self._dims)

    @property
    def k(self) -> int:
        """Get the resolution."""
        return self._k

    @property
    def side(self) -> float:
        """Get the cube side 2^-k."""
        return math.ldexp(1.0, -self._k)

    @property
    def periods(self) -> Tuple[Optional[float], ...]:
        """Get the period length per dimension (None if bounded)."""
        return tuple(math.ldexp(float(d.modulus), -self._k)
                     if isinstance(d, Periodic) else None
                     for d in self._dims)

    def __repr__(self) -> str:
        return f'GridSpec(k={self._k}, domain={self.domain_descriptor()})'

    def __hash__(self) -> int:
        return hash((self._dims, self._k))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, GridSpec):
            return NotImplemented
        return self._dims == other._dims and self._k == other._k

    def domain_descriptor(self) -> str:
        """Get the ';' separated dimension descriptors."""
        return ';'.join(d.to_descriptor() for d in self._dims)

    def refine(self) -> 'GridSpec':
        """Get the grid over the same domain at resolution k + 1."""
        return GridSpec([d.refine() for d in self._dims], self._k + 1)

    def size(self) -> int:
        """Get the number of cubes in the grid."""
        return math.prod(len(d.cell_range()) for d in self._dims)

    def all_cubes(self) -> Iterator[Cube]:
        """Iterate over every cube of the grid in lexicographic order."""
        return itertools.product(*(d.cell_range() for d in self._dims))

    def validate(self, cube: Cube) -> None:
        """Check that a cube belongs to the grid.

        Raises:
            conecert.errors.OutOfRangeCubeError: if it doesn't.

        """
        if len(cube) != self.dim:
            raise ex.OutOfRangeCubeError(
                f'cube {cube} has {len(cube)} coordinates, '
                f'expected {self.dim}')
        for c, d in zip(cube, self._dims):
            if c not in d.cell_range():
                raise ex.OutOfRangeCubeError(
                    f'cube {cube} outside of {self.domain_descriptor()}')

    def children(self, cube: Cube) -> List[Cube]:
        """Get the 2^n cubes of the refined grid that bisect `cube`."""
        return [tuple(child) for child in
                itertools.product(*((2 * c, 2 * c + 1) for c in cube))]

    def centre(self, cube: Cube) -> FloatArray:
        """Get the centre point of a cube."""
        return np.array([math.ldexp(2 * c + 1, -self._k - 1) for c in cube])

    def reduce_point(self, point: Union[Sequence[float], FloatArray]) \
            -> FloatArray:
        """Map periodic coordinates into [0, period)."""
        out = np.array(point, dtype=np.float64)
        for i, period in enumerate(self.periods):
            if period is not None:
                out[i] = math.fmod(out[i], period)
                if out[i] < 0.0:
                    out[i] += period
                if out[i] >= period:
                    out[i] = 0.0
        return out

    def locate(self, point: Union[Sequence[float], FloatArray]) \
            -> Optional[Cube]:
        """Find the cube containing a float point.

        A point on a shared face belongs to the cube above it, except at the
        upper end of a bounded range.

        Args:
            point: The point.

        Returns:
            The cube, or None if the point is outside of a bounded range.

        """
        coords: List[int] = []
        for x, d in zip(point, self._dims):
            if not math.isfinite(x):
                return None
            c = math.floor(float(x) * self._scale)
            if isinstance(d, Periodic):
                c %= d.modulus
            elif isinstance(d, Bounded):
                if c == d.hi and float(x) * self._scale == d.hi:
                    c = d.hi - 1
                if not d.lo <= c < d.hi:
                    return None
            coords.append(c)
        return tuple(coords)


def realize(grid: GridSpec, cube: Cube) -> IntervalVector:
    """Get the exact dyadic box of a cube.

    Args:
        grid: The grid.
        cube: A cube of the grid.

    Returns:
        Prod [c_i, c_i + 1] / 2^k.

    Raises:
        conecert.errors.OutOfRangeCubeError: if the cube isn't in the grid.

    """
    grid.validate(cube)
    k = grid.k
    return IntervalVector([math.ldexp(c, -k) for c in cube],
                          [math.ldexp(c + 1, -k) for c in cube])


def _cell_span(lo: float, hi: float, k: int) -> Tuple[int, int]:
    """First and last cells whose interior meets [lo, hi]."""
    scaled_lo = math.ldexp(lo, k)
    scaled_hi = math.ldexp(hi, k)
    first = math.floor(scaled_lo)
    last = math.ceil(scaled_hi) - 1
    if last < first:
        # Degenerate box on a grid plane touches two cells.
        first, last = first - 1, first
    return first, last


def min_cover(grid: GridSpec, box: IntervalVector) -> CoverResult:
    """Compute the minimal set of grid cubes covering a box.

    A cube is included when the box meets its interior, so removing any cube
    uncovers part of the box. In periodic dimensions the coordinates are
    reduced modulo the modulus and a box at least one period wide covers the
    whole circle. In bounded dimensions the cubes are clipped to the domain
    and the escape flag is raised if the box is not contained in it.

    Args:
        grid: The grid.
        box: The box to cover.

    Returns:
        The cube set and the escape flag.

    Raises:
        conecert.errors.DimensionMismatchError: if the box dimension differs
            from the grid dimension.

    """
    if box.dimension != grid.dim:
        raise ex.DimensionMismatchError(
            f'box of dimension {box.dimension} on grid of dimension '
            f'{grid.dim}')
    escaped = False
    ranges: List[Iterable[int]] = []
    for i, d in enumerate(grid.dimensions):
        first, last = _cell_span(float(box.lo[i]), float(box.hi[i]), grid.k)
        if isinstance(d, Periodic):
            if last - first + 1 >= d.modulus:
                ranges.append(range(d.modulus))
            else:
                ranges.append(sorted({c % d.modulus
                                      for c in range(first, last + 1)}))
        elif isinstance(d, Bounded):
            scaled_lo = math.ldexp(float(box.lo[i]), grid.k)
            scaled_hi = math.ldexp(float(box.hi[i]), grid.k)
            if scaled_lo < d.lo or scaled_hi > d.hi:
                escaped = True
            ranges.append(range(max(first, d.lo), min(last, d.hi - 1) + 1))
        else:  # pragma: no cover
            raise TypeError(f'unknown dimension {d!r}')
    cubes = frozenset(tuple(c) for c in itertools.product(*ranges))
    return CoverResult(cubes=cubes, escaped=escaped)


class _DisjointSets:
    def __init__(self, n: int):
        self._parent = list(range(n))
        self._rank = [0] * n
        self.count = n

    def find(self, i: int) -> int:
        root = i
        while self._parent[root] != root:
            root = self._parent[root]
        while self._parent[i] != root:
            self._parent[i], i = root, self._parent[i]
        return root

    def union(self, i: int, j: int) -> None:
        ri, rj = self.find(i), self.find(j)
        if ri == rj:
            return
        if self._rank[ri] < self._rank[rj]:
            ri, rj = rj, ri
        self._parent[rj] = ri
        if self._rank[ri] == self._rank[rj]:
            self._rank[ri] += 1
        self.count -= 1


def _neighbour(grid: GridSpec, cube: Cube, offset: Tuple[int, ...]) \
        -> Cube:
    out = []
    for c, o, d in zip(cube, offset, grid.dimensions):
        v = c + o
        if isinstance(d, Periodic):
            v %= d.modulus
        out.append(v)
    return tuple(out)


def is_connected(grid: GridSpec, cubes: Iterable[Cube]) -> bool:
    """Whether the union of closed cubes is connected.

    Cubes are adjacent when their closed realizations intersect, which
    includes cubes sharing only a vertex and wrapping across periodic
    dimensions.

    Args:
        grid: The grid.
        cubes: A non-empty set of cubes.

    Returns:
        True if the adjacency graph has a single component.

    Raises:
        conecert.errors.EmptyCubeSetError: if `cubes` is empty.

    """
    items = sorted(set(cubes))
    if not items:
        raise ex.EmptyCubeSetError('connectivity of an empty cube set')
    index: Dict[Cube, int] = {c: i for i, c in enumerate(items)}
    sets = _DisjointSets(len(items))
    offsets = [o for o in itertools.product((-1, 0, 1), repeat=grid.dim)
               if any(o)]
    for cube, i in index.items():
        for offset in offsets:
            j = index.get(_neighbour(grid, cube, offset))
            if j is not None:
                sets.union(i, j)
    return sets.count == 1
