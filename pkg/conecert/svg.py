"""Plane projections of box lists as SVG."""
from pathlib import Path
from typing import Iterable, List, Sequence, Tuple, Union

from conecert.cover import Cube, GridSpec
from conecert.errors import exceptions as ex


Rect = Tuple[float, float, float, float]

_STYLE = 'fill:#4a78b5;fill-opacity:0.6;stroke:#1f3c63;stroke-width:0.002'


def projected_rects(grid: GridSpec, cubes: Iterable[Cube],
                    axes: Sequence[int]) -> List[Rect]:
    """Project cubes onto two axes.

    Args:
        grid: The grid of the cubes.
        cubes: The cubes.
        axes: The two distinct axes (i, j) to keep.

    Returns:
        Sorted distinct rectangles (x, y, width, height) in domain
        coordinates.

    Raises:
        conecert.errors.PreconditionError: if the axes are not two distinct
            dimensions of the grid.

    """
    if len(axes) != 2 or axes[0] == axes[1] or \
            not all(0 <= a < grid.dim for a in axes):
        raise ex.PreconditionError(
            f'axes {tuple(axes)} must be two distinct axes of a '
            f'{grid.dim}-dimensional grid')
    i, j = axes
    side = grid.side
    cells = sorted({(c[i], c[j]) for c in cubes})
    return [(a * side, b * side, side, side) for a, b in cells]


def export_svg(grid: GridSpec, cubes: Iterable[Cube],
               axes: Sequence[int]) -> str:
    """Render the projection of a box list.

    The y axis points up. An empty box list gives an empty unit canvas.

    """
    rects = projected_rects(grid, cubes, axes)
    if rects:
        x0 = min(r[0] for r in rects)
        y0 = min(r[1] for r in rects)
        x1 = max(r[0] + r[2] for r in rects)
        y1 = max(r[1] + r[3] for r in rects)
    else:
        x0, y0, x1, y1 = 0.0, 0.0, 1.0, 1.0
    lines = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" '
        f'viewBox="{x0!r} {-y1!r} {x1 - x0!r} {y1 - y0!r}">',
        f'<g transform="scale(1,-1)" style="{_STYLE}">',
    ]
    lines.extend(f'<rect x="{x!r}" y="{y!r}" width="{w!r}" height="{h!r}"/>'
                 for x, y, w, h in rects)
    lines.append('</g>')
    lines.append('</svg>')
    return '\n'.join(lines) + '\n'


def write_svg(path: Union[str, Path], grid: GridSpec, cubes: Iterable[Cube],
              axes: Sequence[int]) -> None:
    """Write `export_svg` output to a file."""
    Path(path).write_text(export_svg(grid, cubes, axes))
