"""Read and write pipeline artifacts.

Artifacts are plain files:

* box list: CSV with a `# dim=<n> k=<k> domain=<descriptors>` header and one
  line of lattice coordinates per cube;
* vertex table and edge list: the box list with a leading id column, and
  `src_id,dst_id` lines;
* frames: CSV lines `id,provenance,<row-major hex floats of C>`;
* reports: JSON documents with sorted keys. Floats that must survive a round
  trip are written as hex strings.

"""
import csv
import io
import json
import re
from pathlib import Path
from typing import Any, Dict, Iterable, List, Mapping, Optional, Sequence, \
    Tuple, Union, cast

import numpy as np

from conecert.cover import Cube, GridSpec, parse_dimension
from conecert.digraph import DiGraph
from conecert.errors import exceptions as ex
from conecert.frames import CoordinateFrame, FrameAssignment, Provenance
from conecert.interval import FloatArray, IntervalVector
from conecert.periodic import PeriodicCandidate


PathLike = Union[str, Path]

_HEADER_RE = re.compile(r'^#\s*dim=(\d+)\s+k=(\d+)\s+domain=(\S+)\s*$')
_PROVENANCES = ('periodic-seed', 'spread')


def hex_floats(values: Iterable[float]) -> List[str]:
    """Convert floats to exact hex strings."""
    return [float(v).hex() for v in values]


def from_hex_floats(values: Iterable[str]) -> FloatArray:
    """Convert hex strings back to floats.

    Raises:
        conecert.errors.ArtifactFormatError: if a value isn't a hex float.

    """
    try:
        return np.array([float.fromhex(v) for v in values], dtype=np.float64)
    except (TypeError, ValueError) as e:
        raise ex.ArtifactFormatError(f'bad hex float: {e}')


def box_to_dict(box: IntervalVector) -> Dict[str, List[str]]:
    """Convert a box to hex endpoint lists."""
    return {'lo': hex_floats(box.lo), 'hi': hex_floats(box.hi)}


class Serializer:
    """Convert between pipeline objects and artifact files."""

    def __init__(self) -> None:
        """Initialize a Serializer instance."""
        # Lazy-initialize codecs
        self._encoder_handle: Optional[json.JSONEncoder] = None
        self._decoder_handle: Optional[json.JSONDecoder] = None

    @property
    def _encoder(self) -> json.JSONEncoder:
        if self._encoder_handle is None:
            self._encoder_handle = json.JSONEncoder(sort_keys=True, indent=2)
        return self._encoder_handle

    @property
    def _decoder(self) -> json.JSONDecoder:
        if self._decoder_handle is None:
            self._decoder_handle = json.JSONDecoder()
        return self._decoder_handle

    @staticmethod
    def _header(grid: GridSpec) -> str:
        return f'# dim={grid.dim} k={grid.k} ' \
               f'domain={grid.domain_descriptor()}'

    @staticmethod
    def _parse_header(line: str) -> GridSpec:
        match = _HEADER_RE.match(line.strip())
        if not match:
            raise ex.ArtifactFormatError(f'bad box-list header {line!r}')
        dim, k, domain = match.groups()
        dims = [parse_dimension(d) for d in domain.split(';')]
        if len(dims) != int(dim):
            raise ex.ArtifactFormatError(
                f'header declares dim={dim} but lists {len(dims)} dimensions')
        return GridSpec(dims, int(k))

    @staticmethod
    def _read_lines(path: PathLike) -> List[str]:
        try:
            return Path(path).read_text().splitlines()
        except OSError as e:
            raise ex.ArtifactFormatError(f'cannot read {path}: {e}')

    @staticmethod
    def _parse_ints(row: Sequence[str], width: int, path: PathLike) \
            -> Tuple[int, ...]:
        if len(row) != width:
            raise ex.ArtifactFormatError(
                f'{path}: expected {width} fields, got {len(row)}')
        try:
            return tuple(int(v) for v in row)
        except ValueError as e:
            raise ex.ArtifactFormatError(f'{path}: {e}')

    def dumps_box_list(self, grid: GridSpec, cubes: Iterable[Cube]) -> str:
        """Format a box list."""
        buf = io.StringIO()
        buf.write(self._header(grid) + '\n')
        writer = csv.writer(buf, lineterminator='\n')
        for cube in sorted(set(cubes)):
            writer.writerow(cube)
        return buf.getvalue()

    def write_box_list(self, path: PathLike, grid: GridSpec,
                       cubes: Iterable[Cube]) -> None:
        """Write cubes sorted lexicographically.

        Args:
            path: Output file.
            grid: The grid of the cubes.
            cubes: The cubes.

        """
        Path(path).write_text(self.dumps_box_list(grid, cubes))

    def read_box_list(self, path: PathLike) -> Tuple[GridSpec, List[Cube]]:
        """Read a box list.

        Returns:
            The grid from the header and the cubes in file order.

        Raises:
            conecert.errors.ArtifactFormatError: on a malformed file.
            conecert.errors.OutOfRangeCubeError: if a cube isn't in the grid.

        """
        lines = self._read_lines(path)
        if not lines:
            raise ex.ArtifactFormatError(f'{path}: empty box list')
        grid = self._parse_header(lines[0])
        cubes = []
        for row in csv.reader(lines[1:]):
            if not row:
                continue
            cube = self._parse_ints(row, grid.dim, path)
            grid.validate(cube)
            cubes.append(cube)
        return grid, cubes

    def write_graph(self, vertices_path: PathLike, edges_path: PathLike,
                    grid: GridSpec, graph: DiGraph) -> None:
        """Write the vertex table and the edge list of a graph."""
        buf = io.StringIO()
        buf.write(self._header(grid) + '\n')
        writer = csv.writer(buf, lineterminator='\n')
        for i, cube in enumerate(graph.vertices):
            writer.writerow((i,) + tuple(cube))
        Path(vertices_path).write_text(buf.getvalue())
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator='\n')
        for src, dst in graph.id_edges():
            writer.writerow((src, dst))
        Path(edges_path).write_text(buf.getvalue())

    def read_graph(self, vertices_path: PathLike, edges_path: PathLike) \
            -> Tuple[GridSpec, DiGraph]:
        """Read a graph written by `write_graph`.

        Raises:
            conecert.errors.ArtifactFormatError: on malformed files or ids
                that are not dense.

        """
        lines = self._read_lines(vertices_path)
        if not lines:
            raise ex.ArtifactFormatError(f'{vertices_path}: empty table')
        grid = self._parse_header(lines[0])
        cubes: List[Cube] = []
        for row in csv.reader(lines[1:]):
            if not row:
                continue
            values = self._parse_ints(row, grid.dim + 1, vertices_path)
            if values[0] != len(cubes):
                raise ex.ArtifactFormatError(
                    f'{vertices_path}: ids must be 0, 1, ... in order')
            grid.validate(values[1:])
            cubes.append(values[1:])
        if cubes != sorted(cubes):
            raise ex.ArtifactFormatError(
                f'{vertices_path}: cubes must be sorted')
        edges = [cast(Tuple[int, int], self._parse_ints(row, 2, edges_path))
                 for row in csv.reader(self._read_lines(edges_path)) if row]
        try:
            graph = DiGraph.from_id_edges(cubes, edges)
        except ex.UnknownVertexError as e:
            raise ex.ArtifactFormatError(f'{edges_path}: {e}')
        return grid, graph

    def dumps_json(self, doc: Mapping[str, Any]) -> str:
        """Format a JSON document with sorted keys."""
        return self._encoder.encode(doc) + '\n'

    def write_json(self, path: PathLike, doc: Mapping[str, Any]) -> None:
        """Write a JSON document with sorted keys."""
        Path(path).write_text(self.dumps_json(doc))

    def read_json(self, path: PathLike) -> Dict[str, Any]:
        """Read a JSON object.

        Raises:
            conecert.errors.ArtifactFormatError: if the file isn't a JSON
                object.

        """
        text = '\n'.join(self._read_lines(path))
        try:
            doc = self._decoder.decode(text)
        except json.JSONDecodeError as e:
            raise ex.ArtifactFormatError(f'{path}: {e}')
        if not isinstance(doc, dict):
            raise ex.ArtifactFormatError(f'{path}: expected a JSON object')
        return doc

    def candidates_to_dict(self, candidates: Sequence[
                           Sequence[PeriodicCandidate]],
                           graph: DiGraph) -> Dict[str, Any]:
        """Convert candidates by period to a JSON document."""
        return {'periods': [
            [{'period': c.period,
              'point': hex_floats(c.point),
              'cube_id': graph.vertex_id(c.cube)} for c in group]
            for group in candidates]}

    def candidates_from_dict(self, doc: Mapping[str, Any],
                             graph: DiGraph) \
            -> List[List[PeriodicCandidate]]:
        """Convert a document from `candidates_to_dict` back.

        Raises:
            conecert.errors.ArtifactFormatError: on a malformed document.

        """
        try:
            return [[PeriodicCandidate(point=from_hex_floats(c['point']),
                                       period=int(c['period']),
                                       cube=graph.cube_of(int(c['cube_id'])))
                     for c in group] for group in doc['periods']]
        except (KeyError, TypeError, ValueError,
                ex.UnknownVertexError) as e:
            raise ex.ArtifactFormatError(f'bad candidates document: {e}')

    def write_frames(self, path: PathLike, frames: FrameAssignment,
                     graph: DiGraph) -> None:
        """Write the frame of every assigned vertex, in id order."""
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator='\n')
        for cube, frame in frames.items():
            writer.writerow([graph.vertex_id(cube), frame.provenance] +
                            hex_floats(frame.matrix.ravel()))
        Path(path).write_text(buf.getvalue())

    def read_frames(self, path: PathLike, graph: DiGraph,
                    dim: int) -> FrameAssignment:
        """Read frames and re-certify their inverses.

        Raises:
            conecert.errors.ArtifactFormatError: on a malformed file.
            conecert.errors.InverseNotVerifiableError: if a stored frame is
                not verifiably invertible.

        """
        frames = FrameAssignment()
        for row in csv.reader(self._read_lines(path)):
            if not row:
                continue
            if len(row) != 2 + dim * dim or row[1] not in _PROVENANCES:
                raise ex.ArtifactFormatError(f'{path}: bad frame row')
            try:
                cube = graph.cube_of(int(row[0]))
            except (ValueError, ex.UnknownVertexError) as e:
                raise ex.ArtifactFormatError(f'{path}: {e}')
            matrix = from_hex_floats(row[2:]).reshape(dim, dim)
            frames.claim(cube, CoordinateFrame.from_matrix(
                matrix, cast(Provenance, row[1])))
        return frames
