"""Pipeline configuration.

A run is described by one JSON document. Its raw shape is given by the
TypedDicts below; `PipelineConfig.from_dict` validates it into an immutable
tree of NamedTuples. Every validation error names the dotted path of the
offending key.

"""
import json
from pathlib import Path
from typing import Any, Dict, List, Mapping, NamedTuple, Optional, \
    Sequence, Tuple, Union

from typing_extensions import Literal, TypedDict

from conecert.cones import QuadraticForm
from conecert.cover import GridSpec, parse_dimension
from conecert.dynsys import MapSystem, create_system
from conecert.enclose import Strategy
from conecert.errors import exceptions as ex


Mode = Literal['deterministic', 'parallel']


class SystemDict(TypedDict, total=False):
    name: str
    params: Dict[str, Any]


class GridDict(TypedDict, total=False):
    # Dimension descriptors at resolution k, eg. 'bounded(-16:16)'.
    domain: List[str]
    k: int


class SeedDict(TypedDict, total=False):
    start: List[float]
    transient: int


class OuterDict(TypedDict, total=False):
    max_refine: int
    scc_core: bool


class SignatureDict(TypedDict, total=False):
    u: int
    s: int


class TolerancesDict(TypedDict, total=False):
    newton_tol: float
    max_iter: int
    dedup_tol: float
    period_sep_tol: float
    proof_radius: float
    bisect_tol: float
    lambda_max: float


class PipelineDict(TypedDict, total=False):
    system: SystemDict
    grid: GridDict
    strategy: str
    seed: SeedDict
    outer: OuterDict
    max_period: int
    spread_k: int
    require_single_scc: bool
    signature: SignatureDict
    tolerances: TolerancesDict
    mode: str
    threads: int
    output: str


def _get(doc: Mapping[str, Any], key: str, path: str,
         default: Any = None, required: bool = False) -> Any:
    if key not in doc:
        if required:
            raise ex.ConfigValidationError(_join(path, key), 'missing')
        return default
    return doc[key]


def _join(path: str, key: str) -> str:
    return f'{path}.{key}' if path else key


def _mapping(value: Any, path: str) -> Mapping[str, Any]:
    if not isinstance(value, dict):
        raise ex.ConfigValidationError(path, 'expected an object')
    return value


def _int(value: Any, path: str, minimum: Optional[int] = None) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ex.ConfigValidationError(path, f'expected an integer, got '
                                             f'{value!r}')
    if minimum is not None and value < minimum:
        raise ex.ConfigValidationError(path, f'must be >= {minimum}')
    return value


def _positive(value: Any, path: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ex.ConfigValidationError(path, f'expected a number, got '
                                             f'{value!r}')
    if not value > 0:
        raise ex.ConfigValidationError(path, 'must be positive')
    return float(value)


def _bool(value: Any, path: str) -> bool:
    if not isinstance(value, bool):
        raise ex.ConfigValidationError(path, 'expected true or false')
    return value


def _choice(value: Any, path: str, choices: Sequence[str]) -> str:
    if value not in choices:
        raise ex.ConfigValidationError(
            path, f'expected one of {", ".join(choices)}, got {value!r}')
    return str(value)


class SystemConfig(NamedTuple):
    name: str
    params: Dict[str, Any]

    def build(self) -> MapSystem:
        """Instantiate the map."""
        return create_system(self.name, self.params)


class GridConfig(NamedTuple):
    domain: Tuple[str, ...]
    k: int

    def build(self) -> GridSpec:
        """Instantiate the grid."""
        return GridSpec([parse_dimension(d) for d in self.domain], self.k)


class SeedConfig(NamedTuple):
    start: Tuple[float, ...]
    transient: int = 1000


class OuterConfig(NamedTuple):
    # Bisection rounds after the first pruning.
    max_refine: int = 0
    scc_core: bool = False


class Tolerances(NamedTuple):
    newton_tol: float = 1e-12
    max_iter: int = 50
    dedup_tol: float = 1e-8
    period_sep_tol: float = 1e-6
    proof_radius: float = 1e-10
    bisect_tol: float = 1e-3
    lambda_max: float = 16.0


class PipelineConfig(NamedTuple):
    """Validated configuration of a pipeline run."""

    system: SystemConfig
    grid: GridConfig
    strategy: Strategy
    signature: Tuple[int, int]
    seed: Optional[SeedConfig] = None
    outer: OuterConfig = OuterConfig()
    max_period: int = 3
    spread_k: int = 2
    require_single_scc: bool = True
    tolerances: Tolerances = Tolerances()
    mode: Mode = 'deterministic'
    threads: int = 1
    output: str = 'out'

    @property
    def processes(self) -> int:
        """Get the number of worker processes to use."""
        return self.threads if self.mode == 'parallel' else 1

    def quadratic_form(self) -> QuadraticForm:
        """Get the diagonal form of the configured signature."""
        u, s = self.signature
        return QuadraticForm(u, s)

    def with_overrides(self, mode: Optional[Mode] = None,
                       threads: Optional[int] = None,
                       output: Optional[str] = None) -> 'PipelineConfig':
        """Replace run options given on the command line.

        Raises:
            conecert.errors.ConfigValidationError: if `threads` < 1.

        """
        config = self
        if mode is not None:
            config = config._replace(mode=mode)
        if threads is not None:
            config = config._replace(threads=_int(threads, 'threads', 1))
        if output is not None:
            config = config._replace(output=output)
        return config

    @classmethod
    def from_dict(cls, doc: Mapping[str, Any]) -> 'PipelineConfig':
        """Validate a raw configuration document.

        Args:
            doc: The parsed JSON document, shaped like `PipelineDict`.

        Returns:
            The configuration.

        Raises:
            conecert.errors.ConfigValidationError: naming the first invalid
                key, including a signature or grid whose dimension doesn't
                match the map.

        """
        doc = _mapping(doc, '<document>')

        sys_doc = _mapping(_get(doc, 'system', '', required=True), 'system')
        name = _get(sys_doc, 'name', 'system', required=True)
        if not isinstance(name, str):
            raise ex.ConfigValidationError('system.name', 'expected a string')
        params = dict(_mapping(_get(sys_doc, 'params', 'system', {}),
                               'system.params'))
        system = SystemConfig(name, params)
        try:
            dimension = system.build().dimension
        except (ex.DimensionMismatchError, ex.IntervalDomainError) as e:
            raise ex.ConfigValidationError('system.params', str(e))

        grid_doc = _mapping(_get(doc, 'grid', '', required=True), 'grid')
        domain = _get(grid_doc, 'domain', 'grid', required=True)
        if not isinstance(domain, list) or \
                not all(isinstance(d, str) for d in domain):
            raise ex.ConfigValidationError('grid.domain',
                                           'expected a list of descriptors')
        grid = GridConfig(tuple(domain),
                          _int(_get(grid_doc, 'k', 'grid', required=True),
                               'grid.k', 0))
        try:
            built = grid.build()
        except (ex.ArtifactFormatError, ex.PreconditionError) as e:
            raise ex.ConfigValidationError('grid', str(e))
        if built.dim != dimension:
            raise ex.ConfigValidationError(
                'grid.domain', f'{built.dim} dimensions for a '
                               f'{dimension}-dimensional map')

        sig_doc = _mapping(_get(doc, 'signature', '', required=True),
                           'signature')
        u = _int(_get(sig_doc, 'u', 'signature', required=True),
                 'signature.u', 0)
        s = _int(_get(sig_doc, 's', 'signature', required=True),
                 'signature.s', 0)
        if u + s != dimension:
            raise ex.ConfigValidationError(
                'signature', f'u + s = {u + s} but the map has dimension '
                             f'{dimension}')

        strategy = _choice(_get(doc, 'strategy', '', 'attractor'),
                           'strategy', ('attractor', 'outer'))
        seed: Optional[SeedConfig] = None
        if 'seed' in doc:
            seed_doc = _mapping(doc['seed'], 'seed')
            start = _get(seed_doc, 'start', 'seed', required=True)
            if not isinstance(start, list) or len(start) != dimension or \
                    not all(isinstance(v, (int, float)) and
                            not isinstance(v, bool) for v in start):
                raise ex.ConfigValidationError(
                    'seed.start', f'expected {dimension} numbers')
            seed = SeedConfig(tuple(float(v) for v in start),
                              _int(_get(seed_doc, 'transient', 'seed', 1000),
                                   'seed.transient', 0))
        if strategy == 'attractor' and seed is None:
            raise ex.ConfigValidationError(
                'seed', 'missing, required by the attractor strategy')

        outer_doc = _mapping(_get(doc, 'outer', '', {}), 'outer')
        outer = OuterConfig(
            max_refine=_int(_get(outer_doc, 'max_refine', 'outer', 0),
                            'outer.max_refine', 0),
            scc_core=_bool(_get(outer_doc, 'scc_core', 'outer', False),
                           'outer.scc_core'))

        tol_doc = _mapping(_get(doc, 'tolerances', '', {}), 'tolerances')
        unknown = set(tol_doc) - set(Tolerances._fields)
        if unknown:
            raise ex.ConfigValidationError(
                f'tolerances.{sorted(unknown)[0]}', 'unknown key')
        defaults = Tolerances()
        values: Dict[str, float] = {
            key: _positive(_get(tol_doc, key, 'tolerances',
                                getattr(defaults, key)), f'tolerances.{key}')
            for key in Tolerances._fields if key != 'max_iter'}
        tolerances = Tolerances(
            max_iter=_int(_get(tol_doc, 'max_iter', 'tolerances',
                               defaults.max_iter), 'tolerances.max_iter', 1),
            **values)
        if not tolerances.lambda_max > 1:
            raise ex.ConfigValidationError('tolerances.lambda_max',
                                           'must be > 1')

        output = _get(doc, 'output', '', 'out')
        if not isinstance(output, str) or not output:
            raise ex.ConfigValidationError('output', 'expected a path')

        return cls(
            system=system,
            grid=grid,
            strategy='outer' if strategy == 'outer' else 'attractor',
            signature=(u, s),
            seed=seed,
            outer=outer,
            max_period=_int(_get(doc, 'max_period', '', 3), 'max_period', 1),
            spread_k=_int(_get(doc, 'spread_k', '', 2), 'spread_k', 1),
            require_single_scc=_bool(
                _get(doc, 'require_single_scc', '', True),
                'require_single_scc'),
            tolerances=tolerances,
            mode='parallel' if _choice(
                _get(doc, 'mode', '', 'deterministic'), 'mode',
                ('deterministic', 'parallel')) == 'parallel'
            else 'deterministic',
            threads=_int(_get(doc, 'threads', '', 1), 'threads', 1),
            output=output)


def load_config(path: Union[str, Path]) -> PipelineConfig:
    """Read and validate a configuration file.

    Raises:
        conecert.errors.ConfigValidationError: if the file can't be read,
            isn't JSON or doesn't validate.

    """
    try:
        doc = json.loads(Path(path).read_text())
    except OSError as e:
        raise ex.ConfigValidationError('<document>', f'cannot read: {e}')
    except json.JSONDecodeError as e:
        raise ex.ConfigValidationError('<document>', f'invalid JSON: {e}')
    return PipelineConfig.from_dict(doc)
