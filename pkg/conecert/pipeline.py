"""Stage orchestration.

The pipeline runs enclose, cycles, refine, frames, verify, prove and rates
in this order. Each stage writes its artifacts to the output directory and
can reload them, so any stage can be rerun on the artifacts of an earlier
run.

"""
import logging
import time
from abc import ABC, abstractmethod
from contextlib import contextmanager
from pathlib import Path
from typing import Any, Dict, FrozenSet, Iterator, List, NamedTuple, \
    Optional, Sequence, Tuple

from conecert.cones import CertifiedRates, ConeReport, certify_rates, \
    verify_cone_conditions
from conecert.config import PipelineConfig
from conecert.cover import Cube, GridSpec, is_connected
from conecert.digraph import DiGraph, cycle_vertex_sets, is_single_scc, scc
from conecert.dynsys import MapSystem
from conecert.enclose import EnclosureResult, audit_invariance, \
    enclose_attractor, enclose_invariant_outer, find_seed
from conecert.errors import exceptions as ex
from conecert.errors.base import ConecertError
from conecert.errors.stage import StageError
from conecert.frames import FrameAssignment, reachable_from_frames, \
    seed_frames, spread_frames
from conecert.periodic import PeriodicCandidate, RigorousOrbitProof, \
    group_orbits, prove_orbit, refine_cycles
from conecert.serializer import Serializer, box_to_dict, hex_floats


logger = logging.getLogger(__name__)

BOXES_FILE = 'boxes.csv'
VERTICES_FILE = 'vertices.csv'
EDGES_FILE = 'edges.csv'
ENCLOSURE_FILE = 'enclosure.json'
CYCLES_FILE = 'cycles.json'
CANDIDATES_FILE = 'candidates.json'
FRAMES_FILE = 'frames.csv'
CONES_FILE = 'cones.json'
PROOFS_FILE = 'proofs.json'
RATES_FILE = 'rates.json'
SUMMARY_FILE = 'summary.json'


class StageRow(NamedTuple):
    """One line of the run summary."""

    stage: str
    seconds: float
    result: str


class RunContext:
    """State shared by the stages of one run."""

    def __init__(self, config: PipelineConfig):
        """Initialize a RunContext instance.

        Args:
            config: The run configuration.

        Raises:
            conecert.errors.ConfigValidationError: if the map can't be
                built.

        """
        self.config = config
        self.system: MapSystem = config.system.build()
        self.grid: GridSpec = config.grid.build()
        self.out_dir = Path(config.output)
        self.serializer = Serializer()
        self.graph: Optional[DiGraph] = None
        # Part of the graph carrying frames, checked by verify and rates.
        self.certified: Optional[DiGraph] = None
        self.cycle_sets: Optional[List[FrozenSet[Cube]]] = None
        self.candidates: Optional[List[List[PeriodicCandidate]]] = None
        self.frames: Optional[FrameAssignment] = None
        self.report: Optional[ConeReport] = None
        self.proofs: Optional[List[RigorousOrbitProof]] = None
        self.rates: Optional[CertifiedRates] = None
        self.rates_error: Optional[str] = None

    def require_graph(self) -> DiGraph:
        """Get the enclosure graph.

        Raises:
            conecert.errors.PreconditionError: if it isn't computed yet.

        """
        if self.graph is None:
            raise ex.PreconditionError('no enclosure; run enclose first')
        return self.graph

    def require_certified(self) -> DiGraph:
        """Get the framed part of the enclosure graph.

        Raises:
            conecert.errors.PreconditionError: if frames aren't spread yet.

        """
        if self.certified is None:
            raise ex.PreconditionError('no frames; run frames first')
        return self.certified

    def require_candidates(self) -> List[List[PeriodicCandidate]]:
        """Get the periodic point candidates."""
        if self.candidates is None:
            raise ex.PreconditionError('no candidates; run refine first')
        return self.candidates

    def require_frames(self) -> FrameAssignment:
        """Get the frame assignment."""
        if self.frames is None:
            raise ex.PreconditionError('no frames; run frames first')
        return self.frames

    def artifact(self, name: str) -> Path:
        """Get the output path of an artifact."""
        return self.out_dir / name


class Stage(ABC):
    """Pipeline stage base class."""

    @property
    @abstractmethod
    def name(self) -> str:
        """Get the stage name used on the command line."""
        raise NotImplementedError

    @property
    def requires(self) -> Tuple[str, ...]:
        """Get the stages whose artifacts this stage reads, in load order."""
        return ()

    @abstractmethod
    def run(self, ctx: RunContext) -> str:
        """Execute the stage and write its artifacts.

        Returns:
            The result column of the summary table.

        """
        raise NotImplementedError

    @abstractmethod
    def load(self, ctx: RunContext, directory: Path) -> None:
        """Read the artifacts of an earlier run of this stage into `ctx`.

        Raises:
            conecert.errors.ArtifactFormatError: if an artifact is missing or
                malformed.

        """
        raise NotImplementedError


class EncloseStage(Stage):
    """Build the enclosure graph."""

    @property
    def name(self) -> str:
        return 'enclose'

    def run(self, ctx: RunContext) -> str:
        config = ctx.config
        if config.strategy == 'attractor':
            assert config.seed is not None
            seed = find_seed(ctx.grid, ctx.system, config.seed.start,
                             config.seed.transient)
            result = enclose_attractor(seed, ctx.grid, ctx.system,
                                       config.processes)
            violators = audit_invariance(result, ctx.system,
                                         config.processes)
            if violators:
                raise ex.EnclosureFailure(violators[0])
        else:
            result = enclose_invariant_outer(
                ctx.grid, ctx.system, ctx.grid.all_cubes(),
                config.outer.max_refine, config.outer.scc_core,
                config.processes)
        ctx.grid = result.grid
        ctx.graph = result.graph
        self._write(ctx, result)
        return f'{len(result.graph)} boxes, {result.graph.edge_count} edges'

    @staticmethod
    def _write(ctx: RunContext, result: EnclosureResult) -> None:
        graph = result.graph
        ser = ctx.serializer
        ser.write_box_list(ctx.artifact(BOXES_FILE), result.grid,
                           graph.vertices)
        ser.write_graph(ctx.artifact(VERTICES_FILE),
                        ctx.artifact(EDGES_FILE), result.grid, graph)
        ser.write_json(ctx.artifact(ENCLOSURE_FILE), {
            'strategy': result.strategy,
            'escaped': result.escaped,
            'k': result.grid.k,
            'vertex_count': len(graph),
            'edge_count': graph.edge_count,
            'connected': is_connected(result.grid, graph.vertices),
            'scc_count': len(scc(graph)),
        })

    def load(self, ctx: RunContext, directory: Path) -> None:
        ctx.grid, ctx.graph = ctx.serializer.read_graph(
            directory / VERTICES_FILE, directory / EDGES_FILE)


class CyclesStage(Stage):
    """Find the vertices on short closed walks."""

    @property
    def name(self) -> str:
        return 'cycles'

    @property
    def requires(self) -> Tuple[str, ...]:
        return ('enclose',)

    def run(self, ctx: RunContext) -> str:
        graph = ctx.require_graph()
        ctx.cycle_sets = cycle_vertex_sets(graph, ctx.config.max_period)
        ctx.serializer.write_json(ctx.artifact(CYCLES_FILE), {
            'max_period': ctx.config.max_period,
            'vertex_ids': [sorted(graph.vertex_id(c) for c in cubes)
                           for cubes in ctx.cycle_sets]})
        return ' + '.join(str(len(s)) for s in ctx.cycle_sets) + ' boxes'

    def load(self, ctx: RunContext, directory: Path) -> None:
        graph = ctx.require_graph()
        doc = ctx.serializer.read_json(directory / CYCLES_FILE)
        try:
            ctx.cycle_sets = [frozenset(graph.cube_of(int(i)) for i in ids)
                              for ids in doc['vertex_ids']]
        except (KeyError, TypeError, ValueError,
                ex.UnknownVertexError) as e:
            raise ex.ArtifactFormatError(f'bad cycles document: {e}')


class RefineStage(Stage):
    """Turn cycle sets into periodic point candidates."""

    @property
    def name(self) -> str:
        return 'refine'

    @property
    def requires(self) -> Tuple[str, ...]:
        return ('enclose', 'cycles')

    def run(self, ctx: RunContext) -> str:
        graph = ctx.require_graph()
        if ctx.cycle_sets is None:
            raise ex.PreconditionError('no cycle sets; run cycles first')
        tol = ctx.config.tolerances
        ctx.candidates = refine_cycles(
            graph, ctx.grid, ctx.system, ctx.cycle_sets,
            newton_tol=tol.newton_tol, max_iter=tol.max_iter,
            dedup_tol=tol.dedup_tol, period_sep_tol=tol.period_sep_tol)
        ctx.serializer.write_json(
            ctx.artifact(CANDIDATES_FILE),
            ctx.serializer.candidates_to_dict(ctx.candidates, graph))
        orbits = sum(len(group_orbits(ctx.system, ctx.grid, group,
                                      tol.dedup_tol))
                     for group in ctx.candidates)
        points = ' + '.join(str(len(g)) for g in ctx.candidates)
        return f'{points} points in {orbits} orbits'

    def load(self, ctx: RunContext, directory: Path) -> None:
        doc = ctx.serializer.read_json(directory / CANDIDATES_FILE)
        ctx.candidates = ctx.serializer.candidates_from_dict(
            doc, ctx.require_graph())


class FramesStage(Stage):
    """Seed frames at periodic points and spread them over the graph."""

    @property
    def name(self) -> str:
        return 'frames'

    @property
    def requires(self) -> Tuple[str, ...]:
        return ('enclose', 'refine')

    def run(self, ctx: RunContext) -> str:
        graph = ctx.require_graph()
        config = ctx.config
        frames = seed_frames(FrameAssignment(), ctx.require_candidates(),
                             ctx.system, graph, ctx.grid)
        seeded = len(frames)
        certified = certified_part(graph, frames, config.require_single_scc)
        spread_frames(certified, frames, ctx.system, ctx.grid,
                      k=config.spread_k,
                      require_single_scc=config.require_single_scc,
                      processes=config.processes)
        ctx.frames = frames
        ctx.certified = certified
        ctx.serializer.write_frames(ctx.artifact(FRAMES_FILE), frames, graph)
        return f'{len(frames)} frames ({seeded} seeded)'

    def load(self, ctx: RunContext, directory: Path) -> None:
        graph = ctx.require_graph()
        ctx.frames = ctx.serializer.read_frames(
            directory / FRAMES_FILE, graph, ctx.grid.dim)
        ctx.certified = graph.subgraph(ctx.frames)


def certified_part(graph: DiGraph, frames: FrameAssignment,
                   require_single_scc: bool) -> DiGraph:
    """Get the part of the graph that frames can be spread over.

    A strongly connected graph is kept whole. Otherwise only the vertices
    reachable from seeded vertices are kept.

    Args:
        graph: The enclosure graph.
        frames: The seeded frames.
        require_single_scc: Keep the whole graph, spreading then fails on a
            graph with several components.

    Returns:
        The graph to spread frames over and certify.

    """
    if require_single_scc or is_single_scc(graph):
        return graph
    logger.warning('Graph has %d strongly connected components',
                   len(scc(graph)))
    certified = reachable_from_frames(graph, frames)
    dropped = len(graph) - len(certified)
    if dropped:
        logger.warning('Dropping %d of %d vertices unreachable from seeded '
                       'frames', dropped, len(graph))
    return certified


def report_to_dict(report: ConeReport, graph: DiGraph) -> Dict[str, Any]:
    """Convert a cone report to a JSON document."""
    return {
        'verified': report.verified,
        'vertex_count': report.vertex_count,
        'edge_count': report.edge_count,
        'unverified': sorted(graph.vertex_id(c) for c in report.unverified),
        'failed_edges': [[graph.vertex_id(a), graph.vertex_id(b)]
                         for a, b in report.failed_edges],
        'min_margin': report.min_margin,
    }


def report_from_dict(doc: Dict[str, Any], graph: DiGraph) -> ConeReport:
    """Convert a document from `report_to_dict` back.

    Raises:
        conecert.errors.ArtifactFormatError: on a malformed document.

    """
    try:
        margin = doc['min_margin']
        return ConeReport(
            unverified=frozenset(graph.cube_of(int(i))
                                 for i in doc['unverified']),
            failed_edges=tuple((graph.cube_of(int(a)), graph.cube_of(int(b)))
                               for a, b in doc['failed_edges']),
            min_margin=None if margin is None else float(margin),
            vertex_count=int(doc['vertex_count']),
            edge_count=int(doc['edge_count']))
    except (KeyError, TypeError, ValueError, ex.UnknownVertexError) as e:
        raise ex.ArtifactFormatError(f'bad cone report: {e}')


class VerifyStage(Stage):
    """Check the cone condition on every edge."""

    @property
    def name(self) -> str:
        return 'verify'

    @property
    def requires(self) -> Tuple[str, ...]:
        return ('enclose', 'frames')

    def run(self, ctx: RunContext) -> str:
        graph = ctx.require_certified()
        report = verify_cone_conditions(
            graph, ctx.require_frames(), ctx.config.quadratic_form(),
            ctx.system, ctx.grid, ctx.config.processes)
        ctx.report = report
        ctx.serializer.write_json(ctx.artifact(CONES_FILE),
                                  report_to_dict(report, graph))
        if report.verified:
            return f'U empty, {report.edge_count} edges verified'
        return f'|U| = {len(report.unverified)}, ' \
               f'{len(report.failed_edges)} of {report.edge_count} edges ' \
               f'failed'

    def load(self, ctx: RunContext, directory: Path) -> None:
        ctx.report = report_from_dict(
            ctx.serializer.read_json(directory / CONES_FILE),
            ctx.require_certified())


def proof_to_dict(proof: RigorousOrbitProof, period: int) -> Dict[str, Any]:
    """Convert an orbit proof to a JSON document."""
    return {
        'period': period,
        'center': hex_floats(proof.center),
        'radius': proof.radius,
        'verdict': proof.verdict,
        'distance': proof.distance,
        'in_support': proof.in_support,
        'newton_image': None if proof.newton_image is None
        else box_to_dict(proof.newton_image),
    }


class ProveStage(Stage):
    """Prove the periodic orbits found by refine."""

    @property
    def name(self) -> str:
        return 'prove'

    @property
    def requires(self) -> Tuple[str, ...]:
        return ('enclose', 'refine')

    def run(self, ctx: RunContext) -> str:
        graph = ctx.require_graph()
        vertices = frozenset(graph.vertices)
        radius = ctx.config.tolerances.proof_radius
        docs: List[Dict[str, Any]] = []
        proofs: List[RigorousOrbitProof] = []
        for group in ctx.require_candidates():
            for orbit in group_orbits(ctx.system, ctx.grid, group,
                                      ctx.config.tolerances.dedup_tol):
                period = orbit[0].period
                points = [c.point for c in orbit]
                if len(points) != period:
                    logger.warning('Period %d orbit at %s has %d candidates',
                                   period, points[0].tolist(), len(points))
                    docs.append({'period': period,
                                 'center': [hex_floats(p) for p in points],
                                 'verdict': False,
                                 'error': 'incomplete orbit'})
                    continue
                try:
                    proof = prove_orbit(ctx.system, points, radius, ctx.grid,
                                        vertices)
                except (ex.PreconditionError,
                        ex.NewtonOperatorUndefinedError) as e:
                    logger.warning('No proof for period %d orbit at %s: %s',
                                   period, points[0].tolist(), e)
                    docs.append({'period': period,
                                 'center': [hex_floats(p) for p in points],
                                 'verdict': False, 'error': str(e)})
                    continue
                if not proof.verdict:
                    logger.warning('Newton test failed for period %d orbit '
                                   'at %s', period, points[0].tolist())
                proofs.append(proof)
                docs.append(proof_to_dict(proof, period))
        ctx.proofs = proofs
        ctx.serializer.write_json(ctx.artifact(PROOFS_FILE),
                                  {'radius': radius, 'orbits': docs})
        proved = sum(1 for d in docs if d['verdict'])
        return f'{proved} of {len(docs)} orbits proved'

    def load(self, ctx: RunContext, directory: Path) -> None:
        # Nothing downstream consumes the proofs.
        ctx.serializer.read_json(directory / PROOFS_FILE)


def rates_to_dict(rates: CertifiedRates) -> Dict[str, Any]:
    """Convert certified constants to a JSON document."""
    return dict(rates._asdict())


class RatesStage(Stage):
    """Certify the expansion constants of a verified graph."""

    @property
    def name(self) -> str:
        return 'rates'

    @property
    def requires(self) -> Tuple[str, ...]:
        return ('enclose', 'frames', 'verify')

    def run(self, ctx: RunContext) -> str:
        if ctx.report is None:
            raise ex.PreconditionError('no cone report; run verify first')
        if not ctx.report.verified:
            ctx.rates_error = 'cone condition not verified'
            return 'skipped, cone condition not verified'
        tol = ctx.config.tolerances
        rates = certify_rates(ctx.require_certified(), ctx.require_frames(),
                              ctx.config.quadratic_form(), ctx.system,
                              ctx.grid, bisect_tol=tol.bisect_tol,
                              lambda_max=tol.lambda_max,
                              processes=ctx.config.processes)
        ctx.rates = rates
        ctx.serializer.write_json(ctx.artifact(RATES_FILE),
                                  rates_to_dict(rates))
        return f'lambda = {rates.lam:.6g}, c = {rates.c:.3g}'

    def load(self, ctx: RunContext, directory: Path) -> None:
        doc = ctx.serializer.read_json(directory / RATES_FILE)
        try:
            ctx.rates = CertifiedRates(**doc)
        except TypeError as e:
            raise ex.ArtifactFormatError(f'bad rates document: {e}')


STAGES: Tuple[Stage, ...] = (EncloseStage(), CyclesStage(), RefineStage(),
                             FramesStage(), VerifyStage(), ProveStage(),
                             RatesStage())


def stage_names() -> Tuple[str, ...]:
    """Get the stage names in execution order."""
    return tuple(s.name for s in STAGES)


def get_stage(name: str) -> Stage:
    """Look up a stage by name.

    Raises:
        conecert.errors.PreconditionError: if there is no such stage.

    """
    for stage in STAGES:
        if stage.name == name:
            return stage
    raise ex.PreconditionError(f'unknown stage {name!r}')


class RunSummary(NamedTuple):
    """Outcome of a pipeline run."""

    rows: List[StageRow]
    # None if the verify stage didn't run.
    verified: Optional[bool]

    @property
    def exit_code(self) -> int:
        """Get 2 if the cone condition failed on some edge, 0 otherwise."""
        return 2 if self.verified is False else 0

    def format_table(self) -> str:
        """Format the rows as a fixed width table."""
        width = max([len('stage')] + [len(r.stage) for r in self.rows])
        lines = [f'{"stage":<{width}}  {"time [s]":>10}  result']
        for row in self.rows:
            lines.append(f'{row.stage:<{width}}  {row.seconds:>10.2f}  '
                         f'{row.result}')
        return '\n'.join(lines)


class Pipeline:
    """Runs stages on one configuration."""

    @staticmethod
    @contextmanager
    def _dispatch_stage_error(stage: Stage) -> Iterator[None]:
        """Raise a StageError naming the stage on any library error."""
        try:
            yield None
        except StageError:
            raise
        except ConecertError as e:
            raise StageError(stage.name, e)

    def __init__(self, config: PipelineConfig):
        """Initialize a Pipeline instance.

        Args:
            config: The run configuration.

        """
        self._ctx = RunContext(config)

    @property
    def context(self) -> RunContext:
        """Get the run state."""
        return self._ctx

    def _execute(self, stage: Stage) -> StageRow:
        logger.info('Stage %s started', stage.name)
        started = time.perf_counter()
        with self._dispatch_stage_error(stage):
            result = stage.run(self._ctx)
        row = StageRow(stage.name, time.perf_counter() - started, result)
        logger.info('Stage %s finished in %.2fs: %s', stage.name,
                    row.seconds, row.result)
        return row

    def _verified(self) -> Optional[bool]:
        report = self._ctx.report
        return None if report is None else report.verified

    def _write_summary(self, rows: Sequence[StageRow]) -> None:
        self._ctx.serializer.write_json(
            self._ctx.artifact(SUMMARY_FILE),
            {'rows': [r._asdict() for r in rows],
             'verified': self._verified()})

    def run(self) -> RunSummary:
        """Run every stage in order.

        Returns:
            The summary. Rates are skipped if the cone condition failed.

        Raises:
            conecert.errors.StageError: if a stage fails.

        """
        self._ctx.out_dir.mkdir(parents=True, exist_ok=True)
        rows = [self._execute(stage) for stage in STAGES]
        self._write_summary(rows)
        return RunSummary(rows, self._verified())

    def run_stage(self, name: str,
                  from_dir: Optional[Path] = None) -> RunSummary:
        """Run one stage on the artifacts of earlier stages.

        Args:
            name: The stage name.
            from_dir: Directory with the artifacts of the required stages.
                Defaults to the output directory.

        Returns:
            The one-row summary.

        Raises:
            conecert.errors.StageError: if loading the inputs or running the
                stage fails.

        """
        stage = get_stage(name)
        directory = from_dir if from_dir is not None else self._ctx.out_dir
        for required in stage.requires:
            dependency = get_stage(required)
            with self._dispatch_stage_error(dependency):
                dependency.load(self._ctx, directory)
        self._ctx.out_dir.mkdir(parents=True, exist_ok=True)
        row = self._execute(stage)
        return RunSummary([row], self._verified())
