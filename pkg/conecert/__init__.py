# flake8: noqa
# mypy: implicit-reexport

# Flake 8 would complain about unused imports if it was enabled on this file.

import conecert.errors

from conecert.interval import (
    Interval,
    IntervalMatrix,
    IntervalVector,
    interval_solve,
    is_positive_definite,
    verified_inverse
)
from conecert.cover import (
    Bounded,
    Cube,
    GridSpec,
    Periodic,
    is_connected,
    min_cover,
    realize
)
from conecert.digraph import (
    DiGraph,
    cycle_vertex_sets,
    scc
)
from conecert.dynsys import (
    HenonMap,
    LinearMap,
    MapSystem,
    SmaleMap,
    create_system
)
from conecert.enclose import (
    EnclosureResult,
    audit_invariance,
    enclose_attractor,
    enclose_invariant_outer
)
from conecert.periodic import (
    PeriodicCandidate,
    RigorousOrbitProof,
    interval_newton,
    prove_fixed_point,
    prove_orbit,
    prove_period_two,
    refine_cycles
)
from conecert.frames import (
    CoordinateFrame,
    FrameAssignment,
    seed_frames,
    spread_frames
)
from conecert.cones import (
    CertifiedRates,
    ConeReport,
    QuadraticForm,
    certify_rates,
    verify_cone_conditions
)
from conecert.config import PipelineConfig, load_config
from conecert.pipeline import Pipeline
