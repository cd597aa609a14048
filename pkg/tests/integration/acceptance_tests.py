#!/usr/bin/env python3
"""Acceptance runs on the Smale solenoid and the Henon map.

Runs the shipped configurations in deterministic mode and checks box counts,
the periodic inventory, the cone conditions and the orbit proofs. Artifacts
go to a temporary directory.
"""
import logging
import math
import tempfile
import time
from pathlib import Path

import numpy as np

import conecert as cc
from conecert.dynsys import iterate, orbit_jacobian
from conecert.periodic import group_orbits, periodic_distance
from conecert.pipeline import PROOFS_FILE


CONFIG_DIR = Path(__file__).resolve().parents[2] / 'configs'

logging.basicConfig(level=logging.INFO)


def _config(name: str, out_dir: Path) -> cc.PipelineConfig:
    config = cc.load_config(CONFIG_DIR / name)
    return config.with_overrides(mode='deterministic',
                                 output=str(out_dir / name))


def _same_t(values, expected) -> bool:
    # Orbit t-coordinates on the circle, compared as sets.
    if len(values) != len(expected):
        return False
    return all(any(periodic_distance([v], [e], [1.0]) < 1e-8
                   for v in values) for e in expected)


def _henon_period_two(a: float, b: float):
    """Period-2 points of the Henon map by brute-force root finding on H^2."""
    system = cc.HenonMap(a, b)
    roots = []
    for x in np.linspace(-2.0, 2.0, 81):
        for y in np.linspace(-2.0, 2.0, 81):
            point = np.array([x, y])
            for _ in range(50):
                residual = iterate(system, point, 2)[-1] - point
                jac = orbit_jacobian(system, point, 2) - np.eye(2)
                try:
                    point = point - np.linalg.solve(jac, residual)
                except np.linalg.LinAlgError:
                    break
                if not np.all(np.abs(point) < 10.0):
                    break
            residual = iterate(system, point, 2)[-1] - point
            if np.max(np.abs(residual)) < 1e-12 and np.max(np.abs(
                    system.eval(point) - point)) > 1e-6 and not any(
                    np.max(np.abs(point - r)) < 1e-8 for r in roots):
                roots.append(point)
    return roots


tmp = tempfile.TemporaryDirectory()
out_dir = Path(tmp.name)

logging.info('Starting acceptance tests in %s', out_dir)

logging.info('Testing Smale enclosure at k=4')
started = time.perf_counter()
pipeline = cc.Pipeline(_config('smale.json', out_dir))
summary = pipeline.run()
elapsed = time.perf_counter() - started
ctx = pipeline.context
graph = ctx.require_graph()
assert 480 <= len(graph) <= 680, len(graph)
assert cc.audit_invariance(
    cc.EnclosureResult(graph, ctx.grid, 'attractor', False), ctx.system) == []
assert all(graph.out(v) for v in graph.vertices)
assert cc.is_connected(ctx.grid, graph.vertices)

logging.info('Testing Smale periodic inventory')
candidates = ctx.require_candidates()
orbits = [group_orbits(ctx.system, ctx.grid, group) for group in candidates]
assert [len(o) for o in orbits] == [1, 1, 2], [len(o) for o in orbits]
fixed = candidates[0][0].point
assert np.max(np.abs(fixed - [5 / 9, 0.0, 0.0])) < 1e-8 or \
    np.max(np.abs(fixed - [5 / 9, 0.0, 1.0])) < 1e-8, fixed
assert _same_t([c.point[2] for c in orbits[1][0]], [1 / 3, 2 / 3])
expected = [[1 / 7, 2 / 7, 4 / 7], [3 / 7, 5 / 7, 6 / 7]]
found = [[c.point[2] for c in orbit] for orbit in orbits[2]]
assert any(_same_t(found[0], e) and _same_t(found[1], f)
           for e, f in [expected, expected[::-1]]), found

logging.info('Testing Smale certification')
assert summary.verified and summary.exit_code == 0
assert ctx.report is not None and not ctx.report.unverified
assert ctx.rates is not None and ctx.rates.lam > 1.0, ctx.rates
assert all(p.verdict for p in ctx.proofs or [])
logging.info('Smale k=4 done in %.1fs', elapsed)

logging.info('Testing Smale enclosure at k=6')
pipeline = cc.Pipeline(_config('smale_k6.json', out_dir))
pipeline.run_stage('enclose')
graph = pipeline.context.require_graph()
assert 2800 <= len(graph) <= 3900, len(graph)

logging.info('Testing Henon enclosure and certification')
started = time.perf_counter()
config = _config('henon.json', out_dir)
pipeline = cc.Pipeline(config)
summary = pipeline.run()
ctx = pipeline.context
graph = ctx.require_graph()
assert 4000 <= len(graph) <= 20000, len(graph)
assert summary.verified, ctx.report
certified = ctx.require_certified()
logging.info('Certified %d of %d boxes', len(certified), len(graph))
logging.info('Henon done in %.1fs', time.perf_counter() - started)

logging.info('Testing Henon orbit proofs')
a, b = config.system.params['a'], config.system.params['b']
radius = config.tolerances.proof_radius
vertices = frozenset(graph.vertices)
for sign in (1.0, -1.0):
    x = (-2 + sign * math.sqrt(25.6)) / 10.8
    proof = cc.prove_fixed_point(ctx.system, [x, -x], radius, ctx.grid,
                                 vertices)
    assert proof.verdict and proof.in_support, proof
    assert ctx.grid.locate([x, -x]) in certified, x
roots = _henon_period_two(a, b)
assert len(roots) == 2, roots
proof = cc.prove_period_two(ctx.system, roots[0], ctx.system.eval(roots[0]),
                            radius, ctx.grid, vertices)
assert proof.verdict, proof
proofs = ctx.serializer.read_json(ctx.artifact(PROOFS_FILE))
assert sorted(o['period'] for o in proofs['orbits'] if o['verdict']) == \
    [1, 1, 2], proofs['orbits']

tmp.cleanup()
logging.info('+++ Success +++')
