import json
import tempfile
from pathlib import Path

import conecert.config as m
from conecert.cones import QuadraticForm
from conecert.cover import Bounded, GridSpec, Periodic
from conecert.dynsys import SmaleMap
from conecert.errors import exceptions as ex

from tests.unit import TestBase
from tests.unit.fixtures import cat_map_doc, smale_doc


class TestFromDict(TestBase):
    def _assert_invalid(self, doc, path):
        with self.assertRaises(ex.ConfigValidationError) as cm:
            m.PipelineConfig.from_dict(doc)
        self.assertEqual(cm.exception.path, path)

    def test_smale(self):
        config = m.PipelineConfig.from_dict(smale_doc())
        self.assertEqual(config.strategy, 'attractor')
        self.assertEqual(config.signature, (1, 2))
        self.assertEqual(config.seed, m.SeedConfig((0.5, 0.0, 0.1), 1000))
        self.assertEqual(config.tolerances, m.Tolerances())
        self.assertEqual(config.outer, m.OuterConfig())
        self.assertEqual(config.output, 'out')
        self.assertTrue(config.require_single_scc)
        self.assertIsInstance(config.system.build(), SmaleMap)
        self.assertEqual(config.grid.build(),
                         GridSpec([Bounded(-16, 16), Bounded(-16, 16),
                                   Periodic(16)], 4))
        self.assertEqual(config.quadratic_form(), QuadraticForm(1, 2))

    def test_tolerances(self):
        config = m.PipelineConfig.from_dict(smale_doc(
            tolerances={'proof_radius': 1e-6, 'max_iter': 10}))
        self.assertEqual(config.tolerances.proof_radius, 1e-6)
        self.assertEqual(config.tolerances.max_iter, 10)
        self.assertEqual(config.tolerances.newton_tol, 1e-12)

    def test_outer(self):
        config = m.PipelineConfig.from_dict(cat_map_doc(
            'x', outer={'max_refine': 3, 'scc_core': True}))
        self.assertEqual(config.outer, m.OuterConfig(3, True))
        self.assertIsNone(config.seed)

    def test_missing_keys(self):
        for key in ['system', 'grid', 'signature']:
            doc = smale_doc()
            del doc[key]
            self._assert_invalid(doc, key)
        doc = smale_doc()
        del doc['grid']['k']
        self._assert_invalid(doc, 'grid.k')

    def test_not_an_object(self):
        self._assert_invalid([], '<document>')
        self._assert_invalid(smale_doc(grid=[]), 'grid')

    def test_unknown_system(self):
        self._assert_invalid(smale_doc(system={'name': 'lorenz'}),
                             'system.name')

    def test_bad_params(self):
        self._assert_invalid(
            smale_doc(system={'name': 'henon', 'params': {'c': 1}}),
            'system.params')
        self._assert_invalid(
            smale_doc(system={'name': 'linear',
                              'params': {'matrix': [[1.0, 2.0]]}}),
            'system.params')

    def test_grid_dimension(self):
        doc = smale_doc()
        doc['grid']['domain'] = doc['grid']['domain'][:2]
        self._assert_invalid(doc, 'grid.domain')

    def test_bad_descriptor(self):
        doc = smale_doc()
        doc['grid']['domain'][2] = 'circle(16)'
        self._assert_invalid(doc, 'grid')

    def test_signature_mismatch(self):
        self._assert_invalid(smale_doc(signature={'u': 1, 's': 1}),
                             'signature')

    def test_bool_is_not_int(self):
        self._assert_invalid(smale_doc(max_period=True), 'max_period')

    def test_minimum(self):
        self._assert_invalid(smale_doc(max_period=0), 'max_period')
        self._assert_invalid(smale_doc(threads=0), 'threads')

    def test_seed_required(self):
        doc = smale_doc()
        del doc['seed']
        self._assert_invalid(doc, 'seed')

    def test_seed_length(self):
        self._assert_invalid(smale_doc(seed={'start': [0.0, 0.0]}),
                             'seed.start')

    def test_strategy(self):
        self._assert_invalid(smale_doc(strategy='inner'), 'strategy')

    def test_mode(self):
        self._assert_invalid(smale_doc(mode='fast'), 'mode')
        config = m.PipelineConfig.from_dict(smale_doc(mode='parallel',
                                                      threads=4))
        self.assertEqual(config.processes, 4)

    def test_unknown_tolerance(self):
        self._assert_invalid(smale_doc(tolerances={'eps': 1e-3}),
                             'tolerances.eps')

    def test_negative_tolerance(self):
        self._assert_invalid(smale_doc(tolerances={'dedup_tol': -1.0}),
                             'tolerances.dedup_tol')

    def test_lambda_max(self):
        self._assert_invalid(smale_doc(tolerances={'lambda_max': 0.5}),
                             'tolerances.lambda_max')

    def test_bad_output(self):
        self._assert_invalid(smale_doc(output=''), 'output')

    def test_bad_flag(self):
        self._assert_invalid(smale_doc(require_single_scc='yes'),
                             'require_single_scc')


class TestOverrides(TestBase):
    def setUp(self):
        super().setUp()
        self.config = m.PipelineConfig.from_dict(smale_doc())

    def test_processes(self):
        self.assertEqual(self.config._replace(threads=8).processes, 1)

    def test_overrides(self):
        config = self.config.with_overrides(mode='parallel', threads=3,
                                            output='elsewhere')
        self.assertEqual(config.processes, 3)
        self.assertEqual(config.output, 'elsewhere')

    def test_none_keeps(self):
        self.assertEqual(self.config.with_overrides(), self.config)

    def test_bad_threads(self):
        with self.assertRaises(ex.ConfigValidationError):
            self.config.with_overrides(threads=0)


class TestLoadConfig(TestBase):
    def setUp(self):
        super().setUp()
        tmp = tempfile.TemporaryDirectory()
        self.addCleanup(tmp.cleanup)
        self.dir = Path(tmp.name)

    def test_load(self):
        path = self.dir / 'smale.json'
        path.write_text(json.dumps(smale_doc()))
        self.assertEqual(m.load_config(path),
                         m.PipelineConfig.from_dict(smale_doc()))

    def test_missing(self):
        with self.assertRaises(ex.ConfigValidationError) as cm:
            m.load_config(self.dir / 'nope.json')
        self.assertEqual(cm.exception.path, '<document>')

    def test_invalid_json(self):
        path = self.dir / 'bad.json'
        path.write_text('{"system": ')
        with self.assertRaises(ex.ConfigValidationError):
            m.load_config(path)

    def test_shipped_configs(self):
        root = Path(__file__).resolve().parents[2] / 'configs'
        names = sorted(p.name for p in root.glob('*.json'))
        self.assertEqual(names, ['henon.json', 'smale.json',
                                 'smale_k6.json'])
        for path in root.glob('*.json'):
            m.load_config(path)
