import io
import json
import tempfile
from contextlib import redirect_stderr, redirect_stdout
from pathlib import Path

import conecert.cli as m
from conecert.cover import Bounded, GridSpec
from conecert.errors import EnclosureFailure, StageError
from conecert.pipeline import RunSummary, StageRow
from conecert.serializer import Serializer

from tests.unit import TestBase
from tests.unit.fixtures import cat_map_doc


class CliTestBase(TestBase):
    def setUp(self):
        super().setUp()
        tmp = tempfile.TemporaryDirectory()
        self.addCleanup(tmp.cleanup)
        self.dir = Path(tmp.name)

    def _main(self, *argv):
        out, err = io.StringIO(), io.StringIO()
        with redirect_stdout(out), redirect_stderr(err):
            code = m.main([str(a) for a in argv])
        return code, out.getvalue(), err.getvalue()


class TestParser(TestBase):
    def test_run(self):
        args = m.build_parser().parse_args(['run', 'c.json', '--parallel',
                                            '--threads', '4'])
        self.assertEqual(args.command, 'run')
        self.assertEqual(args.config, Path('c.json'))
        self.assertEqual(args.mode, 'parallel')
        self.assertEqual(args.threads, 4)
        self.assertIsNone(args.out)

    def test_stage_commands(self):
        parser = m.build_parser()
        for name in ['enclose', 'cycles', 'refine', 'frames', 'verify',
                     'prove', 'rates']:
            args = parser.parse_args([name, 'c.json', '--from', 'prev'])
            self.assertEqual(args.command, name)
            self.assertEqual(args.from_dir, Path('prev'))

    def test_exclusive_modes(self):
        with redirect_stderr(io.StringIO()):
            with self.assertRaises(SystemExit):
                m.build_parser().parse_args(['run', 'c.json', '--parallel',
                                             '--deterministic'])

    def test_command_required(self):
        with redirect_stderr(io.StringIO()):
            with self.assertRaises(SystemExit):
                m.build_parser().parse_args([])

    def test_axes(self):
        args = m.build_parser().parse_args(['export-svg', 'b.csv', '--axes',
                                            '2,0'])
        self.assertEqual(args.axes, (2, 0))
        with redirect_stderr(io.StringIO()):
            with self.assertRaises(SystemExit):
                m.build_parser().parse_args(['export-svg', 'b.csv',
                                             '--axes', '0,x'])


class TestMainDispatch(CliTestBase):
    _to_patch = [
        'conecert.cli.Pipeline',
        'conecert.cli.load_config',
    ]

    def setUp(self):
        super().setUp()
        self.pipeline = self._mocks['Pipeline'].return_value
        self.config = self._mocks['load_config'].return_value

    def test_overrides(self):
        self.pipeline.run.return_value = RunSummary([], None)
        self._main('run', 'c.json', '--deterministic', '--out', 'o')
        self._mocks['load_config'].assert_called_once_with(Path('c.json'))
        self.config.with_overrides.assert_called_once_with(
            mode='deterministic', threads=None, output='o')
        self._mocks['Pipeline'].assert_called_once_with(
            self.config.with_overrides.return_value)

    def test_unverified(self):
        self.pipeline.run.return_value = RunSummary(
            [StageRow('verify', 0.5, '|U| = 3')], False)
        code, out, _ = self._main('run', 'c.json')
        self.assertEqual(code, m.EXIT_UNVERIFIED)
        self.assertIn('|U| = 3', out)
        self.assertIn('not verified', out)

    def test_stage(self):
        self.pipeline.run_stage.return_value = RunSummary([], True)
        code, _, _ = self._main('frames', 'c.json', '--from', 'prev')
        self.assertEqual(code, m.EXIT_OK)
        self.pipeline.run_stage.assert_called_once_with('frames',
                                                        Path('prev'))

    def test_stage_error(self):
        self.pipeline.run.side_effect = StageError(
            'enclose', EnclosureFailure((1, 2)))
        code, _, err = self._main('run', 'c.json')
        self.assertEqual(code, m.EXIT_ERROR)
        self.assertIn('error in stage enclose', err)
        self.assertIn('(cube (1, 2))', err)


class TestMain(CliTestBase):
    def _config(self, **overrides):
        path = self.dir / 'cat.json'
        path.write_text(json.dumps(cat_map_doc(self.dir / 'from-config',
                                               **overrides)))
        return path

    def test_run(self):
        out_dir = self.dir / 'out'
        code, out, _ = self._main('run', self._config(), '--out', out_dir)
        self.assertEqual(code, m.EXIT_OK)
        self.assertTrue((out_dir / 'summary.json').is_file())
        self.assertFalse((self.dir / 'from-config').exists())
        self.assertEqual(out.splitlines()[0].split()[0], 'stage')

    def test_bad_config(self):
        code, _, err = self._main('run', self.dir / 'missing.json')
        self.assertEqual(code, m.EXIT_ERROR)
        self.assertIn('error:', err)

    def test_missing_artifacts(self):
        code, _, err = self._main('verify', self._config())
        self.assertEqual(code, m.EXIT_ERROR)
        self.assertIn('error in stage enclose', err)

    def test_export_svg(self):
        grid = GridSpec([Bounded(-4, 4), Bounded(-4, 4)], 2)
        boxes = self.dir / 'boxes.csv'
        Serializer().write_box_list(boxes, grid, [(0, 0), (1, 1)])
        code, _, _ = self._main('export-svg', boxes)
        self.assertEqual(code, m.EXIT_OK)
        self.assertEqual(
            (self.dir / 'boxes.svg').read_text().count('<rect'), 2)

    def test_export_svg_bad_axes(self):
        grid = GridSpec([Bounded(-4, 4), Bounded(-4, 4)], 2)
        boxes = self.dir / 'boxes.csv'
        Serializer().write_box_list(boxes, grid, [(0, 0)])
        code, _, err = self._main('export-svg', boxes, '--axes', '0,0')
        self.assertEqual(code, m.EXIT_ERROR)
        self.assertIn('axes', err)
