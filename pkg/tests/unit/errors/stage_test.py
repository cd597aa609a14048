import conecert.errors as errors

from tests.unit import TestBase


class TestStageError(TestBase):
    def test_wraps_cause(self):
        cause = errors.EnclosureFailure((1, -2))
        e = errors.StageError('enclose', cause)
        self.assertIs(e.cause, cause)
        self.assertEqual(e.stage_name, 'enclose')
        self.assertEqual(e.cube, (1, -2))
        self.assertEqual(e.context['stage'], 'enclose')
        self.assertIn('escapes the domain', str(e))

    def test_no_cube(self):
        e = errors.StageError('frames', errors.IllConditionedFrameError(1e9))
        self.assertIsNone(e.cube)
        self.assertEqual(e.context['condition'], 1e9)

    def test_cause_context_untouched(self):
        cause = errors.SeedEscapedError(3)
        errors.StageError('enclose', cause)
        self.assertEqual(cause.context, {'step': 3})


class TestExceptions(TestBase):
    def test_hierarchy(self):
        self.assertTrue(issubclass(errors.ZeroDivisionIntervalError,
                                   errors.IntervalDomainError))
        self.assertTrue(issubclass(errors.StageError, errors.ConecertError))

    def test_config_path(self):
        e = errors.ConfigValidationError('grid.k', 'must be >= 0')
        self.assertEqual(e.path, 'grid.k')
        self.assertEqual(str(e), 'grid.k: must be >= 0')

    def test_context_copied(self):
        context = {'cube': (0,)}
        e = errors.ConecertError('message', context)
        context['cube'] = (1,)
        self.assertEqual(e.context, {'cube': (0,)})
