# mypy: implicit-reexport

from tests.unit.test_base import TestBase


__all__ = ['TestBase']
