# flake8: noqa
# mypy: implicit-reexport

# Flake 8 would complain about unused imports if it was enabled on this file.

from conecert.errors.exceptions import *
from conecert.errors.base import ConecertError
from conecert.errors.stage import StageError
