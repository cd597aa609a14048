"""Concrete Conecert exceptions.

Every exception derives from `ConecertError`. A failed verification (a
positive definiteness test that can not be proved, an interval Newton image
that is not contained in its ball) is reported as a value, not raised.

"""
from typing import Tuple

from conecert.errors.base import ConecertError


class IntervalDomainError(ConecertError):
    """An elementary function was called outside of its domain."""


class ZeroDivisionIntervalError(IntervalDomainError):
    """Division by an interval that contains zero."""

    def __init__(self) -> None:
        """Initialize a ZeroDivisionIntervalError instance."""
        super().__init__('division by zero-containing interval')


class DimensionMismatchError(ConecertError):
    """Operand shapes don't agree."""


class InverseNotVerifiableError(ConecertError):
    """The residual bound of an approximate inverse is not below one."""

    def __init__(self, residual_norm: float):
        """Initialize an InverseNotVerifiableError instance.

        Args:
            residual_norm: Upper bound of the infinity norm of I - BC.

        """
        super().__init__('inverse not verifiable',
                         {'residual_norm': residual_norm})


class SingularIntervalMatrixError(ConecertError):
    """Interval Gaussian elimination met a pivot that contains zero."""


class OutOfRangeCubeError(ConecertError):
    """A cube coordinate lies outside of its lattice range."""


class EmptyCubeSetError(ConecertError):
    """An operation that needs at least one cube got none."""


class UnknownVertexError(ConecertError):
    """The cube is not a vertex of the graph."""


class SeedEscapedError(ConecertError):
    """A float trajectory left the domain before the transient ended."""

    def __init__(self, step: int):
        """Initialize a SeedEscapedError instance.

        Args:
            step: The iterate index at which the trajectory escaped.

        """
        super().__init__('seed escaped; choose different start or domain',
                         {'step': step})


class EnclosureFailure(ConecertError):
    """The image of a cube is not contained in the support of the grid."""

    def __init__(self, cube: Tuple[int, ...]):
        """Initialize an EnclosureFailure instance.

        Args:
            cube: Lattice coordinates of the cube whose image escaped.

        """
        super().__init__(f'image of cube {tuple(cube)} escapes the domain',
                         {'cube': tuple(cube)})
        self.cube = tuple(cube)


class NoInvariantSetError(ConecertError):
    """Pruning removed every cube."""

    def __init__(self) -> None:
        """Initialize a NoInvariantSetError instance."""
        super().__init__('no invariant set detected in domain')


class NewtonOperatorUndefinedError(ConecertError):
    """The interval Jacobian over the ball is not verifiably invertible."""

    def __init__(self) -> None:
        """Initialize a NewtonOperatorUndefinedError instance."""
        super().__init__('Newton operator undefined')


class PreconditionError(ConecertError):
    """An operation was called with arguments violating its precondition."""


class IllConditionedFrameError(ConecertError):
    """The eigenvector matrix is (nearly) defective."""

    def __init__(self, condition: float):
        """Initialize an IllConditionedFrameError instance.

        Args:
            condition: The condition number of the eigenvector matrix.

        """
        super().__init__('ill-conditioned frame', {'condition': condition})


class MissingFrameError(ConecertError):
    """A vertex has no coordinate frame assigned."""


class NotStronglyConnectedError(ConecertError):
    """The graph has more than one strongly connected component."""


class RatesNotVerifiableError(ConecertError):
    """No expansion rate above one could be certified."""


class ConfigValidationError(ConecertError):
    """The pipeline configuration document is invalid."""

    def __init__(self, path: str, message: str):
        """Initialize a ConfigValidationError instance.

        Args:
            path: Dotted path of the offending key, eg. 'grid.k'.
            message: What is wrong with it.

        """
        super().__init__(f'{path}: {message}', {'path': path})
        self.path = path


class ArtifactFormatError(ConecertError):
    """An artifact file could not be parsed."""
