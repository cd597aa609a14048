from typing import Optional, Tuple, cast

from conecert.errors.base import ConecertError


class StageError(ConecertError):
    """A pipeline stage failed.

    Wraps the original error and records which stage raised it, so that the
    command line can name the stage in its diagnostic.

    """

    def __init__(self, stage_name: str, cause: ConecertError):
        """Initialize a StageError instance.

        Args:
            stage_name: The name of the failing stage, eg. 'enclose'.
            cause: The error raised by the stage.

        """
        super().__init__(f'stage {stage_name} failed: {cause}',
                         {**cause.context, 'stage': stage_name})
        self._stage_name = stage_name
        self._cause = cause

    @property
    def stage_name(self) -> str:
        """Get the name of the failing stage."""
        return self._stage_name

    @property
    def cause(self) -> ConecertError:
        """Get the original error."""
        return self._cause

    @property
    def cube(self) -> Optional[Tuple[int, ...]]:
        """Get the escaping cube if the stage failed on enclosure."""
        return cast(Optional[Tuple[int, ...]], self.context.get('cube'))
