"""Base error classes for Phasegate.

Version Added:
    1.0
"""

from __future__ import annotations

from typing import ClassVar, Optional


class PhasegateError(Exception):
    """Base class for all errors raised by Phasegate.

    Subclasses provide a :py:attr:`default_message`, which is used when the
    error is raised without an explicit message.

    Version Added:
        1.0
    """

    #: The message used when no explicit message is provided.
    #:
    #: Type:
    #:     str
    default_message: ClassVar[str] = 'an unexpected error occurred.'

    def __init__(
        self,
        message: Optional[str] = None,
    ) -> None:
        """Initialize the error.

        Args:
            message (str, optional):
                An explicit error message. This should start lowercase and
                end with a period.

                If not provided, :py:attr:`default_message` is used.
        """
        super().__init__(message or self.default_message)


class NumericalError(PhasegateError):
    """Base class for errors that abort a numerical run.

    The command line front end maps these to exit code 3.

    Version Added:
        1.0
    """

    default_message = 'the numerical run was aborted.'
