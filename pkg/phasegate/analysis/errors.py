"""Error classes for gate analysis.

Version Added:
    1.0
"""

from __future__ import annotations

from typing import Optional

from phasegate.errors import PhasegateError


class AnalysisError(PhasegateError):
    """Base class for analysis failures.

    Version Added:
        1.0
    """

    default_message = 'the gate analysis failed.'


class NormalizationError(AnalysisError):
    """A state passed to an analysis isn't normalized.

    Version Added:
        1.0
    """

    default_message = 'the state is not normalized.'


class PhaseUndefinedError(AnalysisError):
    """A gate phase can't be extracted from a vanishing overlap.

    Version Added:
        1.0
    """

    default_message = 'the gate phase is undefined.'

    ######################
    # Instance variables #
    ######################

    #: The basis state whose overlap vanished.
    #:
    #: Type:
    #:     str
    state: Optional[str]

    #: The modulus of the overlap.
    #:
    #: Type:
    #:     float
    modulus: Optional[float]

    def __init__(
        self,
        message: Optional[str] = None,
        *,
        state: Optional[str] = None,
        modulus: Optional[float] = None,
    ) -> None:
        """Initialize the error.

        Args:
            message (str, optional):
                The error message.

            state (str, optional):
                The basis state whose overlap vanished.

            modulus (float, optional):
                The modulus of the overlap.
        """
        if message is None and state is not None:
            message = ('the phase of |%s> is undefined: its overlap with '
                       'the initial state is only %g.' % (state, modulus))

        super().__init__(message)

        self.state = state
        self.modulus = modulus
