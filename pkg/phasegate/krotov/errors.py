"""Error classes for Krotov optimization.

Version Added:
    1.0
"""

from __future__ import annotations

from typing import Optional

from phasegate.errors import NumericalError


class OptimizationError(NumericalError):
    """Base class for optimization failures.

    Version Added:
        1.0
    """

    default_message = 'the optimization failed.'


class MonotonicityError(OptimizationError):
    """The functional increased between two iterations.

    This signals a bug or a time step that is too coarse for the field.

    Version Added:
        1.0
    """

    default_message = 'the functional increased between iterations.'

    ######################
    # Instance variables #
    ######################

    #: The iteration where the increase happened.
    #:
    #: Type:
    #:     int
    iteration: Optional[int]

    #: The functional value before the iteration.
    #:
    #: Type:
    #:     float
    previous: Optional[float]

    #: The functional value after the iteration.
    #:
    #: Type:
    #:     float
    current: Optional[float]

    def __init__(
        self,
        message: Optional[str] = None,
        *,
        iteration: Optional[int] = None,
        previous: Optional[float] = None,
        current: Optional[float] = None,
    ) -> None:
        """Initialize the error.

        Args:
            message (str, optional):
                The error message.

            iteration (int, optional):
                The iteration where the increase happened.

            previous (float, optional):
                The functional value before the iteration.

            current (float, optional):
                The functional value after the iteration.
        """
        if message is None and iteration is not None:
            message = ('the functional increased from %.15g to %.15g in '
                       'iteration %d.' % (previous, current, iteration))

        super().__init__(message)

        self.iteration = iteration
        self.previous = previous
        self.current = current


class FidelityNaNError(OptimizationError):
    """The fidelity evaluated to NaN.

    Version Added:
        1.0
    """

    default_message = 'the fidelity evaluated to NaN.'
