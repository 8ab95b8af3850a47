"""Error classes for propagation.

Version Added:
    1.0
"""

from __future__ import annotations

from typing import Optional

from phasegate.errors import NumericalError


class PropagationError(NumericalError):
    """Base class for propagation failures.

    Version Added:
        1.0
    """

    default_message = 'propagation failed.'


class ChebychevConvergenceError(PropagationError):
    """The Chebychev series didn't converge within its maximum order.

    This usually means the spectral range was underestimated or the time
    step is too large.

    Version Added:
        1.0
    """

    default_message = 'the Chebychev series did not converge.'

    ######################
    # Instance variables #
    ######################

    #: The maximum series order that was allowed.
    #:
    #: Type:
    #:     int
    max_order: Optional[int]

    def __init__(
        self,
        message: Optional[str] = None,
        *,
        max_order: Optional[int] = None,
    ) -> None:
        """Initialize the error.

        Args:
            message (str, optional):
                The error message.

            max_order (int, optional):
                The maximum series order that was allowed.
        """
        if message is None and max_order is not None:
            message = ('the Chebychev series did not converge within %d '
                       'orders.' % max_order)

        super().__init__(message)

        self.max_order = max_order


class UnitarityLossError(PropagationError):
    """The norm of a propagated state drifted out of tolerance.

    Version Added:
        1.0
    """

    default_message = 'the propagated state lost its norm.'

    ######################
    # Instance variables #
    ######################

    #: The norm that was reached.
    #:
    #: Type:
    #:     float
    norm: Optional[float]

    #: The time at which the norm was checked.
    #:
    #: Type:
    #:     float
    time: Optional[float]

    def __init__(
        self,
        message: Optional[str] = None,
        *,
        norm: Optional[float] = None,
        time: Optional[float] = None,
    ) -> None:
        """Initialize the error.

        Args:
            message (str, optional):
                The error message.

            norm (float, optional):
                The norm that was reached.

            time (float, optional):
                The time at which the norm was checked.
        """
        if message is None and norm is not None:
            message = ('the propagated norm drifted to %.12f at t = %g.'
                       % (norm, time or 0.0))

        super().__init__(message)

        self.norm = norm
        self.time = time
