"""Error classes for spatial grids.

Version Added:
    1.0
"""

from __future__ import annotations

from typing import Optional

from phasegate.errors import NumericalError


class GridError(NumericalError):
    """A grid could not be built or used.

    This covers invalid grid specifications, mapped grids that can't fit
    the requested number of points, and amplitude arrays of the wrong
    length.

    Version Added:
        1.0
    """

    default_message = 'the spatial grid is invalid.'


class EigensolverError(GridError):
    """The dense eigensolve of a grid Hamiltonian failed.

    Version Added:
        1.0
    """

    default_message = 'the bound-state eigensolve did not converge.'

    ######################
    # Instance variables #
    ######################

    #: The number of eigenpairs requested.
    #:
    #: Type:
    #:     int
    count: Optional[int]

    def __init__(
        self,
        message: Optional[str] = None,
        *,
        count: Optional[int] = None,
    ) -> None:
        """Initialize the error.

        Args:
            message (str, optional):
                The error message.

            count (int, optional):
                The number of eigenpairs requested.
        """
        super().__init__(message)

        self.count = count
