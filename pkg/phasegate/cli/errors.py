"""Error classes for the command line front end.

Version Added:
    1.0
"""

from __future__ import annotations

from typing import Optional

from phasegate.errors import PhasegateError


class ConfigError(PhasegateError):
    """An experiment configuration is invalid.

    Version Added:
        1.0
    """

    default_message = 'the experiment configuration is invalid.'

    ######################
    # Instance variables #
    ######################

    #: The dotted configuration key at fault, if known.
    #:
    #: Type:
    #:     str
    key: Optional[str]

    def __init__(
        self,
        message: Optional[str] = None,
        *,
        key: Optional[str] = None,
    ) -> None:
        """Initialize the error.

        Args:
            message (str, optional):
                The error message.

            key (str, optional):
                The dotted configuration key at fault.
        """
        if message is not None and key is not None:
            message = '%s: %s' % (key, message)

        super().__init__(message)

        self.key = key
