"""Error classes for channel models.

Version Added:
    1.0
"""

from phasegate.errors import NumericalError


class ModelError(NumericalError):
    """A channel system is invalid or doesn't match a state.

    Version Added:
        1.0
    """

    default_message = 'the channel model is invalid.'
