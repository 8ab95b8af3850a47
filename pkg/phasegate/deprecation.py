"""Internal support for handling deprecations.

The version-specific objects in this module are not considered stable between
releases, and may be removed at any point. The base objects are considered
stable.

Version Added:
    1.1
"""

from housekeeping import BasePendingRemovalWarning, BaseRemovedInWarning


class PendingRemovalInPhasegateWarning(BasePendingRemovalWarning):
    product = 'Phasegate'


class BaseRemovedInPhasegateWarning(BaseRemovedInWarning):
    product = 'Phasegate'


class RemovedInPhasegate20Warning(BaseRemovedInPhasegateWarning):
    version = '2.0'
