"""Phasegate version and package information.

Version Added:
    1.0
"""

from __future__ import annotations

from typing import Tuple, Union


#: The version of Phasegate.
#:
#: This is in the format of:
#:
#: (Major, Minor, Micro, Patch, alpha/beta/rc/final, Release Number, Released)
#:
VERSION: Tuple[Union[int, str, bool], ...] = \
    (1, 1, 0, 0, 'alpha', 0, False)


def _get_numeric_version() -> str:
    major, minor, micro, patch = VERSION[:4]
    parts = [major, minor]

    if micro or patch:
        parts.append(micro)

    if patch:
        parts.append(patch)

    return '.'.join(str(part) for part in parts)


def get_version_string() -> str:
    """Return the version as a human-readable string.

    Returns:
        str:
        The version, such as ``1.1 alpha 0 (dev)``.
    """
    version = _get_numeric_version()
    tag, tag_number = VERSION[4:6]

    if tag == 'rc':
        version += ' RC%s' % tag_number
    elif tag != 'final':
        version += ' %s %s' % (tag, tag_number)

    if not is_release():
        version += ' (dev)'

    return version


def get_package_version() -> str:
    """Return the version as a Python package version string.

    Returns:
        str:
        The version, such as ``1.1alpha0``.
    """
    version = _get_numeric_version()
    tag, tag_number = VERSION[4:6]

    if tag != 'final':
        version += '%s%s' % (tag, tag_number)

    return version


def is_release() -> bool:
    """Return whether this is a released version.

    Returns:
        bool:
        ``True`` for a released version.
    """
    return bool(VERSION[6])


#: The version without the released flag.
__version_info__ = VERSION[:-1]

#: The version used for the Python package.
__version__ = get_package_version()
