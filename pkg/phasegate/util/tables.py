"""Reading and writing CSV result tables.

Every table may start with ``#`` comment lines carrying provenance, such
as the config hash. Floats are written with their shortest round-trip
representation, so tables written from identical data are byte-identical.

Version Added:
    1.0
"""

from __future__ import annotations

import csv
import logging
import os
from typing import Any, Iterable, List, Optional, Sequence, Tuple

from phasegate.errors import PhasegateError


logger = logging.getLogger(__name__)


class TableError(PhasegateError):
    """A result table could not be read.

    Version Added:
        1.0
    """

    default_message = 'the table could not be read.'


def _format_cell(value: Any) -> str:
    if isinstance(value, bool):
        return str(value).lower()
    elif isinstance(value, float):
        return repr(value)
    elif hasattr(value, 'item') and not isinstance(value, str):
        # numpy scalars.
        return _format_cell(value.item())

    return str(value)


def write_table(
    path: str,
    header: Sequence[str],
    rows: Iterable[Sequence[Any]],
    *,
    comments: Sequence[str] = (),
) -> None:
    """Write a CSV table.

    Args:
        path (str):
            The path to write to. Parent directories are created.

        header (list of str):
            The column names.

        rows (iterable of list):
            The rows to write.

        comments (list of str, optional):
            Comment lines written before the header, without the leading
            ``#``.
    """
    dirname = os.path.dirname(path)

    if dirname:
        os.makedirs(dirname, exist_ok=True)

    with open(path, 'w', newline='') as fp:
        for comment in comments:
            fp.write('# %s\n' % comment)

        writer = csv.writer(fp, lineterminator='\n')
        writer.writerow(header)

        for row in rows:
            writer.writerow([_format_cell(value) for value in row])

    logger.debug('Wrote table %s', path)


def read_table(
    path: str,
) -> Tuple[List[str], List[List[str]], List[str]]:
    """Read a CSV table written by :py:func:`write_table`.

    Args:
        path (str):
            The path to read.

    Returns:
        tuple:
        A 3-tuple of the header, the rows (as strings) and the comment
        lines.

    Raises:
        TableError:
            The file is missing or has no header.
    """
    comments: List[str] = []
    lines: List[str] = []

    try:
        with open(path, newline='') as fp:
            for line in fp:
                if line.startswith('#') and not lines:
                    comments.append(line[1:].strip())
                else:
                    lines.append(line)
    except OSError as e:
        raise TableError('could not read table "%s": %s.' % (path, e))

    rows = list(csv.reader(lines))

    if not rows:
        raise TableError('table "%s" has no header.' % path)

    return rows[0], [row for row in rows[1:] if row], comments


def get_comment_value(
    comments: Sequence[str],
    key: str,
) -> Optional[str]:
    """Return the value of a ``key=value`` comment line.

    Args:
        comments (list of str):
            The comment lines returned by :py:func:`read_table`.

        key (str):
            The key to look up.

    Returns:
        str:
        The value, or ``None`` if the key isn't present.
    """
    prefix = '%s=' % key

    for comment in comments:
        if comment.startswith(prefix):
            return comment[len(prefix):]

    return None
