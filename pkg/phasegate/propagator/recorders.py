"""Recorders collecting observables during propagation.

Recorders are callables receiving ``(time, vectors)``, where ``vectors``
holds one packed state per propagated basis state.

Version Added:
    1.0
"""

from __future__ import annotations

import logging
from typing import List, Optional, Sequence

import numpy as np

from phasegate.grid.grid import boundary_population
from phasegate.model.hamiltonian import GridHamiltonian, WaveState
from phasegate.util.tables import (TableError,
                                   get_comment_value,
                                   read_table,
                                   write_table)
from phasegate.util.units import from_atomic


logger = logging.getLogger(__name__)


#: Edge population above which a warning is logged.
BOUNDARY_WARNING_THRESHOLD = 1e-6


class BaseRecorder:
    """Base class for recorders.

    Version Added:
        1.0
    """

    ######################
    # Instance variables #
    ######################

    #: The Hamiltonian used to interpret packed vectors.
    #:
    #: Type:
    #:     phasegate.model.hamiltonian.GridHamiltonian
    hamiltonian: GridHamiltonian

    #: The recorded times, in atomic units.
    #:
    #: Type:
    #:     list of float
    times: List[float]

    def __init__(
        self,
        hamiltonian: GridHamiltonian,
    ) -> None:
        """Initialize the recorder.

        Args:
            hamiltonian (phasegate.model.hamiltonian.GridHamiltonian):
                The Hamiltonian used to interpret packed vectors.
        """
        self.hamiltonian = hamiltonian
        self.times = []

    def __call__(
        self,
        time: float,
        vectors: np.ndarray,
    ) -> None:
        """Record a snapshot.

        Args:
            time (float):
                The time of the snapshot.

            vectors (numpy.ndarray):
                The packed state vectors.
        """
        self.times.append(time)
        self.record(time, np.atleast_2d(vectors))

    def record(
        self,
        time: float,
        vectors: np.ndarray,
    ) -> None:
        """Record observables of a snapshot.

        Subclasses must override this.

        Args:
            time (float):
                The time of the snapshot.

            vectors (numpy.ndarray):
                The packed state vectors, shaped ``(states, dimension)``.
        """
        raise NotImplementedError

    def reset(self) -> None:
        """Discard everything recorded so far."""
        self.times = []


class TrajectoryRecorder(BaseRecorder):
    """Stores full snapshots of the propagated states.

    Version Added:
        1.0
    """

    def __init__(self, hamiltonian: GridHamiltonian) -> None:
        super().__init__(hamiltonian)
        self.snapshots: List[np.ndarray] = []

    def reset(self) -> None:
        super().reset()
        self.snapshots = []

    def record(self, time, vectors):
        self.snapshots.append(vectors.copy())

    def states(
        self,
        index: int,
    ) -> List[WaveState]:
        """Return the recorded trajectory of one basis state.

        Args:
            index (int):
                The index of the basis state.

        Returns:
            list of phasegate.model.hamiltonian.WaveState:
            The states at each recorded time.
        """
        return [
            self.hamiltonian.unpack(snapshot[index], time_tag=time)
            for time, snapshot in zip(self.times, self.snapshots)
        ]


class PopulationRecorder(BaseRecorder):
    """Records channel populations and norms.

    A warning is logged the first time any state reaches the grid edge.

    Version Added:
        1.0
    """

    ######################
    # Instance variables #
    ######################

    #: Populations per snapshot, shaped ``(states, channels + levels)``.
    #:
    #: Type:
    #:     list of numpy.ndarray
    populations: List[np.ndarray]

    #: Projection of each channel onto the reference motional state.
    #:
    #: Type:
    #:     list of numpy.ndarray
    projections: List[np.ndarray]

    def __init__(
        self,
        hamiltonian: GridHamiltonian,
        reference: Optional[np.ndarray] = None,
    ) -> None:
        """Initialize the recorder.

        Args:
            hamiltonian (phasegate.model.hamiltonian.GridHamiltonian):
                The Hamiltonian used to interpret packed vectors.

            reference (numpy.ndarray, optional):
                A motional state (usually the trap ground state) each
                channel is projected onto for the channel phase.
        """
        super().__init__(hamiltonian)

        self.reference = reference
        self.populations = []
        self.projections = []
        self._warned = False

    def reset(self) -> None:
        super().reset()
        self.populations = []
        self.projections = []

    def record(self, time, vectors):
        hamiltonian = self.hamiltonian
        grid = hamiltonian.grid
        system = hamiltonian.system
        n_grid = system.n_channels * grid.n_points
        amplitudes = vectors[:, :n_grid].reshape(
            len(vectors), system.n_channels, grid.n_points)
        levels = vectors[:, n_grid:]

        channel_pops = np.sum(grid.step_weights * np.abs(amplitudes) ** 2,
                              axis=-1)
        self.populations.append(
            np.concatenate([channel_pops, np.abs(levels) ** 2], axis=1))

        if self.reference is not None:
            self.projections.append(
                np.sum(grid.step_weights * np.conj(self.reference) *
                       amplitudes, axis=-1))

        if not self._warned and system.n_channels:
            edge = max(boundary_population(grid, a) for a in amplitudes)

            if edge > BOUNDARY_WARNING_THRESHOLD:
                logger.warning('Wavepacket population %g reached the grid '
                               'edge at t = %g; the grid may be too small.',
                               edge, time)
                self._warned = True

    @property
    def columns(self) -> List[str]:
        """The population column names, per channel then per level."""
        system = self.hamiltonian.system

        return ['pop_%s' % key
                for key in ([label.key for label in system.labels] +
                            list(system.levels))]

    def write_table(
        self,
        path: str,
        index: int,
        *,
        comments: Sequence[str] = (),
    ) -> None:
        """Write the population dynamics of one basis state.

        Columns are ``t_fs``, one ``pop_<channel>`` per channel and level,
        and ``norm``.

        Args:
            path (str):
                The path to write.

            index (int):
                The index of the basis state.

            comments (list of str, optional):
                Provenance comment lines.
        """
        write_table(
            path,
            ['t_fs'] + self.columns + ['norm'],
            ([from_atomic(time, 'fs')] + list(pops[index]) +
             [float(np.sqrt(pops[index].sum()))]
             for time, pops in zip(self.times, self.populations)),
            comments=comments)

    def write_channel_table(
        self,
        path: str,
        index: int,
        *,
        comments: Sequence[str] = (),
    ) -> None:
        """Write per-channel population and phase of one basis state.

        Columns are ``t_fs, channel, population, phase_rad``, where the
        phase is that of the channel's projection onto the reference
        motional state (0 if no reference was given).

        Args:
            path (str):
                The path to write.

            index (int):
                The index of the basis state.

            comments (list of str, optional):
                Provenance comment lines.
        """
        labels = [label.key for label in self.hamiltonian.system.labels]
        rows = []

        for i, (time, pops) in enumerate(zip(self.times, self.populations)):
            for c, label in enumerate(labels):
                if self.projections:
                    phase = float(np.angle(self.projections[i][index, c]))
                else:
                    phase = 0.0

                rows.append([from_atomic(time, 'fs'), label,
                             float(pops[index, c]), phase])

        write_table(path, ['t_fs', 'channel', 'population', 'phase_rad'],
                    rows, comments=comments)


class PhaseRecorder(BaseRecorder):
    """Records overlaps of each propagated state with a reference state.

    With the initial states as references, this gives the time-resolved
    :math:`\\tau_{ij}(t) = \\langle ij(R)|U(t, 0)|ij(R)\\rangle`.

    Version Added:
        1.0
    """

    def __init__(
        self,
        hamiltonian: GridHamiltonian,
        references: np.ndarray,
    ) -> None:
        """Initialize the recorder.

        Args:
            hamiltonian (phasegate.model.hamiltonian.GridHamiltonian):
                The Hamiltonian used to interpret packed vectors.

            references (numpy.ndarray):
                One packed reference vector per basis state.
        """
        super().__init__(hamiltonian)

        self.references = np.atleast_2d(references)
        self.overlaps: List[np.ndarray] = []

    def reset(self) -> None:
        super().reset()
        self.overlaps = []

    def record(self, time, vectors):
        self.overlaps.append(self.hamiltonian.inner(self.references,
                                                    vectors))

    def as_array(self) -> np.ndarray:
        """Return the overlaps as a ``(times, states)`` array.

        Returns:
            numpy.ndarray:
            The recorded overlaps.
        """
        return np.array(self.overlaps)


def save_checkpoint(
    path: str,
    state: WaveState,
    *,
    comments: Sequence[str] = (),
) -> None:
    """Save a state to a CSV checkpoint.

    The header comments record ``n_channels``, ``n_points``, ``n_levels``
    and ``time_tag``. Rows hold ``index, re, im`` of the grid amplitudes
    in channel order, followed by the level amplitudes.

    Args:
        path (str):
            The path to write.

        state (phasegate.model.hamiltonian.WaveState):
            The state.

        comments (list of str, optional):
            Extra provenance comment lines.
    """
    n_channels, n_points = state.amplitudes.shape
    values = np.concatenate([state.amplitudes.ravel(), state.levels])

    write_table(
        path,
        ['index', 're', 'im'],
        ([i, float(value.real), float(value.imag)]
         for i, value in enumerate(values)),
        comments=list(comments) + [
            'n_channels=%d' % n_channels,
            'n_points=%d' % n_points,
            'n_levels=%d' % len(state.levels),
            'time_tag=%r' % float(state.time_tag),
        ])


def load_checkpoint(
    path: str,
) -> WaveState:
    """Load a state saved by :py:func:`save_checkpoint`.

    Args:
        path (str):
            The path to read.

    Returns:
        phasegate.model.hamiltonian.WaveState:
        The state.

    Raises:
        phasegate.util.tables.TableError:
            The file couldn't be read or is incomplete.
    """
    _header, rows, comments = read_table(path)

    try:
        n_channels = int(get_comment_value(comments, 'n_channels'))
        n_points = int(get_comment_value(comments, 'n_points'))
        n_levels = int(get_comment_value(comments, 'n_levels'))
        time_tag = float(get_comment_value(comments, 'time_tag'))
    except (TypeError, ValueError):
        raise TableError('checkpoint "%s" is missing its layout header.'
                         % path)

    values = np.array([complex(float(row[1]), float(row[2]))
                       for row in rows])

    if len(values) != n_channels * n_points + n_levels:
        raise TableError('checkpoint "%s" has %d values, expected %d.'
                         % (path, len(values),
                            n_channels * n_points + n_levels))

    return WaveState(
        amplitudes=values[:n_channels * n_points].reshape(n_channels,
                                                          n_points),
        levels=values[n_channels * n_points:],
        time_tag=time_tag)
