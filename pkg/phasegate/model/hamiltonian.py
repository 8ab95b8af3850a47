"""Wave states and the field-dependent Hamiltonian action.

States of all basis channels are packed into flat complex vectors so a
batch of basis states can be propagated as one array. The packed layout
is the grid amplitudes of each channel in channel order, followed by the
amplitudes of the grid-free levels.

Version Added:
    1.0
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Dict, Sequence

import numpy as np

from phasegate.grid.grid import SpatialGrid, apply_kinetic
from phasegate.model.channels import ChannelSystem
from phasegate.model.errors import ModelError


logger = logging.getLogger(__name__)


@dataclass
class WaveState:
    """The state of one propagated basis state.

    Version Added:
        1.0
    """

    #: The grid amplitudes of each channel, shaped ``(channels, points)``.
    #:
    #: Type:
    #:     numpy.ndarray
    amplitudes: np.ndarray

    #: The amplitudes of the grid-free levels.
    #:
    #: Type:
    #:     numpy.ndarray
    levels: np.ndarray

    #: The time the state refers to, in atomic units.
    #:
    #: Type:
    #:     float
    time_tag: float = 0.0

    @classmethod
    def zeros(
        cls,
        system: ChannelSystem,
        grid: SpatialGrid,
        time_tag: float = 0.0,
    ) -> WaveState:
        """Return an all-zero state for a system.

        Args:
            system (phasegate.model.channels.ChannelSystem):
                The system.

            grid (phasegate.grid.grid.SpatialGrid):
                The grid.

            time_tag (float, optional):
                The time of the state.

        Returns:
            WaveState:
            The new state.
        """
        return cls(amplitudes=np.zeros((system.n_channels, grid.n_points),
                                       dtype=complex),
                   levels=np.zeros(system.n_levels, dtype=complex),
                   time_tag=time_tag)

    def copy(self) -> WaveState:
        """Return a copy of this state.

        Returns:
            WaveState:
            The copy.
        """
        return WaveState(amplitudes=self.amplitudes.copy(),
                         levels=self.levels.copy(),
                         time_tag=self.time_tag)

    def scaled(
        self,
        factor: complex,
    ) -> WaveState:
        """Return this state multiplied by a factor.

        Args:
            factor (complex):
                The factor.

        Returns:
            WaveState:
            The scaled state.
        """
        return WaveState(amplitudes=self.amplitudes * factor,
                         levels=self.levels * factor,
                         time_tag=self.time_tag)

    def overlap(
        self,
        other: WaveState,
        grid: SpatialGrid,
    ) -> complex:
        """Return the inner product ``<self|other>``.

        Args:
            other (WaveState):
                The ket.

            grid (phasegate.grid.grid.SpatialGrid):
                The grid providing the quadrature weights.

        Returns:
            complex:
            The inner product.
        """
        return (complex(np.sum(grid.step_weights *
                               np.conj(self.amplitudes) *
                               other.amplitudes)) +
                complex(np.vdot(self.levels, other.levels)))

    def norm(
        self,
        grid: SpatialGrid,
    ) -> float:
        """Return the norm over all channels and levels.

        Args:
            grid (phasegate.grid.grid.SpatialGrid):
                The grid providing the quadrature weights.

        Returns:
            float:
            The norm.
        """
        return math.sqrt(self.overlap(self, grid).real)


class GridHamiltonian:
    """The Hamiltonian of a channel system on a grid.

    Potentials are evaluated once on construction. All methods accept
    packed vectors with any number of leading batch axes.

    Version Added:
        1.0
    """

    ######################
    # Instance variables #
    ######################

    #: The dipole matrix between grid channels.
    #:
    #: Type:
    #:     numpy.ndarray
    coupling: np.ndarray

    #: The grid.
    #:
    #: Type:
    #:     phasegate.grid.grid.SpatialGrid
    grid: SpatialGrid

    #: The field-free Hamiltonian of the grid-free levels.
    #:
    #: Type:
    #:     numpy.ndarray
    level_energies: np.ndarray

    #: The dipole matrix of the grid-free levels.
    #:
    #: Type:
    #:     numpy.ndarray
    level_dipole: np.ndarray

    #: The total potential of each channel at each grid point.
    #:
    #: Type:
    #:     numpy.ndarray
    potentials: np.ndarray

    #: The channel system.
    #:
    #: Type:
    #:     phasegate.model.channels.ChannelSystem
    system: ChannelSystem

    #: The quadrature weight of each packed vector entry.
    #:
    #: Type:
    #:     numpy.ndarray
    weights: np.ndarray

    def __init__(
        self,
        system: ChannelSystem,
        grid: SpatialGrid,
    ) -> None:
        """Initialize the Hamiltonian.

        Args:
            system (phasegate.model.channels.ChannelSystem):
                The channel system.

            grid (phasegate.grid.grid.SpatialGrid):
                The grid.
        """
        self.system = system
        self.grid = grid
        self.potentials = np.array([
            channel.total_potential(grid.points)
            for channel in system.channels
        ])
        self.coupling = system.coupling_matrix()
        self.level_energies, self.level_dipole = system.level_hamiltonian()
        self.weights = np.concatenate([
            np.tile(grid.step_weights, system.n_channels),
            np.ones(system.n_levels),
        ])

        self._grid_size = system.n_channels * grid.n_points

    @property
    def dimension(self) -> int:
        """The length of a packed state vector."""
        return self._grid_size + self.system.n_levels

    def pack(
        self,
        state: WaveState,
    ) -> np.ndarray:
        """Pack a state into a flat vector.

        Args:
            state (WaveState):
                The state.

        Returns:
            numpy.ndarray:
            The packed vector.

        Raises:
            phasegate.model.errors.ModelError:
                The state doesn't match the system.
        """
        expected = (self.system.n_channels, self.grid.n_points)

        if (state.amplitudes.shape != expected or
            state.levels.shape != (self.system.n_levels,)):
            raise ModelError(
                'state with %s channel amplitudes and %d levels does not '
                'match the %s system (%s, %d).'
                % (state.amplitudes.shape, len(state.levels),
                   self.system.mode.value, expected,
                   self.system.n_levels))

        return np.concatenate([state.amplitudes.ravel(),
                               state.levels]).astype(complex)

    def pack_many(
        self,
        states: Sequence[WaveState],
    ) -> np.ndarray:
        """Pack several states into a ``(states, dimension)`` array.

        Args:
            states (list of WaveState):
                The states.

        Returns:
            numpy.ndarray:
            The packed batch.
        """
        return np.stack([self.pack(state) for state in states])

    def unpack(
        self,
        vector: np.ndarray,
        time_tag: float = 0.0,
    ) -> WaveState:
        """Unpack a flat vector into a state.

        Args:
            vector (numpy.ndarray):
                The packed vector.

            time_tag (float, optional):
                The time of the state.

        Returns:
            WaveState:
            The state.
        """
        return WaveState(
            amplitudes=vector[:self._grid_size].reshape(
                self.system.n_channels, self.grid.n_points).copy(),
            levels=vector[self._grid_size:].copy(),
            time_tag=time_tag)

    def _split(self, vector):
        batch = vector.shape[:-1]

        return (vector[..., :self._grid_size].reshape(
                    batch + (self.system.n_channels, self.grid.n_points)),
                vector[..., self._grid_size:])

    def _join(self, grid_part, level_part):
        batch = level_part.shape[:-1]

        return np.concatenate(
            [grid_part.reshape(batch + (self._grid_size,)), level_part],
            axis=-1)

    def apply(
        self,
        vector: np.ndarray,
        field_value: float = 0.0,
    ) -> np.ndarray:
        """Apply the Hamiltonian at a given field amplitude.

        Args:
            vector (numpy.ndarray):
                Packed state vectors.

            field_value (float, optional):
                The instantaneous field amplitude.

        Returns:
            numpy.ndarray:
            The Hamiltonian applied to the vectors.
        """
        grid_part, level_part = self._split(vector)
        out_grid = (apply_kinetic(self.grid, grid_part) +
                    self.potentials * grid_part)
        level_matrix = self.level_energies

        if field_value:
            out_grid = out_grid + field_value * (self.coupling @ grid_part)
            level_matrix = level_matrix + field_value * self.level_dipole

        return self._join(out_grid, level_part @ level_matrix.T)

    def apply_dipole(
        self,
        vector: np.ndarray,
    ) -> np.ndarray:
        """Apply the dipole operator.

        Args:
            vector (numpy.ndarray):
                Packed state vectors.

        Returns:
            numpy.ndarray:
            The dipole operator applied to the vectors.
        """
        grid_part, level_part = self._split(vector)

        return self._join(self.coupling @ grid_part,
                          level_part @ self.level_dipole.T)

    def inner(
        self,
        bra: np.ndarray,
        ket: np.ndarray,
    ) -> np.ndarray:
        """Return weighted inner products along the last axis.

        Args:
            bra (numpy.ndarray):
                Packed vectors to conjugate.

            ket (numpy.ndarray):
                Packed vectors.

        Returns:
            numpy.ndarray or complex:
            The inner products, one per batch entry.
        """
        return np.sum(self.weights * np.conj(bra) * ket, axis=-1)

    def norms(
        self,
        vector: np.ndarray,
    ) -> np.ndarray:
        """Return weighted norms along the last axis.

        Args:
            vector (numpy.ndarray):
                Packed vectors.

        Returns:
            numpy.ndarray or float:
            The norms.
        """
        return np.sqrt(np.sum(self.weights * np.abs(vector) ** 2, axis=-1))

    def dense_matrix(
        self,
        field_value: float = 0.0,
    ) -> np.ndarray:
        """Return the Hamiltonian as a dense matrix on packed vectors.

        This is only practical for small grids.

        Args:
            field_value (float, optional):
                The field amplitude.

        Returns:
            numpy.ndarray:
            The ``(dimension, dimension)`` matrix.
        """
        identity = np.eye(self.dimension, dtype=complex)

        return self.apply(identity, field_value).T


def apply_hamiltonian(
    system: ChannelSystem,
    grid: SpatialGrid,
    state: WaveState,
    field_value: float,
) -> WaveState:
    """Apply the Hamiltonian of a system to a state.

    The field enters as ``+field_value * mu`` between coupled channels and
    between the levels of the two-level atom.

    Args:
        system (phasegate.model.channels.ChannelSystem):
            The channel system.

        grid (phasegate.grid.grid.SpatialGrid):
            The grid.

        state (WaveState):
            The state.

        field_value (float):
            The field amplitude.

    Returns:
        WaveState:
        The Hamiltonian applied to the state.

    Raises:
        phasegate.model.errors.ModelError:
            The state doesn't match the system.
    """
    hamiltonian = GridHamiltonian(system, grid)

    return hamiltonian.unpack(
        hamiltonian.apply(hamiltonian.pack(state), field_value),
        time_tag=state.time_tag)


def channel_populations(
    system: ChannelSystem,
    state: WaveState,
    grid: SpatialGrid,
) -> Dict[str, float]:
    """Return the population of each channel and level.

    Args:
        system (phasegate.model.channels.ChannelSystem):
            The channel system.

        state (WaveState):
            The state.

        grid (phasegate.grid.grid.SpatialGrid):
            The grid.

    Returns:
        dict:
        A mapping of channel keys (``00``, ``0a``, ...) and level labels
        (``0``, ``a``) to populations.
    """
    populations = np.sum(grid.step_weights * np.abs(state.amplitudes) ** 2,
                         axis=-1)
    result = {
        label.key: float(population)
        for label, population in zip(system.labels, populations)
    }
    result.update(
        (level, float(abs(amplitude) ** 2))
        for level, amplitude in zip(system.levels, state.levels)
    )

    return result
