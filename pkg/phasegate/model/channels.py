"""Electronic channels, potentials and dipole couplings.

Each atom is in one of the single-atom levels ``0``, ``1`` (the qubit) or
``a`` (the auxiliary excited level). A two-atom channel is a pair of these
labels. The laser couples ``0`` and ``a``; level ``1`` is off resonance, so
the ``|11>`` channel is never propagated and the ``|01>``/``|10>`` blocks
evolve independently of ``|00>``.

Version Added:
    1.0
"""

from __future__ import annotations

import enum
import itertools
import logging
from dataclasses import dataclass, field
from typing import (Dict, FrozenSet, List, Optional, Sequence, Tuple)

import numpy as np
from scipy.interpolate import CubicSpline

from phasegate.model.errors import ModelError


logger = logging.getLogger(__name__)


#: The single-atom levels, in order of the channel layout.
SINGLE_ATOM_LEVELS = ('0', 'a', '1')

#: The single-atom transitions driven by the laser.
DEFAULT_TRANSITIONS: FrozenSet[FrozenSet[str]] = frozenset({
    frozenset({'0', 'a'}),
})


@dataclass(frozen=True, order=True)
class ChannelLabel:
    """A two-atom electronic channel, such as ``|0a>``.

    Version Added:
        1.0
    """

    #: The level of the first atom.
    #:
    #: Type:
    #:     str
    first: str

    #: The level of the second atom.
    #:
    #: Type:
    #:     str
    second: str

    def __post_init__(self) -> None:
        for level in (self.first, self.second):
            if level not in SINGLE_ATOM_LEVELS:
                raise ModelError('unknown single-atom level "%s".' % level)

    @classmethod
    def parse(
        cls,
        key: str,
    ) -> ChannelLabel:
        """Parse a label like ``0a`` or ``|0a>``.

        Args:
            key (str):
                The label text.

        Returns:
            ChannelLabel:
            The parsed label.

        Raises:
            phasegate.model.errors.ModelError:
                The label is malformed.
        """
        key = key.strip('|> ')

        if len(key) != 2:
            raise ModelError('"%s" is not a two-atom channel label.' % key)

        return cls(key[0], key[1])

    @property
    def key(self) -> str:
        """The compact label, such as ``0a``."""
        return '%s%s' % (self.first, self.second)

    def transition_to(
        self,
        other: ChannelLabel,
    ) -> Optional[FrozenSet[str]]:
        """Return the single-atom transition linking two channels.

        Args:
            other (ChannelLabel):
                The other channel.

        Returns:
            frozenset:
            The pair of single-atom levels that differ, or ``None`` if the
            channels don't differ in exactly one atom.
        """
        if self.first == other.first and self.second != other.second:
            return frozenset({self.second, other.second})
        elif self.second == other.second and self.first != other.first:
            return frozenset({self.first, other.first})

        return None

    def __str__(self) -> str:
        return '|%s>' % self.key


class PotentialKind(enum.Enum):
    """The functional form of a potential.

    Version Added:
        1.0
    """

    ZERO = 'zero'
    HARMONIC = 'harmonic'
    INVERSE_CUBE = 'inverse_cube'
    TABULATED = 'tabulated'


@dataclass(frozen=True, eq=False)
class PotentialModel:
    """A potential energy curve along the interatomic coordinate.

    Use :py:func:`zero_potential`, :py:func:`harmonic_potential`,
    :py:func:`inverse_cube_potential` or :py:func:`tabulated_potential`
    to construct one.

    Version Added:
        1.0
    """

    #: The functional form.
    #:
    #: Type:
    #:     PotentialKind
    kind: PotentialKind

    #: The energy of the channel at large distance, in hartree.
    #:
    #: Type:
    #:     float
    asymptotic_energy: float = 0.0

    #: Parameters of the functional form.
    #:
    #: Harmonic potentials use ``mass``, ``omega`` and ``center``. Inverse
    #: cube potentials use ``c3`` and ``sign``.
    #:
    #: Type:
    #:     dict
    parameters: Dict[str, float] = field(default_factory=dict)

    #: The interpolating spline of a tabulated potential.
    #:
    #: Type:
    #:     scipy.interpolate.CubicSpline
    spline: Optional[CubicSpline] = None

    def __call__(
        self,
        r: np.ndarray,
    ) -> np.ndarray:
        """Evaluate the potential.

        Args:
            r (numpy.ndarray):
                The positions, in bohr.

        Returns:
            numpy.ndarray:
            The potential, including the asymptotic energy, in hartree.
        """
        r = np.asarray(r, dtype=float)
        kind = self.kind

        if kind is PotentialKind.ZERO:
            values = np.zeros_like(r)
        elif kind is PotentialKind.HARMONIC:
            p = self.parameters
            values = (0.5 * p['mass'] * p['omega'] ** 2 *
                      (r - p['center']) ** 2)
        elif kind is PotentialKind.INVERSE_CUBE:
            if np.any(r <= 0.0):
                raise ModelError('inverse cube potentials are singular at '
                                 'R <= 0.')

            p = self.parameters
            values = p['sign'] * p['c3'] / r ** 3
        else:
            assert self.spline is not None
            values = self.spline(r)

        return values + self.asymptotic_energy


def zero_potential(
    asymptotic_energy: float = 0.0,
) -> PotentialModel:
    """Return a flat potential.

    Args:
        asymptotic_energy (float, optional):
            The constant energy of the channel.

    Returns:
        PotentialModel:
        The potential.
    """
    return PotentialModel(kind=PotentialKind.ZERO,
                          asymptotic_energy=asymptotic_energy)


def harmonic_potential(
    mass: float,
    omega: float,
    center: float,
) -> PotentialModel:
    """Return a displaced harmonic trap.

    Args:
        mass (float):
            The mass of the relative motion.

        omega (float):
            The angular trap frequency.

        center (float):
            The trap minimum, in bohr.

    Returns:
        PotentialModel:
        The potential.
    """
    return PotentialModel(kind=PotentialKind.HARMONIC,
                          parameters={
                              'mass': mass,
                              'omega': omega,
                              'center': center,
                          })


def inverse_cube_potential(
    c3: float,
    *,
    sign: int = -1,
    asymptotic_energy: float = 0.0,
) -> PotentialModel:
    """Return a resonant dipole-dipole potential ``sign * C3 / R^3``.

    Args:
        c3 (float):
            The C3 coefficient, in atomic units.

        sign (int, optional):
            ``-1`` for an attractive curve, ``+1`` for a repulsive one.

        asymptotic_energy (float, optional):
            The channel energy at large distance.

    Returns:
        PotentialModel:
        The potential.
    """
    if sign not in (-1, 1):
        raise ModelError('the inverse cube sign must be -1 or 1.')

    return PotentialModel(kind=PotentialKind.INVERSE_CUBE,
                          asymptotic_energy=asymptotic_energy,
                          parameters={
                              'c3': c3,
                              'sign': float(sign),
                          })


def tabulated_potential(
    r: Sequence[float],
    values: Sequence[float],
    *,
    asymptotic_energy: float = 0.0,
) -> PotentialModel:
    """Return a potential interpolated from tabulated values.

    Args:
        r (list of float):
            The strictly increasing positions, in bohr.

        values (list of float):
            The potential at those positions, relative to the asymptote.

        asymptotic_energy (float, optional):
            The channel energy at large distance.

    Returns:
        PotentialModel:
        The potential.
    """
    try:
        spline = CubicSpline(np.asarray(r, dtype=float),
                             np.asarray(values, dtype=float))
    except ValueError as e:
        raise ModelError('invalid tabulated potential: %s.' % e)

    return PotentialModel(kind=PotentialKind.TABULATED,
                          asymptotic_energy=asymptotic_energy,
                          spline=spline)


class SystemMode(enum.Enum):
    """The channel layout of a system.

    Version Added:
        1.0
    """

    #: All eight propagated channels on the grid.
    FULL8 = 'full8'

    #: Four grid channels plus a grid-free two-level atom.
    REDUCED = 'reduced4plus2'


@dataclass(frozen=True)
class SystemParams:
    """Physical parameters of a two-atom system, in atomic units.

    Version Added:
        1.0
    """

    #: The energy of the qubit level ``1``.
    #:
    #: Type:
    #:     float
    e1: float

    #: The energy of the auxiliary level ``a``.
    #:
    #: Type:
    #:     float
    e_a: float

    #: The reduced mass of the atom pair.
    #:
    #: Type:
    #:     float
    mass: float

    #: The angular trap frequency.
    #:
    #: Type:
    #:     float
    omega: float

    #: The distance between the traps.
    #:
    #: Type:
    #:     float
    d: float

    #: The C3 coefficient of the excited-state interaction.
    #:
    #: Type:
    #:     float
    c3: float

    #: The transition dipole of the ``0 <-> a`` line.
    #:
    #: Type:
    #:     float
    mu0: float

    def validate(self) -> None:
        """Validate the parameters.

        Raises:
            phasegate.model.errors.ModelError:
                A parameter is out of range.
        """
        if self.omega <= 0:
            raise ModelError('the trap frequency must be positive.')

        if self.c3 < 0:
            raise ModelError('C3 must not be negative.')

        if self.e_a <= self.e1:
            raise ModelError('E_a (%r) must exceed E_1 (%r).'
                             % (self.e_a, self.e1))

        if self.mass <= 0:
            raise ModelError('the mass must be positive.')

        if self.d <= 0:
            raise ModelError('the trap distance must be positive.')

    @property
    def interaction_energy(self) -> float:
        """The excited-state interaction energy ``C3 / d^3``."""
        return self.c3 / self.d ** 3

    def level_energy(
        self,
        level: str,
    ) -> float:
        """Return the energy of a single-atom level.

        Args:
            level (str):
                The level label.

        Returns:
            float:
            The energy.
        """
        return {
            '0': 0.0,
            '1': self.e1,
            'a': self.e_a,
        }[level]


@dataclass(frozen=True)
class Channel:
    """A propagated channel with its potentials.

    Version Added:
        1.0
    """

    #: The channel label.
    #:
    #: Type:
    #:     ChannelLabel
    label: ChannelLabel

    #: The interaction potential, including the asymptotic energy.
    #:
    #: Type:
    #:     PotentialModel
    potential: PotentialModel

    #: The trap potential.
    #:
    #: Type:
    #:     PotentialModel
    trap: PotentialModel

    def total_potential(
        self,
        r: np.ndarray,
    ) -> np.ndarray:
        """Return the interaction plus trap potential.

        Args:
            r (numpy.ndarray):
                The positions.

        Returns:
            numpy.ndarray:
            The potential, in hartree.
        """
        return self.potential(r) + self.trap(r)


@dataclass(frozen=True)
class DipoleCoupling:
    """A laser coupling between two channels.

    Version Added:
        1.0
    """

    #: The index of the first channel.
    #:
    #: Type:
    #:     int
    first: int

    #: The index of the second channel.
    #:
    #: Type:
    #:     int
    second: int

    #: The transition dipole, constant in R.
    #:
    #: Type:
    #:     float
    strength: float


@dataclass(frozen=True)
class ChannelSystem:
    """A set of field-coupled electronic channels.

    Version Added:
        1.0
    """

    #: The grid-bearing channels.
    #:
    #: Type:
    #:     tuple of Channel
    channels: Tuple[Channel, ...]

    #: The dipole couplings between grid channels. Each unordered pair
    #: appears once; :py:meth:`coupling_matrix` symmetrizes them.
    #:
    #: Type:
    #:     tuple of DipoleCoupling
    couplings: Tuple[DipoleCoupling, ...]

    #: The channel layout.
    #:
    #: Type:
    #:     SystemMode
    mode: SystemMode

    #: The physical parameters the system was built from.
    #:
    #: Type:
    #:     SystemParams
    params: SystemParams

    #: The levels of the grid-free two-level atom, if any.
    #:
    #: Type:
    #:     tuple of str
    levels: Tuple[str, ...] = ()

    @property
    def labels(self) -> List[ChannelLabel]:
        """The labels of the grid channels, in order."""
        return [channel.label for channel in self.channels]

    @property
    def n_channels(self) -> int:
        """The number of grid channels."""
        return len(self.channels)

    @property
    def n_levels(self) -> int:
        """The number of grid-free levels."""
        return len(self.levels)

    def index_of(
        self,
        label: ChannelLabel,
    ) -> int:
        """Return the index of a channel.

        Args:
            label (ChannelLabel):
                The channel label.

        Returns:
            int:
            The index.

        Raises:
            phasegate.model.errors.ModelError:
                The channel isn't part of the system.
        """
        try:
            return self.labels.index(label)
        except ValueError:
            raise ModelError('channel %s is not part of this %s system.'
                             % (label, self.mode.value))

    def coupling_matrix(self) -> np.ndarray:
        """Return the symmetric matrix of channel dipoles.

        Returns:
            numpy.ndarray:
            The ``(n_channels, n_channels)`` dipole matrix.
        """
        matrix = np.zeros((self.n_channels, self.n_channels))

        for coupling in self.couplings:
            matrix[coupling.first, coupling.second] = coupling.strength
            matrix[coupling.second, coupling.first] = coupling.strength

        return matrix

    def level_hamiltonian(self) -> Tuple[np.ndarray, np.ndarray]:
        """Return the field-free and dipole matrices of the two-level atom.

        Returns:
            tuple:
            A 2-tuple of the diagonal energy matrix and the dipole matrix.
        """
        energies = np.diag([self.params.level_energy(level)
                            for level in self.levels])
        dipole = np.zeros_like(energies)

        if self.n_levels == 2:
            dipole[0, 1] = dipole[1, 0] = self.params.mu0

        return energies, dipole

    def envelope_potential(
        self,
        r: np.ndarray,
    ) -> np.ndarray:
        """Return the lowest channel potential relative to its asymptote.

        This is the envelope used to map grids.

        Args:
            r (numpy.ndarray):
                The positions.

        Returns:
            numpy.ndarray:
            The envelope potential.
        """
        return np.min([
            channel.total_potential(r) - channel.potential.asymptotic_energy
            for channel in self.channels
        ], axis=0)


def _build_channels(
    params: SystemParams,
    labels: Sequence[ChannelLabel],
) -> Tuple[Channel, ...]:
    trap = harmonic_potential(params.mass, params.omega, params.d)
    channels = []

    for label in labels:
        asymptote = (params.level_energy(label.first) +
                     params.level_energy(label.second))

        if {label.first, label.second} == {'0', 'a'}:
            potential = inverse_cube_potential(params.c3,
                                               asymptotic_energy=asymptote)
        else:
            potential = zero_potential(asymptote)

        channels.append(Channel(label=label, potential=potential, trap=trap))

    return tuple(channels)


def _build_couplings(
    labels: Sequence[ChannelLabel],
    mu0: float,
    transitions: FrozenSet[FrozenSet[str]],
) -> Tuple[DipoleCoupling, ...]:
    return tuple(
        DipoleCoupling(first=i, second=j, strength=mu0)
        for (i, p), (j, q) in itertools.combinations(enumerate(labels), 2)
        if p.transition_to(q) in transitions
    )


#: The propagated channels of the full model, in order.
FULL_CHANNELS = tuple(
    ChannelLabel.parse(key)
    for key in ('00', '0a', 'a0', 'aa', '01', 'a1', '10', '1a')
)

#: The grid channels of the reduced model, in order.
REDUCED_CHANNELS = FULL_CHANNELS[:4]

#: The levels of the reduced model's two-level atom.
REDUCED_LEVELS = ('0', 'a')


def build_calcium_like_system(
    params: SystemParams,
    *,
    transitions: FrozenSet[FrozenSet[str]] = DEFAULT_TRANSITIONS,
) -> ChannelSystem:
    """Build the full eight-channel system.

    Ground-pair channels carry no interaction. The ``|0a>`` and ``|a0>``
    channels carry an attractive ``-C3 / R^3`` curve, and ``|aa>`` is flat
    at ``2 E_a``. Every channel sits in the same displaced harmonic trap,
    and every coupled pair has the dipole ``mu0``.

    Args:
        params (SystemParams):
            The physical parameters.

        transitions (frozenset, optional):
            The single-atom transitions driven by the laser.

    Returns:
        ChannelSystem:
        The full system.

    Raises:
        phasegate.model.errors.ModelError:
            The parameters are invalid.
    """
    params.validate()

    return ChannelSystem(
        channels=_build_channels(params, FULL_CHANNELS),
        couplings=_build_couplings(FULL_CHANNELS, params.mu0, transitions),
        mode=SystemMode.FULL8,
        params=params)


def build_dipole_system(
    params: SystemParams,
) -> ChannelSystem:
    """Build the full system for a generic C3/R^3 dipole-dipole model.

    This is the model used for studies of the interaction strength, where
    C3 is treated as a free parameter. Its channel structure is the same
    as :py:func:`build_calcium_like_system`.

    Args:
        params (SystemParams):
            The physical parameters.

    Returns:
        ChannelSystem:
        The full system.
    """
    logger.debug('Building dipole model with C3 = %g (interaction energy '
                 '%g at d = %g)',
                 params.c3, params.interaction_energy, params.d)

    return build_calcium_like_system(params)


def reduce_system(
    full: ChannelSystem,
) -> ChannelSystem:
    """Reduce a full system to four grid channels and a two-level atom.

    The ``|01>``/``|10>`` blocks are replaced by a grid-free two-level
    atom ``{|0>, |a>}``, which carries the single-qubit dynamics.

    Args:
        full (ChannelSystem):
            The full system.

    Returns:
        ChannelSystem:
        The reduced system.

    Raises:
        phasegate.model.errors.ModelError:
            The system isn't a full system.
    """
    if full.mode is not SystemMode.FULL8:
        raise ModelError('only full systems can be reduced.')

    indices = [full.index_of(label) for label in REDUCED_CHANNELS]
    remap = {old: new for new, old in enumerate(indices)}

    return ChannelSystem(
        channels=tuple(full.channels[i] for i in indices),
        couplings=tuple(
            DipoleCoupling(first=remap[c.first],
                           second=remap[c.second],
                           strength=c.strength)
            for c in full.couplings
            if c.first in remap and c.second in remap
        ),
        mode=SystemMode.REDUCED,
        params=full.params,
        levels=REDUCED_LEVELS)
