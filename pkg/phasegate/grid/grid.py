"""Fourier grids for the interatomic coordinate.

A :py:class:`SpatialGrid` discretizes the interatomic distance R on
``n_points`` nodes. Uniform grids place nodes at cell midpoints. Mapped
grids place nodes uniformly in an auxiliary coordinate whose density
follows the local de Broglie wavelength of an envelope potential, so
regions of fast motion get more points.

All quantities are in atomic units.

Version Added:
    1.0
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Union

import numpy as np
from scipy.fft import fft, fftfreq, ifft
from scipy.integrate import cumulative_trapezoid

from phasegate.grid.errors import GridError


logger = logging.getLogger(__name__)


#: Floor under ``e_max - V(r)`` used when computing the local step size.
ENERGY_FLOOR = 1e-12

#: Oversampling of the auxiliary mesh used to integrate the point density.
_MAPPING_OVERSAMPLING = 32


#: A function evaluating a potential (hartree) at an array of positions.
PotentialFunc = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class UniformMapping:
    """Equidistant grid nodes.

    Version Added:
        1.0
    """


@dataclass(frozen=True)
class MappedMapping:
    """Grid nodes following the local de Broglie wavelength.

    The local step size is
    :math:`\\Delta r(r) = \\beta \\pi / \\sqrt{2m(E_{max} - V(r))}`.

    Version Added:
        1.0
    """

    #: The fraction of half a local wavelength used as the step size.
    #:
    #: Type:
    #:     float
    beta: float

    #: The maximum energy to resolve, in hartree.
    #:
    #: Type:
    #:     float
    e_max: float


GridMapping = Union[UniformMapping, MappedMapping]


@dataclass(frozen=True)
class GridSpec:
    """Specification of a spatial grid.

    Version Added:
        1.0
    """

    #: The lower bound of the grid domain, in bohr.
    #:
    #: Type:
    #:     float
    r_min: float

    #: The upper bound of the grid domain, in bohr.
    #:
    #: Type:
    #:     float
    r_max: float

    #: The number of grid nodes.
    #:
    #: Type:
    #:     int
    n_points: int

    #: The reduced mass of the atom pair, in electron masses.
    #:
    #: Type:
    #:     float
    mass: float

    #: How nodes are distributed over the domain.
    #:
    #: Type:
    #:     UniformMapping or MappedMapping
    mapping: GridMapping = field(default_factory=UniformMapping)

    def validate(self) -> None:
        """Validate the specification.

        Raises:
            phasegate.grid.errors.GridError:
                The specification is invalid.
        """
        if not (self.r_min < self.r_max):
            raise GridError('r_min (%r) must be less than r_max (%r).'
                            % (self.r_min, self.r_max))

        if self.n_points < 2:
            raise GridError('a grid needs at least 2 points, not %d.'
                            % self.n_points)

        if self.mass <= 0:
            raise GridError('the grid mass must be positive.')

        if isinstance(self.mapping, MappedMapping):
            if not (0.0 < self.mapping.beta <= 1.0):
                raise GridError('the mapping beta must be in (0, 1], not %r.'
                                % self.mapping.beta)

        if self.n_points < 8:
            logger.warning('Grid with only %d points is too coarse for '
                           'anything but structural tests.',
                           self.n_points)

    def with_points(
        self,
        n_points: int,
    ) -> GridSpec:
        """Return a copy of this specification with a new point count.

        Args:
            n_points (int):
                The new number of grid nodes.

        Returns:
            GridSpec:
            The new specification.
        """
        return GridSpec(r_min=self.r_min,
                        r_max=self.r_max,
                        n_points=n_points,
                        mass=self.mass,
                        mapping=self.mapping)


@dataclass(frozen=True, eq=False)
class SpatialGrid:
    """A discretized interatomic coordinate.

    Arrays are read-only, so a grid can be shared freely between workers.

    Version Added:
        1.0
    """

    #: The specification the grid was built from.
    #:
    #: Type:
    #:     GridSpec
    spec: GridSpec

    #: The grid nodes, in bohr.
    #:
    #: Type:
    #:     numpy.ndarray
    points: np.ndarray

    #: The quadrature weight of each node, in bohr.
    #:
    #: Type:
    #:     numpy.ndarray
    step_weights: np.ndarray

    #: The mapping derivative dR/dx at each node.
    #:
    #: Type:
    #:     numpy.ndarray
    jacobian: np.ndarray

    #: The conjugate momenta of the auxiliary uniform coordinate.
    #:
    #: Type:
    #:     numpy.ndarray
    spectral_k: np.ndarray

    #: The step of the auxiliary uniform coordinate, in bohr.
    #:
    #: Type:
    #:     float
    uniform_step: float

    @property
    def n_points(self) -> int:
        """The number of grid nodes."""
        return len(self.points)

    @property
    def mass(self) -> float:
        """The reduced mass used by the kinetic operator."""
        return self.spec.mass

    @property
    def is_mapped(self) -> bool:
        """Whether the grid uses a variable step size."""
        return isinstance(self.spec.mapping, MappedMapping)

    @property
    def k_max(self) -> float:
        """The largest representable momentum."""
        return math.pi / self.uniform_step

    def inner(
        self,
        bra: np.ndarray,
        ket: np.ndarray,
    ) -> complex:
        """Return the weighted inner product of two amplitude arrays.

        Args:
            bra (numpy.ndarray):
                The amplitudes to conjugate.

            ket (numpy.ndarray):
                The other amplitudes.

        Returns:
            complex:
            The inner product.
        """
        return complex(np.sum(self.step_weights * np.conj(bra) * ket))

    def norm(
        self,
        amplitudes: np.ndarray,
    ) -> float:
        """Return the weighted norm of an amplitude array.

        Args:
            amplitudes (numpy.ndarray):
                The amplitudes.

        Returns:
            float:
            The norm.
        """
        return math.sqrt(float(np.sum(self.step_weights *
                                      np.abs(amplitudes) ** 2)))


def _freeze(*arrays: np.ndarray) -> None:
    for array in arrays:
        array.flags.writeable = False


def _build_mapped_points(
    spec: GridSpec,
    mapping: MappedMapping,
    envelope_potential: PotentialFunc,
) -> tuple:
    fine_r = np.linspace(spec.r_min, spec.r_max,
                         _MAPPING_OVERSAMPLING * spec.n_points + 1)
    envelope = np.asarray(envelope_potential(fine_r), dtype=float)

    if not np.all(np.isfinite(envelope)):
        raise GridError('the envelope potential is not finite on '
                        '[%r, %r].' % (spec.r_min, spec.r_max))

    if mapping.e_max <= envelope.min():
        raise GridError('e_max (%r) must exceed the minimum of the '
                        'envelope potential (%r).'
                        % (mapping.e_max, envelope.min()))

    kinetic = np.maximum(mapping.e_max - envelope, ENERGY_FLOOR)
    density = np.sqrt(2.0 * spec.mass * kinetic) / (mapping.beta * math.pi)
    cumulative = cumulative_trapezoid(density, fine_r, initial=0.0)
    natural_count = cumulative[-1]

    if natural_count > spec.n_points:
        raise GridError('the mapped grid needs %d points to cover '
                        '[%r, %r], but only %d were requested.'
                        % (math.ceil(natural_count), spec.r_min,
                           spec.r_max, spec.n_points))

    logger.debug('Mapped grid resolves its domain with %.1f natural '
                 'steps on %d points.',
                 natural_count, spec.n_points)

    targets = (np.arange(spec.n_points) + 0.5) * natural_count / spec.n_points
    points = np.interp(targets, cumulative, fine_r)

    length = spec.r_max - spec.r_min
    mean_density = natural_count / length
    jacobian = mean_density / np.interp(points, fine_r, density)

    return points, jacobian


def build_grid(
    spec: GridSpec,
    envelope_potential: Optional[PotentialFunc] = None,
) -> SpatialGrid:
    """Build a spatial grid.

    Args:
        spec (GridSpec):
            The grid specification.

        envelope_potential (callable, optional):
            The potential whose local wavelength controls the node density.
            This is required for mapped grids and ignored for uniform ones.

    Returns:
        SpatialGrid:
        The new grid.

    Raises:
        phasegate.grid.errors.GridError:
            The specification is invalid, or a mapped grid can't fit its
            domain in ``n_points`` steps.
    """
    spec.validate()

    n = spec.n_points
    length = spec.r_max - spec.r_min
    h = length / n

    if isinstance(spec.mapping, MappedMapping):
        if envelope_potential is None:
            raise GridError('mapped grids require an envelope potential.')

        points, jacobian = _build_mapped_points(spec, spec.mapping,
                                                envelope_potential)
    else:
        points = spec.r_min + (np.arange(n) + 0.5) * h
        jacobian = np.ones(n)

    if np.any(np.diff(points) <= 0):
        raise GridError('the grid nodes are not strictly increasing.')

    step_weights = jacobian * h
    spectral_k = 2.0 * math.pi * fftfreq(n, d=h)

    _freeze(points, step_weights, jacobian, spectral_k)

    return SpatialGrid(spec=spec,
                       points=points,
                       step_weights=step_weights,
                       jacobian=jacobian,
                       spectral_k=spectral_k,
                       uniform_step=h)


def _derivative(
    grid: SpatialGrid,
    values: np.ndarray,
) -> np.ndarray:
    k = grid.spectral_k.copy()

    if grid.n_points % 2 == 0:
        # The Nyquist mode has no odd partner.
        k[grid.n_points // 2] = 0.0

    return ifft(1j * k * fft(values, axis=-1), axis=-1)


def apply_kinetic(
    grid: SpatialGrid,
    amplitudes: np.ndarray,
) -> np.ndarray:
    """Apply the kinetic energy operator.

    The operator acts along the last axis, so a stack of channel
    amplitudes can be transformed in one call.

    On uniform grids this is ``ifft(k^2 / 2m * fft(psi))``. On mapped grids
    it is :math:`-\\frac{1}{2m} J^{-1} D J^{-1} D`, with ``D`` the spectral
    derivative in the mapped coordinate and ``J`` the Jacobian. It is
    Hermitian under the grid weights ``J dx``.

    Args:
        grid (SpatialGrid):
            The grid.

        amplitudes (numpy.ndarray):
            The amplitudes, with the grid on the last axis.

    Returns:
        numpy.ndarray:
        The kinetic energy applied to the amplitudes.

    Raises:
        phasegate.grid.errors.GridError:
            The amplitudes don't match the grid length.
    """
    amplitudes = np.asarray(amplitudes)

    if amplitudes.shape[-1] != grid.n_points:
        raise GridError('expected %d amplitudes, got %d.'
                        % (grid.n_points, amplitudes.shape[-1]))

    if not grid.is_mapped:
        energies = grid.spectral_k ** 2 / (2.0 * grid.mass)

        return ifft(energies * fft(amplitudes, axis=-1), axis=-1)

    inner = _derivative(grid, amplitudes) / grid.jacobian

    return -_derivative(grid, inner) / grid.jacobian / (2.0 * grid.mass)


def kinetic_matrix(grid: SpatialGrid) -> np.ndarray:
    """Return the dense matrix of the kinetic energy operator.

    Column ``j`` is the kinetic operator applied to the ``j``-th unit
    vector.

    Args:
        grid (SpatialGrid):
            The grid.

    Returns:
        numpy.ndarray:
        The real ``(n_points, n_points)`` matrix.
    """
    applied = apply_kinetic(grid, np.eye(grid.n_points))

    return np.ascontiguousarray(applied.real.T)


def boundary_population(
    grid: SpatialGrid,
    amplitudes: np.ndarray,
    fraction: float = 0.05,
) -> float:
    """Return the population near either edge of the grid.

    Args:
        grid (SpatialGrid):
            The grid.

        amplitudes (numpy.ndarray):
            Amplitudes with the grid on the last axis. Leading axes (such
            as channels) are summed over.

        fraction (float, optional):
            The fraction of nodes on each side that counts as the edge.

    Returns:
        float:
        The population in the edge regions.
    """
    edge = max(1, int(round(fraction * grid.n_points)))
    density = grid.step_weights * np.abs(np.asarray(amplitudes)) ** 2
    density = density.reshape(-1, grid.n_points).sum(axis=0)

    return float(density[:edge].sum() + density[-edge:].sum())
