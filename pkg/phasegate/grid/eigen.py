"""Bound states of single-channel grid Hamiltonians.

Version Added:
    1.0
"""

from __future__ import annotations

import logging
import math
from typing import List, NamedTuple, Sequence

import numpy as np
import scipy.linalg

from phasegate.grid.errors import EigensolverError, GridError
from phasegate.grid.grid import (GridSpec,
                                 PotentialFunc,
                                 SpatialGrid,
                                 build_grid,
                                 kinetic_matrix)
from phasegate.util.tables import write_table


logger = logging.getLogger(__name__)


#: Eigenvalue spacing below which a degeneracy warning is logged.
DEGENERATE_SPACING = 1e-12


class BoundState(NamedTuple):
    """An eigenpair of a grid Hamiltonian.

    Version Added:
        1.0
    """

    #: The eigenvalue, in hartree.
    energy: float

    #: The eigenfunction, normalized under the grid weights.
    amplitudes: np.ndarray


def solve_bound_states(
    grid: SpatialGrid,
    potential: PotentialFunc,
    count: int,
) -> List[BoundState]:
    """Return the lowest eigenpairs of T + V on a grid.

    The Hamiltonian is diagonalized densely in the symmetric
    representation :math:`W^{1/2} H W^{-1/2}`, where :math:`W` holds the
    grid weights. Each eigenfunction's sign is fixed so its largest-modulus
    entry is positive.

    Args:
        grid (phasegate.grid.grid.SpatialGrid):
            The grid.

        potential (callable):
            The potential, evaluated at the grid points.

        count (int):
            The number of eigenpairs to return. This may be at most a
            quarter of the grid points.

    Returns:
        list of BoundState:
        The eigenpairs, in ascending order of energy.

    Raises:
        phasegate.grid.errors.GridError:
            Too many eigenpairs were requested.

        phasegate.grid.errors.EigensolverError:
            The eigensolve failed.
    """
    n = grid.n_points

    if count < 1 or count > n // 4:
        raise GridError('can only solve for 1 to %d bound states on a '
                        '%d-point grid, not %d.'
                        % (n // 4, n, count))

    sqrt_w = np.sqrt(grid.step_weights)
    hamiltonian = kinetic_matrix(grid)
    hamiltonian[np.diag_indices(n)] += np.asarray(potential(grid.points),
                                                  dtype=float)

    symmetric = sqrt_w[:, np.newaxis] * hamiltonian / sqrt_w[np.newaxis, :]
    symmetric = 0.5 * (symmetric + symmetric.T)

    try:
        energies, vectors = scipy.linalg.eigh(symmetric,
                                              subset_by_index=(0, count - 1))
    except (np.linalg.LinAlgError, ValueError) as e:
        raise EigensolverError(
            'the bound-state eigensolve failed: %s.' % e,
            count=count)

    spacings = np.diff(energies)

    if np.any(spacings < DEGENERATE_SPACING):
        logger.warning('Bound states are degenerate to %g hartree; the '
                       'grid may be under-resolved.',
                       spacings.min())

    states: List[BoundState] = []

    for energy, vector in zip(energies, vectors.T):
        amplitudes = vector / sqrt_w

        if amplitudes[np.argmax(np.abs(amplitudes))] < 0:
            amplitudes = -amplitudes

        states.append(BoundState(energy=float(energy),
                                 amplitudes=amplitudes))

    return states


def displaced_ground_state(
    grid: SpatialGrid,
    mass: float,
    omega: float,
    center: float,
) -> np.ndarray:
    """Return the analytic ground state of a displaced harmonic trap.

    Args:
        grid (phasegate.grid.grid.SpatialGrid):
            The grid to sample on.

        mass (float):
            The oscillator mass.

        omega (float):
            The angular trap frequency.

        center (float):
            The trap minimum.

    Returns:
        numpy.ndarray:
        The normalized Gaussian sampled at the grid points.
    """
    m_omega = mass * omega

    return ((m_omega / math.pi) ** 0.25 *
            np.exp(-0.5 * m_omega * (grid.points - center) ** 2))


def ground_state_overlap(
    mass: float,
    omega: float,
    d: float,
) -> float:
    """Return the closed-form overlap of two displaced trap ground states.

    This is :math:`\\exp(-m \\omega d^2 / 2\\hbar)` with ``mass`` the
    reduced mass of the pair. It equals the overlap of the single-atom
    ground states (each with twice the reduced mass) of two traps ``d``
    apart.

    Args:
        mass (float):
            The reduced mass.

        omega (float):
            The angular trap frequency.

        d (float):
            The distance between the traps.

    Returns:
        float:
        The overlap.
    """
    return math.exp(-0.5 * mass * omega * d ** 2)


def check_grid_convergence(
    spec: GridSpec,
    potential: PotentialFunc,
    count: int,
) -> float:
    """Return how much eigenvalues change when the grid is doubled.

    Args:
        spec (phasegate.grid.grid.GridSpec):
            The grid specification to check.

        potential (callable):
            The potential. It also serves as the envelope of mapped grids.

        count (int):
            The number of eigenvalues to compare.

    Returns:
        float:
        The largest relative eigenvalue change.
    """
    coarse = solve_bound_states(build_grid(spec, potential), potential,
                                count)
    fine = solve_bound_states(
        build_grid(spec.with_points(2 * spec.n_points), potential),
        potential, count)

    return max(abs(b.energy - a.energy) / max(abs(a.energy), 1e-300)
               for a, b in zip(coarse, fine))


def export_eigenstates(
    path: str,
    states: Sequence[BoundState],
    *,
    comments: Sequence[str] = (),
) -> None:
    """Write eigenpairs to a CSV table.

    Columns are ``n, energy_hartree, psi_1 .. psi_N``.

    Args:
        path (str):
            The path to write.

        states (list of BoundState):
            The eigenpairs.

        comments (list of str, optional):
            Provenance comment lines.
    """
    n_points = len(states[0].amplitudes) if states else 0
    header = ['n', 'energy_hartree'] + [
        'psi_%d' % (i + 1)
        for i in range(n_points)
    ]

    write_table(path, header,
                ([n, state.energy] + [float(v) for v in state.amplitudes]
                 for n, state in enumerate(states)),
                comments=comments)
