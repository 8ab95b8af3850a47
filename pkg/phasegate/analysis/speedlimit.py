"""Timescale estimates for the quantum speed limit.

Version Added:
    1.0
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from phasegate.grid.eigen import ground_state_overlap, solve_bound_states
from phasegate.grid.grid import SpatialGrid
from phasegate.model.channels import (ChannelLabel,
                                      ChannelSystem,
                                      harmonic_potential)


logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SpeedLimits:
    """Timescales bounding the gate duration.

    Version Added:
        1.0
    """

    #: The excited-state interaction energy at the trap distance.
    interaction_energy: float

    #: The time to accumulate a nonlocal phase of one radian.
    t_int_rad: float

    #: The time to accumulate a nonlocal phase of pi.
    t_int_pi: float

    #: The vibrational timescale of the trap.
    t_v: float

    #: The energy gap above the trap ground state.
    trap_gap: float

    #: The overlap of the two atoms' trap ground states.
    overlap: float

    @property
    def interaction_free(self) -> bool:
        """Whether the atoms don't interact at the trap distance."""
        return math.isinf(self.t_int_rad)


def speed_limit_estimates(
    system: ChannelSystem,
    d: Optional[float] = None,
    omega: Optional[float] = None,
    *,
    grid: Optional[SpatialGrid] = None,
) -> SpeedLimits:
    """Return the interaction and vibrational timescales of a system.

    The interaction energy is the depth of the ``|0a>`` potential below
    its asymptote at distance ``d``. With a grid, the trap gap is the
    spacing of the two lowest trap eigenstates; otherwise it's the
    harmonic gap ``omega``.

    Args:
        system (phasegate.model.channels.ChannelSystem):
            The system.

        d (float, optional):
            The distance. Defaults to the trap distance of the system.

        omega (float, optional):
            The angular trap frequency. Defaults to that of the system.

        grid (phasegate.grid.grid.SpatialGrid, optional):
            A grid for computing the trap gap numerically.

    Returns:
        SpeedLimits:
        The estimates.
    """
    params = system.params

    if d is None:
        d = params.d

    if omega is None:
        omega = params.omega

    channel = system.channels[system.index_of(ChannelLabel.parse('0a'))]
    potential = channel.potential
    interaction = abs(float(potential(np.array([d]))[0]) -
                      potential.asymptotic_energy)

    if interaction > 0.0:
        t_int_rad = 1.0 / interaction
    else:
        logger.warning('The atoms do not interact at d = %g; the '
                       'interaction time is infinite.', d)
        t_int_rad = math.inf

    if grid is not None:
        trap = harmonic_potential(params.mass, omega, d)
        states = solve_bound_states(grid, trap, 2)
        trap_gap = states[1].energy - states[0].energy
    else:
        trap_gap = omega

    return SpeedLimits(interaction_energy=interaction,
                       t_int_rad=t_int_rad,
                       t_int_pi=math.pi * t_int_rad,
                       t_v=1.0 / trap_gap,
                       trap_gap=trap_gap,
                       overlap=ground_state_overlap(params.mass, omega, d))
