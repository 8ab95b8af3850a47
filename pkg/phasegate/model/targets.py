"""Initial basis states and phasegate targets.

Every basis state starts in the motional ground state of the trap,
``|ij(R)> = |ij> (x) |phi_0>``. The ``|11>`` state couples to nothing and
only acquires its natural phase, so it is accounted for analytically.

Version Added:
    1.0
"""

from __future__ import annotations

import cmath
import logging
import math
from dataclasses import dataclass, replace
from typing import Dict, Tuple

import numpy as np

from phasegate.grid.eigen import solve_bound_states
from phasegate.grid.grid import SpatialGrid
from phasegate.model.channels import ChannelLabel, ChannelSystem, SystemMode
from phasegate.model.hamiltonian import WaveState


logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class BasisTarget:
    """A propagated basis state and the state it should be mapped to.

    Version Added:
        1.0
    """

    #: The basis state name, such as ``00`` or ``0`` for the two-level atom.
    #:
    #: Type:
    #:     str
    name: str

    #: The initial state.
    #:
    #: Type:
    #:     phasegate.model.hamiltonian.WaveState
    initial: WaveState

    #: The target state at the final time.
    #:
    #: Type:
    #:     phasegate.model.hamiltonian.WaveState
    target: WaveState


@dataclass(frozen=True)
class GateTargets:
    """The targets of a phasegate optimization.

    Version Added:
        1.0
    """

    #: The channel layout the targets belong to.
    #:
    #: Type:
    #:     phasegate.model.channels.SystemMode
    mode: SystemMode

    #: The propagated basis states and their targets.
    #:
    #: Type:
    #:     tuple of BasisTarget
    basis: Tuple[BasisTarget, ...]

    #: The normalization of the fidelity (4 full, 2 reduced).
    #:
    #: Type:
    #:     int
    n_functional: int

    #: The contribution to tau of basis states handled analytically.
    #:
    #: Type:
    #:     complex
    analytic_tau: complex

    #: The gate duration.
    #:
    #: Type:
    #:     float
    duration: float

    #: The nonlocal phase the gate should implement.
    #:
    #: Type:
    #:     float
    chi_target: float

    #: The trap ground state energy.
    #:
    #: Type:
    #:     float
    trap_energy: float

    #: The natural phase of ``|11(R)>`` at the final time.
    #:
    #: Type:
    #:     float
    natural_phase: float

    @property
    def names(self) -> Tuple[str, ...]:
        """The names of the propagated basis states."""
        return tuple(item.name for item in self.basis)

    @property
    def trap_phase(self) -> float:
        """The phase acquired by the trap ground state over the gate."""
        return -self.trap_energy * self.duration

    def __getitem__(
        self,
        name: str,
    ) -> BasisTarget:
        for item in self.basis:
            if item.name == name:
                return item

        raise KeyError(name)

    def phase_shifted(
        self,
        delta: float,
    ) -> GateTargets:
        """Return targets multiplied by a global phase.

        Args:
            delta (float):
                The phase, in radians.

        Returns:
            GateTargets:
            The shifted targets.
        """
        factor = cmath.exp(1j * delta)

        return replace(
            self,
            basis=tuple(
                replace(item, target=item.target.scaled(factor))
                for item in self.basis
            ),
            analytic_tau=self.analytic_tau / factor)


def trap_ground_state(
    system: ChannelSystem,
    grid: SpatialGrid,
) -> Tuple[float, np.ndarray]:
    """Return the trap ground state of a system.

    Args:
        system (phasegate.model.channels.ChannelSystem):
            The system.

        grid (phasegate.grid.grid.SpatialGrid):
            The grid.

    Returns:
        tuple:
        A 2-tuple of the ground state energy and amplitudes.
    """
    energy, amplitudes = solve_bound_states(grid, system.channels[0].trap,
                                            1)[0]

    return energy, amplitudes


def initial_states(
    system: ChannelSystem,
    grid: SpatialGrid,
) -> Dict[str, WaveState]:
    """Return the propagated basis states of a system.

    Full systems propagate ``|00>``, ``|01>`` and ``|10>``. Reduced systems
    propagate ``|00>`` and the two-level ``|0>``.

    Args:
        system (phasegate.model.channels.ChannelSystem):
            The system.

        grid (phasegate.grid.grid.SpatialGrid):
            The grid.

    Returns:
        dict:
        A mapping of basis state names to initial states.
    """
    _energy, ground = trap_ground_state(system, grid)
    states: Dict[str, WaveState] = {}

    if system.mode is SystemMode.FULL8:
        names = ('00', '01', '10')
    else:
        names = ('00',)

    for name in names:
        state = WaveState.zeros(system, grid)
        state.amplitudes[system.index_of(ChannelLabel.parse(name))] = ground
        states[name] = state

    if system.mode is SystemMode.REDUCED:
        state = WaveState.zeros(system, grid)
        state.levels[system.levels.index('0')] = 1.0
        states['0'] = state

    return states


def gate_targets(
    system: ChannelSystem,
    grid: SpatialGrid,
    duration: float,
    chi_target: float = math.pi,
) -> GateTargets:
    """Return the phasegate targets of a system.

    The natural phase of ``|11(R)>`` is
    :math:`\\phi_T = -(2E_1 + E_{trap})T`. The ``|00>`` state should end
    with phase :math:`\\chi + \\phi_T` and ``|01>``, ``|10>`` with
    :math:`\\phi_T`, so the gate equals ``diag(e^{i chi}, 1, 1, 1)`` up to
    the global phase :math:`\\phi_T`. The two-level ``|0>`` of a reduced
    system carries no trap phase and should end with
    :math:`-E_1 T`.

    Args:
        system (phasegate.model.channels.ChannelSystem):
            The system.

        grid (phasegate.grid.grid.SpatialGrid):
            The grid.

        duration (float):
            The gate duration.

        chi_target (float, optional):
            The nonlocal phase to implement. Fractions of pi give partial
            phasegates.

    Returns:
        GateTargets:
        The targets.
    """
    trap_energy, _ground = trap_ground_state(system, grid)
    e1 = system.params.e1
    natural_phase = -(2.0 * e1 + trap_energy) * duration
    states = initial_states(system, grid)

    phases = {
        '00': chi_target + natural_phase,
        '01': natural_phase,
        '10': natural_phase,
        '0': -e1 * duration,
    }

    basis = tuple(
        BasisTarget(name=name,
                    initial=state,
                    target=state.scaled(cmath.exp(1j * phases[name])))
        for name, state in states.items()
    )

    if system.mode is SystemMode.FULL8:
        n_functional = 4
        analytic_tau = 1.0 + 0.0j
    else:
        n_functional = 2
        analytic_tau = 0.0j

    return GateTargets(mode=system.mode,
                       basis=basis,
                       n_functional=n_functional,
                       analytic_tau=analytic_tau,
                       duration=duration,
                       chi_target=chi_target,
                       trap_energy=trap_energy,
                       natural_phase=natural_phase)
