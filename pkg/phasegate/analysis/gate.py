"""Fidelities, gate phases and local invariants.

Phases follow ``phi_ij = arg <ij(R)|U(T, 0)|ij(R)>``, so free evolution
at energy E gives ``-E T``. The nonlocal phase is
``chi = phi_00 - phi_01 - phi_10 + phi_11``, reduced to ``(-pi, pi]``.

Version Added:
    1.0
"""

from __future__ import annotations

import cmath
import logging
import math
from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Sequence

from phasegate.analysis.errors import NormalizationError, PhaseUndefinedError
from phasegate.grid.grid import SpatialGrid
from phasegate.model.channels import ChannelLabel, ChannelSystem, SystemMode
from phasegate.model.hamiltonian import WaveState
from phasegate.model.targets import GateTargets
from phasegate.util.units import from_atomic


logger = logging.getLogger(__name__)


#: Overlap modulus below which a phase is undefined.
PHASE_THRESHOLD = 1e-6

#: Allowed norm deviation of states passed to the analysis.
NORM_TOLERANCE = 1e-6


def wrap_phase(phase: float) -> float:
    """Reduce a phase to ``(-pi, pi]``.

    Args:
        phase (float):
            The phase, in radians.

    Returns:
        float:
        The reduced phase.
    """
    return math.pi - (math.pi - phase) % (2.0 * math.pi)


@dataclass(frozen=True)
class PhaseSet:
    """The diagonal phases of a two-qubit gate.

    Version Added:
        1.0
    """

    #: The phase of ``|00>``.
    phi_00: float

    #: The phase of ``|01>``.
    phi_01: float

    #: The phase of ``|10>``.
    phi_10: float

    #: The phase of ``|11>``.
    phi_11: float

    #: The single-qubit phase of ``|0>``, when known.
    phi_0: Optional[float] = None

    #: The single-qubit phase of ``|1>``, when known.
    phi_1: Optional[float] = None


@dataclass(frozen=True)
class NonlocalPhase:
    """The nonlocal content of a diagonal two-qubit gate.

    Version Added:
        1.0
    """

    #: The nonlocal phase, in ``(-pi, pi]``.
    chi: float

    #: The local invariant G1.
    g1: float

    #: The local invariant G2.
    g2: float

    #: The concurrence (entangling power).
    concurrence: float


@dataclass(frozen=True)
class GateReport:
    """The diagnostics of one gate.

    Version Added:
        1.0
    """

    #: The channel layout the gate was computed in.
    mode: SystemMode

    #: The gate duration.
    duration: float

    #: The C3 coefficient of the system.
    c3: float

    #: The complex overlap tau of the propagated model.
    tau: complex

    #: The fidelity ``Re[tau] / N`` of the propagated model.
    fidelity: float

    #: The four-state phasegate fidelity.
    gate_fidelity: float

    #: The motional fidelity of ``|00>``.
    f00: float

    #: The gate phases.
    phases: PhaseSet

    #: The nonlocal phase and invariants.
    nonlocal_phase: NonlocalPhase

    #: The number of Krotov iterations.
    iterations: int = 0

    #: The fidelity gain of the last iteration.
    delta_f: float = 0.0

    #: Whether the optimization converged.
    converged: bool = False

    @property
    def chi(self) -> float:
        """The nonlocal phase."""
        return self.nonlocal_phase.chi

    @property
    def g1(self) -> float:
        """The local invariant G1."""
        return self.nonlocal_phase.g1

    @property
    def g2(self) -> float:
        """The local invariant G2."""
        return self.nonlocal_phase.g2

    @property
    def concurrence(self) -> float:
        """The concurrence."""
        return self.nonlocal_phase.concurrence


def _check_norm(state: WaveState, grid: SpatialGrid, name: str) -> None:
    norm = state.norm(grid)

    if abs(norm - 1.0) > NORM_TOLERANCE:
        raise NormalizationError('the %s state has norm %.10f.'
                                 % (name, norm))


def motional_fidelity(
    final_state: WaveState,
    reference: WaveState,
    grid: SpatialGrid,
    channel: int = 0,
) -> float:
    """Return the probability of ending in the reference motional state.

    This projects the ``|00>`` channel of the final state onto the same
    channel of the reference, normally ``|00> (x) |phi_0>``.

    Args:
        final_state (phasegate.model.hamiltonian.WaveState):
            The final state.

        reference (phasegate.model.hamiltonian.WaveState):
            The reference state.

        grid (phasegate.grid.grid.SpatialGrid):
            The grid.

        channel (int, optional):
            The index of the ``|00>`` channel.

    Returns:
        float:
        The motional fidelity.

    Raises:
        phasegate.analysis.errors.NormalizationError:
            A state isn't normalized.
    """
    _check_norm(final_state, grid, 'final')
    _check_norm(reference, grid, 'reference')

    overlap = grid.inner(reference.amplitudes[channel],
                         final_state.amplitudes[channel])

    return abs(overlap) ** 2


def basis_overlaps(
    final_states: Sequence[WaveState],
    targets: GateTargets,
    grid: SpatialGrid,
) -> Dict[str, complex]:
    """Return the overlap of each final state with its initial state.

    Args:
        final_states (list of phasegate.model.hamiltonian.WaveState):
            The final states, in the order of ``targets.basis``.

        targets (phasegate.model.targets.GateTargets):
            The targets.

        grid (phasegate.grid.grid.SpatialGrid):
            The grid.

    Returns:
        dict:
        A mapping of basis state names to overlaps.
    """
    return {
        item.name: item.initial.overlap(state, grid)
        for item, state in zip(targets.basis, final_states)
    }


def _phase_of(name: str, overlap: complex) -> float:
    modulus = abs(overlap)

    if modulus < PHASE_THRESHOLD:
        raise PhaseUndefinedError(state=name, modulus=modulus)

    return cmath.phase(overlap)


def gate_phases(
    final_states: Sequence[WaveState],
    targets: GateTargets,
    grid: SpatialGrid,
    e1: float,
) -> PhaseSet:
    """Return the diagonal gate phases.

    In full mode the phases come from the propagated ``|00>``, ``|01>``
    and ``|10>`` states, and ``|11>`` has its natural phase. In reduced
    mode, ``|01>`` and ``|10>`` are rebuilt from the two-level phase
    ``phi_0``, the natural ``phi_1 = -E_1 T`` and the trap zero-point
    phase, which the grid states of a full model carry.

    Args:
        final_states (list of phasegate.model.hamiltonian.WaveState):
            The final states, in the order of ``targets.basis``.

        targets (phasegate.model.targets.GateTargets):
            The targets.

        grid (phasegate.grid.grid.SpatialGrid):
            The grid.

        e1 (float):
            The energy of the qubit level ``1``.

    Returns:
        PhaseSet:
        The phases, in ``(-pi, pi]``.

    Raises:
        phasegate.analysis.errors.PhaseUndefinedError:
            An overlap vanished.
    """
    overlaps = basis_overlaps(final_states, targets, grid)
    phi_00 = _phase_of('00', overlaps['00'])
    phi_11 = wrap_phase(targets.natural_phase)
    phi_1 = wrap_phase(-e1 * targets.duration)

    if targets.mode is SystemMode.FULL8:
        return PhaseSet(phi_00=phi_00,
                        phi_01=_phase_of('01', overlaps['01']),
                        phi_10=_phase_of('10', overlaps['10']),
                        phi_11=phi_11,
                        phi_1=phi_1)

    phi_0 = _phase_of('0', overlaps['0'])
    phi_01 = wrap_phase(phi_0 + phi_1 + targets.trap_phase)

    return PhaseSet(phi_00=phi_00,
                    phi_01=phi_01,
                    phi_10=phi_01,
                    phi_11=phi_11,
                    phi_0=phi_0,
                    phi_1=phi_1)


def nonlocal_phase(phases: PhaseSet) -> NonlocalPhase:
    """Return the nonlocal phase and local invariants of a diagonal gate.

    Args:
        phases (PhaseSet):
            The gate phases.

    Returns:
        NonlocalPhase:
        The nonlocal phase, G1, G2 and the concurrence.
    """
    chi = wrap_phase(phases.phi_00 - phases.phi_01 - phases.phi_10 +
                     phases.phi_11)

    return NonlocalPhase(chi=chi,
                         g1=math.cos(chi / 2.0) ** 2,
                         g2=2.0 + math.cos(chi),
                         concurrence=abs(math.sin(chi / 2.0)))


def gate_fidelity(
    final_states: Sequence[WaveState],
    targets: GateTargets,
    grid: SpatialGrid,
) -> float:
    """Return the four-state phasegate fidelity.

    In full mode this is the optimization fidelity. In reduced mode the
    ``|01>`` and ``|10>`` overlaps are both taken from the two-level
    ``|0>`` overlap, and ``|11>`` contributes exactly 1.

    Args:
        final_states (list of phasegate.model.hamiltonian.WaveState):
            The final states, in the order of ``targets.basis``.

        targets (phasegate.model.targets.GateTargets):
            The targets.

        grid (phasegate.grid.grid.SpatialGrid):
            The grid.

    Returns:
        float:
        The fidelity.
    """
    overlaps = {
        item.name: item.target.overlap(state, grid)
        for item, state in zip(targets.basis, final_states)
    }

    if targets.mode is SystemMode.FULL8:
        tau = targets.analytic_tau + sum(overlaps.values())
    else:
        tau = overlaps['00'] + 2.0 * overlaps['0'] + 1.0

    return tau.real / 4.0


def make_gate_report(
    system: ChannelSystem,
    grid: SpatialGrid,
    targets: GateTargets,
    final_states: Sequence[WaveState],
    *,
    iterations: int = 0,
    delta_f: float = 0.0,
    converged: bool = False,
) -> GateReport:
    """Assemble the diagnostics of a gate from its final states.

    If a phase is undefined, a warning is logged and the phases and
    nonlocal quantities are reported as NaN.

    Args:
        system (phasegate.model.channels.ChannelSystem):
            The system the states were propagated in.

        grid (phasegate.grid.grid.SpatialGrid):
            The grid.

        targets (phasegate.model.targets.GateTargets):
            The targets.

        final_states (list of phasegate.model.hamiltonian.WaveState):
            The final states, in the order of ``targets.basis``.

        iterations (int, optional):
            The number of optimization iterations.

        delta_f (float, optional):
            The fidelity gain of the last iteration.

        converged (bool, optional):
            Whether the optimization converged.

    Returns:
        GateReport:
        The report.
    """
    tau = targets.analytic_tau + sum(
        item.target.overlap(state, grid)
        for item, state in zip(targets.basis, final_states)
    )
    index_00 = system.index_of(ChannelLabel.parse('00'))
    f00 = motional_fidelity(final_states[targets.names.index('00')],
                            targets['00'].initial, grid, channel=index_00)

    try:
        phases = gate_phases(final_states, targets, grid, system.params.e1)
        invariants = nonlocal_phase(phases)
    except PhaseUndefinedError as e:
        logger.warning('Reporting NaN gate phases: %s', e)
        nan = float('nan')
        phases = PhaseSet(nan, nan, nan, nan)
        invariants = NonlocalPhase(nan, nan, nan, nan)

    return GateReport(mode=targets.mode,
                      duration=targets.duration,
                      c3=system.params.c3,
                      tau=tau,
                      fidelity=tau.real / targets.n_functional,
                      gate_fidelity=gate_fidelity(final_states, targets,
                                                  grid),
                      f00=f00,
                      phases=phases,
                      nonlocal_phase=invariants,
                      iterations=iterations,
                      delta_f=delta_f,
                      converged=converged)


#: Columns of a gate report row.
REPORT_COLUMNS = [
    'T_fs', 'C3_au', 'F', 'chi_over_pi', 'F00', 'g1', 'g2',
    'concurrence', 'iterations', 'delta_F',
]


def report_row(report: GateReport) -> Dict[str, Any]:
    """Return a gate report as one row of a sweep table.

    Args:
        report (GateReport):
            The report.

    Returns:
        dict:
        The row, keyed by :py:data:`REPORT_COLUMNS`.
    """
    return {
        'T_fs': from_atomic(report.duration, 'fs'),
        'C3_au': report.c3,
        'F': report.gate_fidelity,
        'chi_over_pi': report.chi / math.pi,
        'F00': report.f00,
        'g1': report.g1,
        'g2': report.g2,
        'concurrence': report.concurrence,
        'iterations': report.iterations,
        'delta_F': report.delta_f,
    }


def format_report(report: GateReport) -> str:
    """Return a gate report as a flat key-value text block.

    Args:
        report (GateReport):
            The report.

    Returns:
        str:
        One ``key = value`` line per quantity.
    """
    phases = report.phases
    items: List[tuple] = [
        ('mode', report.mode.value),
        ('T_fs', from_atomic(report.duration, 'fs')),
        ('C3_au', report.c3),
        ('tau_re', report.tau.real),
        ('tau_im', report.tau.imag),
        ('F', report.fidelity),
        ('F_gate', report.gate_fidelity),
        ('F00', report.f00),
        ('phi_00', phases.phi_00),
        ('phi_01', phases.phi_01),
        ('phi_10', phases.phi_10),
        ('phi_11', phases.phi_11),
        ('chi', report.chi),
        ('chi_over_pi', report.chi / math.pi),
        ('g1', report.g1),
        ('g2', report.g2),
        ('concurrence', report.concurrence),
        ('iterations', report.iterations),
        ('delta_F', report.delta_f),
        ('converged', str(report.converged).lower()),
    ]

    return ''.join(
        '%s = %s\n' % (key, repr(value) if isinstance(value, float)
                       else value)
        for key, value in items
    )
