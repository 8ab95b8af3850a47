"""Time-resolved gate dynamics.

Version Added:
    1.0
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Dict, Sequence

import numpy as np

from phasegate.model.channels import ChannelLabel, SystemMode
from phasegate.model.targets import GateTargets
from phasegate.propagator.recorders import PhaseRecorder, PopulationRecorder
from phasegate.util.tables import write_table
from phasegate.util.units import from_atomic


logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class PhaseTrace:
    """Overlaps of the basis states with their initial states over time.

    Version Added:
        1.0
    """

    #: The sample times.
    #:
    #: Type:
    #:     numpy.ndarray
    times: np.ndarray

    #: Two-qubit traces, keyed by basis state (``00``, ``01``, ...).
    #:
    #: Type:
    #:     dict
    two_qubit: Dict[str, np.ndarray]

    #: Single-qubit traces, keyed by level (``0``, ``1``).
    #:
    #: Type:
    #:     dict
    single_qubit: Dict[str, np.ndarray]

    def write_table(
        self,
        path: str,
        *,
        comments: Sequence[str] = (),
    ) -> None:
        """Write the traces as ``t_fs, state, re_tau, im_tau, abs_tau``.

        Args:
            path (str):
                The path to write.

            comments (list of str, optional):
                Provenance comment lines.
        """
        traces = dict(self.two_qubit)
        traces.update(self.single_qubit)
        rows = (
            [from_atomic(t, 'fs'), name, float(values[i].real),
             float(values[i].imag), float(abs(values[i]))]
            for i, t in enumerate(self.times)
            for name, values in traces.items()
        )

        write_table(path, ['t_fs', 'state', 're_tau', 'im_tau', 'abs_tau'],
                    rows, comments=comments)


def phase_trace(
    recorder: PhaseRecorder,
    targets: GateTargets,
    e1: float,
    stride: int = 1,
) -> PhaseTrace:
    """Return the phase dynamics recorded during a propagation.

    The recorder must use the initial basis states as references. The
    ``|1>`` trace is the free evolution ``exp(-i E_1 t)``, and ``|11>``
    follows its natural phase. In full mode, the ``|0>`` trace is taken
    from ``|01>`` with the ``|1>`` and trap phases removed. In reduced
    mode, ``|01>`` and ``|10>`` are rebuilt from the ``|0>`` trace.

    Args:
        recorder (phasegate.propagator.recorders.PhaseRecorder):
            The recorder.

        targets (phasegate.model.targets.GateTargets):
            The targets the propagated states belong to.

        e1 (float):
            The energy of the qubit level ``1``.

        stride (int, optional):
            Only every ``stride``-th recorded sample is kept.

    Returns:
        PhaseTrace:
        The traces.
    """
    times = np.asarray(recorder.times)[::stride]
    overlaps = recorder.as_array()[::stride]
    recorded = {
        name: overlaps[:, i]
        for i, name in enumerate(targets.names)
    }
    trap = np.exp(-1j * targets.trap_energy * times)
    tau_1 = np.exp(-1j * e1 * times)

    if targets.mode is SystemMode.FULL8:
        two_qubit = {
            name: recorded[name]
            for name in ('00', '01', '10')
        }
        tau_0 = recorded['01'] / (tau_1 * trap)
    else:
        tau_0 = recorded['0']
        two_qubit = {
            '00': recorded['00'],
            '01': tau_0 * tau_1 * trap,
            '10': tau_0 * tau_1 * trap,
        }

    two_qubit['11'] = tau_1 ** 2 * trap

    return PhaseTrace(times=times,
                      two_qubit=two_qubit,
                      single_qubit={
                          '0': tau_0,
                          '1': tau_1,
                      })


@dataclass(frozen=True)
class PopulationDynamics:
    """Populations comparing two-qubit and single-qubit excitation.

    Version Added:
        1.0
    """

    #: The sample times.
    times: np.ndarray

    #: The ``|00>`` population when starting in ``|00>``.
    pop_00: np.ndarray

    #: The population remaining in the single-atom ground state of the
    #: driven atom (``|01>`` in full mode, ``|0>`` in reduced mode).
    pop_0: np.ndarray

    #: The total population of the singly excited ``|0a>`` and ``|a0>``
    #: channels when starting in ``|00>``.
    pop_single_excited: np.ndarray


def population_dynamics(
    recorder: PopulationRecorder,
    targets: GateTargets,
) -> PopulationDynamics:
    """Return two-qubit against single-qubit population dynamics.

    Args:
        recorder (phasegate.propagator.recorders.PopulationRecorder):
            The recorder.

        targets (phasegate.model.targets.GateTargets):
            The targets the propagated states belong to.

    Returns:
        PopulationDynamics:
        The population traces.
    """
    system = recorder.hamiltonian.system
    populations = np.array(recorder.populations)
    index_00 = targets.names.index('00')

    def _channel(key: str) -> int:
        return system.index_of(ChannelLabel.parse(key))

    if targets.mode is SystemMode.FULL8:
        pop_0 = populations[:, targets.names.index('01'), _channel('01')]
    else:
        pop_0 = populations[:, targets.names.index('0'),
                            system.n_channels + system.levels.index('0')]

    return PopulationDynamics(
        times=np.asarray(recorder.times),
        pop_00=populations[:, index_00, _channel('00')],
        pop_0=pop_0,
        pop_single_excited=(populations[:, index_00, _channel('0a')] +
                            populations[:, index_00, _channel('a0')]))
