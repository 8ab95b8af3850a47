"""Unit tests for phasegate.analysis."""

from __future__ import annotations

import cmath
import math
import os

import numpy as np

from phasegate.analysis.dynamics import phase_trace, population_dynamics
from phasegate.analysis.errors import NormalizationError, PhaseUndefinedError
from phasegate.analysis.gate import (REPORT_COLUMNS,
                                     PhaseSet,
                                     basis_overlaps,
                                     format_report,
                                     gate_fidelity,
                                     gate_phases,
                                     make_gate_report,
                                     motional_fidelity,
                                     nonlocal_phase,
                                     report_row,
                                     wrap_phase)
from phasegate.analysis.spectrum import pulse_spectrum, spectral_support
from phasegate.analysis.speedlimit import speed_limit_estimates
from phasegate.krotov.pulses import (ControlField,
                                     guess_carrier,
                                     make_guess_pulse,
                                     make_time_lattice)
from phasegate.model.channels import SystemMode
from phasegate.model.hamiltonian import GridHamiltonian, WaveState
from phasegate.model.targets import gate_targets, trap_ground_state
from phasegate.propagator.chebychev import PropagatorConfig, propagate
from phasegate.propagator.recorders import PhaseRecorder, PopulationRecorder
from phasegate.testing.testcases import PhasegateTestCase
from phasegate.util.tables import read_table
from phasegate.util.units import from_atomic, to_atomic


class GateTests(PhasegateTestCase):
    """Unit tests for phasegate.analysis.gate."""

    duration = 200.0

    def setUp(self) -> None:
        super().setUp()

        self.system = self.build_toy_system()
        self.grid = self.build_toy_grid(n_points=16)
        self.trap_energy = trap_ground_state(self.system, self.grid)[0]

    def _free_final_states(self, targets):
        # Without a field, |00> only picks up the trap phase and the
        # two-level |0> stays put.
        phases = {
            '00': cmath.exp(-1j * self.trap_energy * self.duration),
            '01': cmath.exp(-1j * (self.system.params.e1 +
                                   self.trap_energy) * self.duration),
            '10': cmath.exp(-1j * (self.system.params.e1 +
                                   self.trap_energy) * self.duration),
            '0': 1.0,
        }

        return [
            item.initial.scaled(phases[item.name])
            for item in targets.basis
        ]

    def test_wrap_phase(self) -> None:
        """Testing wrap_phase"""
        self.assertAlmostEqual(wrap_phase(0.0), 0.0)
        self.assertAlmostEqual(wrap_phase(math.pi), math.pi)
        self.assertAlmostEqual(wrap_phase(-math.pi), math.pi)
        self.assertAlmostEqual(wrap_phase(1.5 * math.pi), -0.5 * math.pi)
        self.assertAlmostEqual(wrap_phase(-7.0), -7.0 + 2.0 * math.pi)

    def test_nonlocal_phase_cz(self) -> None:
        """Testing nonlocal_phase of a controlled-Z gate"""
        result = nonlocal_phase(PhaseSet(phi_00=math.pi,
                                         phi_01=0.0,
                                         phi_10=0.0,
                                         phi_11=0.0))

        self.assertAlmostEqual(result.chi, math.pi)
        self.assertAlmostEqual(result.g1, 0.0)
        self.assertAlmostEqual(result.g2, 1.0)
        self.assertAlmostEqual(result.concurrence, 1.0)

    def test_nonlocal_phase_local_gate(self) -> None:
        """Testing nonlocal_phase of a product of local phase gates"""
        result = nonlocal_phase(PhaseSet(phi_00=0.3,
                                         phi_01=0.3 + 0.7,
                                         phi_10=0.3 - 1.1,
                                         phi_11=0.3 + 0.7 - 1.1))

        self.assertAlmostEqual(result.chi, 0.0)
        self.assertAlmostEqual(result.g1, 1.0)
        self.assertAlmostEqual(result.g2, 3.0)
        self.assertAlmostEqual(result.concurrence, 0.0)

    def test_nonlocal_phase_partial(self) -> None:
        """Testing nonlocal_phase of a partial phasegate"""
        result = nonlocal_phase(PhaseSet(phi_00=0.5 * math.pi,
                                         phi_01=0.0,
                                         phi_10=0.0,
                                         phi_11=0.0))

        self.assertAlmostEqual(result.chi, 0.5 * math.pi)
        self.assertAlmostEqual(result.g1, 0.5)
        self.assertAlmostEqual(result.g2, 2.0)
        self.assertAlmostEqual(result.concurrence, math.sqrt(0.5))

    def test_gate_fidelity_reduced_identity(self) -> None:
        """Testing gate_fidelity of free evolution in reduced mode"""
        theta = self.system.params.e1 * self.duration

        for chi_target, sign in ((0.0, 1.0), (math.pi, -1.0)):
            targets = gate_targets(self.system, self.grid, self.duration,
                                   chi_target=chi_target)
            finals = self._free_final_states(targets)

            self.assertAlmostEqual(
                gate_fidelity(finals, targets, self.grid),
                (sign * math.cos(2.0 * theta) + 2.0 * math.cos(theta) +
                 1.0) / 4.0)

    def test_gate_fidelity_full_matches_reduced(self) -> None:
        """Testing gate_fidelity of free evolution agrees between modes"""
        full = self.build_toy_system(mode=SystemMode.FULL8)
        full_targets = gate_targets(full, self.grid, self.duration)
        reduced_targets = gate_targets(self.system, self.grid,
                                       self.duration)

        self.assertAlmostEqual(
            gate_fidelity(self._free_final_states(full_targets),
                          full_targets, self.grid),
            gate_fidelity(self._free_final_states(reduced_targets),
                          reduced_targets, self.grid))

    def test_gate_fidelity_of_propagated_free_evolution(self) -> None:
        """Testing gate_fidelity of a propagation without a field"""
        targets = gate_targets(self.system, self.grid, self.duration,
                               chi_target=0.0)
        times = make_time_lattice(self.duration, 1.0)
        field = ControlField(times=times, amplitude=np.zeros(len(times) - 1))

        finals = propagate(GridHamiltonian(self.system, self.grid),
                           [item.initial for item in targets.basis],
                           field,
                           config=PropagatorConfig(dt=1.0))

        self.assertAlmostEqual(
            gate_fidelity(finals, targets, self.grid),
            gate_fidelity(self._free_final_states(targets), targets,
                          self.grid),
            places=8)

    def test_gate_phases_reduced(self) -> None:
        """Testing gate_phases rebuilds the two-qubit phases in reduced mode
        """
        targets = gate_targets(self.system, self.grid, self.duration)
        e1 = self.system.params.e1

        phases = gate_phases(self._free_final_states(targets), targets,
                             self.grid, e1)

        self.assertAlmostEqual(phases.phi_00,
                               wrap_phase(-self.trap_energy * self.duration))
        self.assertAlmostEqual(phases.phi_0, 0.0)
        self.assertAlmostEqual(phases.phi_1, wrap_phase(-e1 * self.duration))
        self.assertAlmostEqual(
            phases.phi_01,
            wrap_phase(-(e1 + self.trap_energy) * self.duration))
        self.assertEqual(phases.phi_01, phases.phi_10)
        self.assertAlmostEqual(phases.phi_11,
                               wrap_phase(targets.natural_phase))
        self.assertAlmostEqual(math.sin(nonlocal_phase(phases).chi), 0.0)

    def test_gate_phases_reduced_without_interaction(self) -> None:
        """Testing gate_phases in reduced mode without interaction gives
        phi_00 = 2 phi_0 plus the trap phase under a pulse
        """
        system = self.build_toy_system(c3=0.0)
        targets = gate_targets(system, self.grid, self.duration)
        field = make_guess_pulse(self.duration, guess_carrier(system),
                                 system, dt=1.0)

        finals = propagate(GridHamiltonian(system, self.grid),
                           [item.initial for item in targets.basis],
                           field,
                           config=PropagatorConfig(dt=1.0))
        phases = gate_phases(finals, targets, self.grid,
                             system.params.e1)

        self.assertLess(
            abs(wrap_phase(phases.phi_00 - 2.0 * phases.phi_0 -
                           targets.trap_phase)),
            1e-8)
        self.assertLess(abs(nonlocal_phase(phases).chi), 1e-8)

    def test_gate_phases_undefined(self) -> None:
        """Testing gate_phases with a vanishing overlap"""
        targets = gate_targets(self.system, self.grid, self.duration)
        finals = self._free_final_states(targets)
        finals[0] = WaveState.zeros(self.system, self.grid)

        with self.assertRaisesMessage(PhaseUndefinedError,
                                      'the phase of |00> is undefined'):
            gate_phases(finals, targets, self.grid, self.system.params.e1)

    def test_motional_fidelity(self) -> None:
        """Testing motional_fidelity"""
        targets = gate_targets(self.system, self.grid, self.duration)
        initial = targets['00'].initial

        self.assertAlmostEqual(
            motional_fidelity(initial.scaled(1j), initial, self.grid),
            1.0)

        moved = WaveState.zeros(self.system, self.grid)
        moved.amplitudes[1] = initial.amplitudes[0]

        self.assertAlmostEqual(motional_fidelity(moved, initial, self.grid),
                               0.0)

    def test_motional_fidelity_bounds_register_overlap(self) -> None:
        """Testing the squared |00> register overlap never exceeds
        motional_fidelity
        """
        targets = gate_targets(self.system, self.grid, self.duration)
        initial = targets['00'].initial
        rng = np.random.default_rng(3)
        shape = initial.amplitudes.shape

        for _ in range(20):
            state = WaveState(
                amplitudes=(rng.normal(size=shape) +
                            1j * rng.normal(size=shape)),
                levels=rng.normal(size=2) + 1j * rng.normal(size=2))
            state = state.scaled(1.0 / state.norm(self.grid))
            tau_00 = basis_overlaps([state], targets, self.grid)['00']

            self.assertLessEqual(abs(tau_00) ** 2,
                                 motional_fidelity(state, initial,
                                                   self.grid) + 1e-9)

        # A trap-pure |00> channel restores the bound with equality.
        pure = initial.scaled(0.6)
        pure.amplitudes[1] = 0.8 * initial.amplitudes[0]

        self.assertAlmostEqual(
            abs(basis_overlaps([pure], targets, self.grid)['00']) ** 2,
            motional_fidelity(pure, initial, self.grid))

    def test_motional_fidelity_not_normalized(self) -> None:
        """Testing motional_fidelity with an unnormalized state"""
        targets = gate_targets(self.system, self.grid, self.duration)
        initial = targets['00'].initial

        with self.assertRaisesMessage(NormalizationError,
                                      'the final state has norm'):
            motional_fidelity(initial.scaled(0.5), initial, self.grid)

    def test_make_gate_report(self) -> None:
        """Testing make_gate_report"""
        targets = gate_targets(self.system, self.grid, self.duration,
                               chi_target=0.0)
        finals = self._free_final_states(targets)

        report = make_gate_report(self.system, self.grid, targets, finals,
                                  iterations=3, delta_f=1e-5,
                                  converged=True)

        self.assertIs(report.mode, SystemMode.REDUCED)
        self.assertEqual(report.duration, self.duration)
        self.assertEqual(report.c3, 1e4)
        self.assertAlmostEqual(report.f00, 1.0)
        self.assertAlmostEqual(report.fidelity, report.tau.real / 2.0)
        self.assertAlmostEqual(report.gate_fidelity,
                               gate_fidelity(finals, targets, self.grid))
        self.assertAlmostEqual(report.concurrence, 0.0)
        self.assertAlmostEqual(report.g2, 3.0)
        self.assertEqual(report.iterations, 3)
        self.assertTrue(report.converged)

    def test_make_gate_report_undefined_phase(self) -> None:
        """Testing make_gate_report with an undefined phase"""
        targets = gate_targets(self.system, self.grid, self.duration)
        finals = self._free_final_states(targets)
        moved = WaveState.zeros(self.system, self.grid)
        moved.amplitudes[1] = targets['00'].initial.amplitudes[0]
        finals[0] = moved

        with self.assertLogs('phasegate.analysis.gate', 'WARNING'):
            report = make_gate_report(self.system, self.grid, targets,
                                      finals)

        self.assertAlmostEqual(report.f00, 0.0)
        self.assertTrue(math.isnan(report.chi))
        self.assertTrue(math.isnan(report.phases.phi_00))

    def test_report_row_and_format(self) -> None:
        """Testing report_row and format_report"""
        targets = gate_targets(self.system, self.grid, self.duration)
        report = make_gate_report(self.system, self.grid, targets,
                                  self._free_final_states(targets))

        row = report_row(report)

        self.assertEqual(list(row), REPORT_COLUMNS)
        self.assertAlmostEqual(row['chi_over_pi'], report.chi / math.pi)
        self.assertAlmostEqual(row['T_fs'], self.duration * 0.02418884,
                               places=4)

        text = format_report(report)
        lines = text.splitlines()

        self.assertEqual(lines[0], 'mode = reduced4plus2')
        self.assertIn('F_gate = %r' % report.gate_fidelity, lines)
        self.assertEqual(lines[-1], 'converged = false')


class SpectrumTests(PhasegateTestCase):
    """Unit tests for phasegate.analysis.spectrum."""

    def setUp(self) -> None:
        super().setUp()

        times = make_time_lattice(400.0, 0.5)
        midpoints = 0.5 * (times[1:] + times[:-1])
        self.field = ControlField(times=times,
                                  amplitude=np.cos(0.5 * midpoints),
                                  carrier_freq=0.5)

    def test_pulse_spectrum_peak(self) -> None:
        """Testing pulse_spectrum peaks at the carrier"""
        spectrum = pulse_spectrum(self.field)

        self.assertAlmostEqual(spectrum.resolution, 2.0 * math.pi / 400.0)
        self.assertAlmostEqual(spectrum.peak_frequency(), 0.5,
                               delta=spectrum.resolution)
        self.assertEqual(len(spectrum.frequencies), 401)

    def test_spectral_support(self) -> None:
        """Testing spectral_support brackets the carrier"""
        spectrum = pulse_spectrum(self.field)

        lower, upper = spectral_support(spectrum, 0.9)

        self.assertLessEqual(lower, 0.5)
        self.assertGreaterEqual(upper, 0.5)
        self.assertLess(upper - lower, 0.5)

    def test_write_table(self) -> None:
        """Testing Spectrum.write_table"""
        spectrum = pulse_spectrum(self.field)
        path = os.path.join(self.make_temp_dir(), 'spectrum.csv')

        spectrum.write_table(path)
        header, rows, _comments = read_table(path)

        self.assertEqual(header, ['freq_cm-1', '|FT(eps)|^2'])
        self.assertEqual(len(rows), 401)


class SpeedLimitTests(PhasegateTestCase):
    """Unit tests for phasegate.analysis.speedlimit."""

    def test_speed_limit_estimates(self) -> None:
        """Testing speed_limit_estimates"""
        limits = speed_limit_estimates(self.build_toy_system())

        self.assertAlmostEqual(limits.interaction_energy, 0.01)
        self.assertAlmostEqual(limits.t_int_rad, 100.0)
        self.assertAlmostEqual(limits.t_int_pi, 100.0 * math.pi)
        self.assertAlmostEqual(limits.t_v, 1000.0)
        self.assertAlmostEqual(limits.overlap, math.exp(-50.0))
        self.assertFalse(limits.interaction_free)

    def test_speed_limit_estimates_distance(self) -> None:
        """Testing speed_limit_estimates at another distance"""
        limits = speed_limit_estimates(self.build_toy_system(), d=50.0)

        self.assertAlmostEqual(limits.interaction_energy, 1e4 / 50.0 ** 3)

    def test_speed_limit_estimates_physical(self) -> None:
        """Testing speed_limit_estimates at the d = 5 nm trap scale"""
        system = self.build_toy_system(
            e1=to_atomic(15210.0, 'cm1', 'energy'),
            e_a=to_atomic(23652.0, 'cm1', 'energy'),
            mass=to_atomic(20.0, 'amu', 'mass'),
            omega=to_atomic(400.0, 'mhz', 'frequency'),
            d=to_atomic(5.0, 'nm', 'length'),
            c3=16.04)
        limits = speed_limit_estimates(system)

        self.assertGreater(from_atomic(limits.interaction_energy, 'cm1'),
                           3.8)
        self.assertLess(from_atomic(limits.interaction_energy, 'cm1'), 4.4)
        self.assertGreater(from_atomic(limits.t_int_rad, 'ps'), 1.1)
        self.assertLess(from_atomic(limits.t_int_rad, 'ps'), 1.45)
        self.assertGreater(from_atomic(limits.t_int_pi, 'ps'), 3.9)
        self.assertLess(from_atomic(limits.t_int_pi, 'ps'), 4.6)
        self.assertGreater(from_atomic(limits.t_v, 'ps'), 300.0)
        self.assertLess(from_atomic(limits.t_v, 'ps'), 1600.0)
        self.assertLess(limits.overlap, 1e-4)

    def test_speed_limit_estimates_with_grid(self) -> None:
        """Testing speed_limit_estimates with a numerical trap gap"""
        limits = speed_limit_estimates(self.build_toy_system(),
                                       grid=self.build_toy_grid(n_points=64))

        self.assertAlmostEqual(limits.trap_gap, 1e-3, delta=1e-6)
        self.assertAlmostEqual(limits.t_v, 1000.0, delta=1.0)

    def test_speed_limit_estimates_no_interaction(self) -> None:
        """Testing speed_limit_estimates without an interaction"""
        system = self.build_toy_system(c3=0.0)

        with self.assertLogs('phasegate.analysis.speedlimit', 'WARNING'):
            limits = speed_limit_estimates(system)

        self.assertTrue(limits.interaction_free)
        self.assertTrue(math.isinf(limits.t_int_pi))


class DynamicsTests(PhasegateTestCase):
    """Unit tests for phasegate.analysis.dynamics."""

    def _record_free_phases(self, system, grid, targets, times):
        hamiltonian = GridHamiltonian(system, grid)
        initial = hamiltonian.pack_many([item.initial
                                         for item in targets.basis])
        recorder = PhaseRecorder(hamiltonian, initial)
        e1 = system.params.e1
        energies = {
            '00': targets.trap_energy,
            '01': e1 + targets.trap_energy,
            '10': e1 + targets.trap_energy,
            '0': 0.0,
        }

        for t in times:
            phases = np.array([cmath.exp(-1j * energies[name] * t)
                               for name in targets.names])
            recorder(t, initial * phases[:, np.newaxis])

        return recorder

    def test_phase_trace_reduced(self) -> None:
        """Testing phase_trace rebuilds two-qubit traces in reduced mode"""
        system = self.build_toy_system()
        grid = self.build_toy_grid(n_points=16)
        targets = gate_targets(system, grid, 100.0)
        times = [0.0, 50.0, 100.0]
        recorder = self._record_free_phases(system, grid, targets, times)
        e0 = targets.trap_energy
        e1 = system.params.e1

        trace = phase_trace(recorder, targets, e1)

        self.assertArrayAlmostEqual(trace.times, times)
        self.assertArrayAlmostEqual(trace.single_qubit['0'], 1.0)
        self.assertArrayAlmostEqual(
            trace.two_qubit['01'],
            np.exp(-1j * (e1 + e0) * np.array(times)))
        self.assertArrayAlmostEqual(
            trace.two_qubit['11'],
            np.exp(-1j * (2.0 * e1 + e0) * np.array(times)))
        self.assertEqual(sorted(trace.two_qubit), ['00', '01', '10', '11'])

    def test_phase_trace_full(self) -> None:
        """Testing phase_trace extracts the single-qubit trace in full mode
        """
        system = self.build_toy_system(mode=SystemMode.FULL8)
        grid = self.build_toy_grid(n_points=16)
        targets = gate_targets(system, grid, 100.0)
        recorder = self._record_free_phases(system, grid, targets,
                                            [0.0, 25.0, 50.0, 75.0, 100.0])

        trace = phase_trace(recorder, targets, system.params.e1, stride=2)

        self.assertArrayAlmostEqual(trace.times, [0.0, 50.0, 100.0])
        self.assertArrayAlmostEqual(trace.single_qubit['0'], 1.0)
        self.assertArrayAlmostEqual(trace.two_qubit['10'],
                                    trace.two_qubit['01'])

    def test_phase_trace_write_table(self) -> None:
        """Testing PhaseTrace.write_table"""
        system = self.build_toy_system()
        grid = self.build_toy_grid(n_points=16)
        targets = gate_targets(system, grid, 100.0)
        recorder = self._record_free_phases(system, grid, targets,
                                            [0.0, 100.0])
        path = os.path.join(self.make_temp_dir(), 'phase_trace.csv')

        phase_trace(recorder, targets, system.params.e1).write_table(path)
        header, rows, _comments = read_table(path)

        self.assertEqual(header, ['t_fs', 'state', 're_tau', 'im_tau',
                                  'abs_tau'])
        self.assertEqual(len(rows), 12)
        self.assertEqual({row[1] for row in rows},
                         {'00', '01', '10', '11', '0', '1'})
        self.assertAlmostEqual(float(rows[0][4]), 1.0)

    def test_population_dynamics(self) -> None:
        """Testing population_dynamics"""
        system = self.build_toy_system()
        grid = self.build_toy_grid(n_points=16)
        targets = gate_targets(system, grid, 100.0)
        hamiltonian = GridHamiltonian(system, grid)
        recorder = PopulationRecorder(hamiltonian)
        vectors = hamiltonian.pack_many([item.initial
                                         for item in targets.basis])

        recorder(0.0, vectors)
        recorder(50.0, vectors)
        dynamics = population_dynamics(recorder, targets)

        self.assertArrayAlmostEqual(dynamics.times, [0.0, 50.0])
        self.assertArrayAlmostEqual(dynamics.pop_00, 1.0)
        self.assertArrayAlmostEqual(dynamics.pop_0, 1.0)
        self.assertArrayAlmostEqual(dynamics.pop_single_excited, 0.0)
