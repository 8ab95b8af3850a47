"""Unit tests for phasegate.krotov."""

from __future__ import annotations

import cmath
import math
import os
from dataclasses import replace

import numpy as np
from kgb import SpyOpReturn, SpyOpReturnInOrder

from phasegate.deprecation import RemovedInPhasegate20Warning
from phasegate.krotov.errors import (FidelityNaNError,
                                     MonotonicityError,
                                     OptimizationError)
from phasegate.krotov.optimize import (KrotovConfig,
                                       _Sweeper,
                                       estimate_alpha,
                                       evaluate_functional,
                                       krotov_optimize)
from phasegate.krotov.pulses import (ControlField,
                                     fluence,
                                     guess_carrier,
                                     load_pulse,
                                     make_guess_pulse,
                                     make_time_lattice,
                                     pulse_area,
                                     save_pulse,
                                     shape_function)
from phasegate.krotov.storage import BackwardStorage
from phasegate.model.channels import SystemMode
from phasegate.model.hamiltonian import GridHamiltonian
from phasegate.model.targets import gate_targets
from phasegate.propagator.recorders import PopulationRecorder
from phasegate.testing.testcases import PhasegateTestCase, slow_test
from phasegate.util.tables import TableError, read_table


class PulsesTests(PhasegateTestCase):
    """Unit tests for phasegate.krotov.pulses."""

    def test_shape_function(self) -> None:
        """Testing shape_function switches on and off smoothly"""
        shape = shape_function(np.array([0.0, 25.0, 50.0, 75.0, 100.0]),
                               100.0)

        self.assertArrayAlmostEqual(shape, [0.0, 0.5, 1.0, 0.5, 0.0])

    def test_make_time_lattice(self) -> None:
        """Testing make_time_lattice"""
        times = make_time_lattice(10.0, 1.0)

        self.assertEqual(len(times), 11)
        self.assertEqual(times[0], 0.0)
        self.assertEqual(times[-1], 10.0)

    def test_make_time_lattice_rounds_steps(self) -> None:
        """Testing make_time_lattice rounds to a whole number of steps"""
        times = make_time_lattice(10.0, 0.3)

        self.assertEqual(len(times), 34)
        self.assertAlmostEqual(times[1] - times[0], 10.0 / 33)

    def test_control_field_wrong_length(self) -> None:
        """Testing ControlField with the wrong number of samples"""
        with self.assertRaisesMessage(OptimizationError,
                                      'needs 10 samples, not 11'):
            ControlField(times=make_time_lattice(10.0, 1.0),
                         amplitude=np.zeros(11))

    def test_control_field_not_finite(self) -> None:
        """Testing ControlField with non-finite samples"""
        amplitude = np.zeros(10)
        amplitude[3] = np.nan

        with self.assertRaisesMessage(OptimizationError, 'not finite'):
            ControlField(times=make_time_lattice(10.0, 1.0),
                         amplitude=amplitude)

    def test_control_field_properties(self) -> None:
        """Testing ControlField lattice properties"""
        field = ControlField(times=make_time_lattice(4.0, 1.0),
                             amplitude=np.array([1.0, 2.0, 3.0, 4.0]))

        self.assertEqual(field.dt, 1.0)
        self.assertEqual(field.duration, 4.0)
        self.assertEqual(field.n_steps, 4)
        self.assertArrayAlmostEqual(field.midpoints, [0.5, 1.5, 2.5, 3.5])
        self.assertArrayAlmostEqual(field.on_lattice(),
                                    [1.0, 1.5, 2.5, 3.5, 4.0])

    def test_control_field_update_shape(self) -> None:
        """Testing ControlField.update_shape pins the first and last samples
        """
        field = ControlField(times=make_time_lattice(10.0, 1.0),
                             amplitude=np.ones(10))
        shape = field.update_shape

        self.assertEqual(shape[0], 0.0)
        self.assertEqual(shape[-1], 0.0)
        self.assertTrue(np.all(shape[1:-1] > 0.0))
        self.assertAlmostEqual(float(np.max(shape)),
                               math.sin(math.pi * 4.5 / 10.0) ** 2)

    def test_with_amplitude(self) -> None:
        """Testing ControlField.with_amplitude keeps the lattice"""
        field = ControlField(times=make_time_lattice(10.0, 1.0),
                             amplitude=np.ones(10),
                             carrier_freq=0.05)

        new_field = field.with_amplitude(np.zeros(10))

        self.assertIs(new_field.times, field.times)
        self.assertEqual(new_field.carrier_freq, 0.05)
        self.assertArrayAlmostEqual(new_field.amplitude, 0.0)
        self.assertArrayAlmostEqual(field.amplitude, 1.0)

    def test_fluence(self) -> None:
        """Testing fluence of a constant field"""
        field = ControlField(times=make_time_lattice(20.0, 0.5),
                             amplitude=np.full(40, 0.1))

        self.assertAlmostEqual(fluence(field), 0.01 * 20.0)

    def test_guess_carrier(self) -> None:
        """Testing guess_carrier"""
        system = self.build_toy_system()

        self.assertAlmostEqual(guess_carrier(system), 0.05)
        self.assertAlmostEqual(guess_carrier(system, detuning=0.01,
                                             carrier_divisor=2),
                               0.03)
        self.assertAlmostEqual(
            guess_carrier(system, compensate_interaction=True),
            0.05 - 1e4 / 100.0 ** 3)

    def test_make_guess_pulse(self) -> None:
        """Testing make_guess_pulse has a 2pi area centered at T/2"""
        system = self.build_toy_system(mu0=0.5)

        field = make_guess_pulse(120.0, 0.0, system, dt=0.5)

        self.assertEqual(field.n_steps, 240)
        self.assertEqual(field.carrier_freq, 0.0)
        self.assertAlmostEqual(pulse_area(field.amplitude, field.dt, 0.5),
                               2.0 * math.pi)
        self.assertIn(int(np.argmax(field.amplitude)), (119, 120))

        # The FWHM is T/6.
        half = field.amplitude >= 0.5 * np.max(field.amplitude)
        self.assertAlmostEqual(np.count_nonzero(half) * field.dt, 20.0,
                               delta=1.0)

    def test_make_guess_pulse_with_carrier(self) -> None:
        """Testing make_guess_pulse oscillates at the carrier"""
        system = self.build_toy_system()

        field = make_guess_pulse(200.0, 0.05, system, dt=1.0)
        envelope = make_guess_pulse(200.0, 0.0, system, dt=1.0)

        self.assertArrayAlmostEqual(
            field.amplitude,
            envelope.amplitude * np.cos(0.05 * field.midpoints))

    def test_make_guess_pulse_invalid(self) -> None:
        """Testing make_guess_pulse with invalid arguments"""
        system = self.build_toy_system()

        with self.assertRaisesMessage(OptimizationError,
                                      'gate duration must be positive'):
            make_guess_pulse(0.0, 0.05, system, dt=1.0)

        with self.assertRaisesMessage(OptimizationError,
                                      'unknown guess pulse kind "square"'):
            make_guess_pulse(10.0, 0.05, system, dt=1.0, kind='square')

    def test_save_load_pulse(self) -> None:
        """Testing save_pulse and load_pulse"""
        field = make_guess_pulse(50.0, 0.05, self.build_toy_system(),
                                 dt=0.5)
        path = os.path.join(self.make_temp_dir(), 'pulse.csv')

        save_pulse(path, field, comments=['seed: 0'])
        loaded = load_pulse(path)
        header, rows, comments = read_table(path)

        self.assertEqual(header, ['t_fs', 'epsilon'])
        self.assertEqual(len(rows), 100)
        self.assertEqual(comments[0], 'seed: 0')
        self.assertEqual(loaded.n_steps, 100)
        self.assertEqual(loaded.duration, 50.0)
        self.assertEqual(loaded.carrier_freq, 0.05)
        self.assertArrayAlmostEqual(loaded.amplitude, field.amplitude,
                                    atol=0.0)

    def test_load_pulse_without_header(self) -> None:
        """Testing load_pulse with a table missing its lattice"""
        path = os.path.join(self.make_temp_dir(), 'pulse.csv')

        with open(path, 'w') as fp:
            fp.write('t_fs,epsilon\n0.1,0.0\n')

        with self.assertRaisesMessage(TableError,
                                      'missing its lattice header'):
            load_pulse(path)


class BackwardStorageTests(PhasegateTestCase):
    """Unit tests for phasegate.krotov.storage.BackwardStorage."""

    def _fill(
        self,
        budget_bytes: float,
    ) -> BackwardStorage:
        storage = BackwardStorage(10, (1,), budget_bytes)
        self.back_steps = []

        def _back_step(vectors, k):
            self.back_steps.append(k)

            return vectors + 1.0

        storage.fill(np.zeros(1, dtype=complex), _back_step)

        return storage

    def test_full_storage(self) -> None:
        """Testing BackwardStorage keeps every point within the budget"""
        storage = self._fill(1e6)

        self.assertEqual(storage.stride, 1)
        self.assertEqual(self.back_steps, list(range(9, -1, -1)))

        for k in range(11):
            self.assertArrayAlmostEqual(storage[k], [10 - k])

        self.assertEqual(len(self.back_steps), 10)

    def test_strided_storage(self) -> None:
        """Testing BackwardStorage re-propagates between checkpoints over
        the budget
        """
        with self.assertLogs('phasegate.krotov.storage', 'WARNING'):
            storage = self._fill(64)

        self.assertEqual(storage.stride, 6)

        for k in range(11):
            self.assertArrayAlmostEqual(storage[k], [10 - k])

        # One backward pass, then each segment once.
        self.assertEqual(len(self.back_steps), 10 + 5 + 3)


class OptimizeTests(PhasegateTestCase):
    """Unit tests for phasegate.krotov.optimize."""

    def setUp(self) -> None:
        super().setUp()

        self.system = self.build_toy_system()
        self.grid = self.build_toy_grid(n_points=16)
        self.targets = gate_targets(self.system, self.grid, 200.0)
        self.guess = make_guess_pulse(200.0, 0.05, self.system, dt=1.0)

    def _optimize(self, **kwargs) -> object:
        kwargs.setdefault('config', KrotovConfig(alpha=10.0,
                                                 max_iterations=2,
                                                 convergence_delta_f=-1.0))

        return krotov_optimize(system=self.system,
                               grid=self.grid,
                               targets=self.targets,
                               guess=self.guess,
                               **kwargs)

    def test_krotov_config_validate(self) -> None:
        """Testing KrotovConfig.validate"""
        with self.assertRaisesMessage(OptimizationError,
                                      'alpha must be positive'):
            KrotovConfig(alpha=0.0).validate()

        with self.assertRaisesMessage(OptimizationError,
                                      'max_iterations must not be negative'):
            KrotovConfig(max_iterations=-1).validate()

        with self.assertRaisesMessage(OptimizationError,
                                      'record_stride must be at least 1'):
            KrotovConfig(record_stride=0).validate()

    def test_krotov_optimize_positional_arguments(self) -> None:
        """Testing krotov_optimize with positional arguments warns"""
        config = KrotovConfig(alpha=10.0, max_iterations=0)

        with self.assertWarns(RemovedInPhasegate20Warning):
            record = krotov_optimize(self.system, self.grid, self.targets,
                                     self.guess, config)

        self.assertEqual(record.n_iterations, 0)

    def test_evaluate_functional_at_targets(self) -> None:
        """Testing evaluate_functional with final states at the targets"""
        finals = [item.target for item in self.targets.basis]

        functional, fidelity = evaluate_functional(
            finals, self.targets, self.guess, self.guess, 1.0,
            grid=self.grid)

        self.assertAlmostEqual(fidelity, 1.0)
        self.assertAlmostEqual(functional, -1.0)

    def test_evaluate_functional_running_cost(self) -> None:
        """Testing evaluate_functional adds the cost of the field update"""
        finals = [item.target for item in self.targets.basis]
        amplitude = self.guess.amplitude.copy()
        amplitude[100] += 0.01
        new_field = self.guess.with_amplitude(amplitude)
        shape = new_field.update_shape[100]

        functional, fidelity = evaluate_functional(
            finals, self.targets, self.guess, new_field, 2.0,
            grid=self.grid)

        self.assertAlmostEqual(fidelity, 1.0)
        self.assertAlmostEqual(functional, -1.0 + 2.0 / shape * 1e-4)

    def test_evaluate_functional_uniform_phase_error(self) -> None:
        """Testing evaluate_functional with a uniform phase error on every
        target gives F = cos(delta)
        """
        full_system = self.build_toy_system(SystemMode.FULL8)

        for targets in (self.targets,
                        gate_targets(full_system, self.grid, 200.0)):
            finals = [item.target for item in targets.basis]

            for delta in (0.1, 1.0, 2.5):
                functional, fidelity = evaluate_functional(
                    finals, targets.phase_shifted(delta), self.guess,
                    self.guess, 1.0, grid=self.grid)

                self.assertAlmostEqual(fidelity, math.cos(delta))
                self.assertAlmostEqual(functional, -math.cos(delta))

    def test_krotov_optimize_monotonic(self) -> None:
        """Testing krotov_optimize decreases J every iteration"""
        record = self._optimize()

        self.assertEqual(record.n_iterations, 2)
        self.assertEqual(record.alpha, 10.0)
        self.assertFalse(record.converged)
        self.assertEqual([info.iteration for info in record.iterations],
                         [0, 1, 2])

        functionals = [info.functional for info in record.iterations]

        for previous, current in zip(functionals, functionals[1:]):
            self.assertLessEqual(current, previous + 1e-10)

        self.assertGreaterEqual(record.final.fidelity,
                                record.iterations[0].fidelity)
        self.assertEqual(record.field.n_steps, self.guess.n_steps)
        self.assertEqual(len(record.final_states), 2)
        self.assertEqual(record.final_states[0].time_tag, 200.0)

    def test_krotov_optimize_keeps_pulse_ends(self) -> None:
        """Testing krotov_optimize never updates the first and last samples
        """
        record = self._optimize()

        self.assertEqual(record.field.amplitude[0], self.guess.amplitude[0])
        self.assertEqual(record.field.amplitude[-1],
                         self.guess.amplitude[-1])

    def test_krotov_optimize_no_iterations(self) -> None:
        """Testing krotov_optimize with max_iterations = 0"""
        self.spy_on(BackwardStorage.fill, owner=BackwardStorage)

        record = self._optimize(config=KrotovConfig(alpha=10.0,
                                                    max_iterations=0))

        self.assertEqual(record.n_iterations, 0)
        self.assertIs(record.field, self.guess)
        self.assertAlmostEqual(record.iterations[0].fluence_ratio, 1.0)
        self.assertSpyNotCalled(BackwardStorage.fill)

    def test_krotov_optimize_backward_per_iteration(self) -> None:
        """Testing krotov_optimize propagates backward once per iteration"""
        self.spy_on(BackwardStorage.fill, owner=BackwardStorage)

        self._optimize(config=KrotovConfig(alpha=10.0,
                                           max_iterations=3,
                                           convergence_delta_f=-1.0))

        self.assertSpyCallCount(BackwardStorage.fill, 3)

    def test_krotov_optimize_converges(self) -> None:
        """Testing krotov_optimize stops when the fidelity gain is small"""
        record = self._optimize(config=KrotovConfig(alpha=10.0,
                                                    max_iterations=5,
                                                    convergence_delta_f=1.0))

        self.assertTrue(record.converged)
        self.assertEqual(record.n_iterations, 1)

    def test_krotov_optimize_recorders(self) -> None:
        """Testing krotov_optimize leaves the last sweep in the recorders"""
        recorder = PopulationRecorder(GridHamiltonian(self.system,
                                                      self.grid))

        record = self._optimize(
            config=KrotovConfig(alpha=10.0,
                                max_iterations=1,
                                record_stride=50,
                                convergence_delta_f=-1.0),
            recorders=[recorder])

        self.assertEqual(record.recorders, [recorder])
        self.assertEqual(recorder.times, [0.0, 50.0, 100.0, 150.0, 200.0])
        self.assertAlmostEqual(float(recorder.populations[-1][0].sum()),
                               1.0, places=6)

    def test_krotov_optimize_continue_from(self) -> None:
        """Testing krotov_optimize resumes from a previous field"""
        first = self._optimize()

        record = self._optimize(continue_from=first.field)

        self.assertAlmostEqual(record.iterations[0].fidelity,
                               first.final.fidelity, places=10)
        self.assertGreater(record.iterations[0].fluence_ratio, 0.0)

    def test_krotov_optimize_continue_from_mismatch(self) -> None:
        """Testing krotov_optimize with a field on another lattice"""
        other = make_guess_pulse(100.0, 0.05, self.system, dt=1.0)

        with self.assertRaisesMessage(OptimizationError,
                                      'not on the lattice of the guess'):
            self._optimize(continue_from=other)

    def test_krotov_optimize_monotonicity_error(self) -> None:
        """Testing krotov_optimize when J increases"""
        self.spy_on(_Sweeper.tau, owner=_Sweeper,
                    op=SpyOpReturnInOrder([2.0 + 0j, 0.0 + 0j]))

        with self.assertRaises(MonotonicityError) as cm:
            self._optimize()

        self.assertEqual(cm.exception.iteration, 1)
        self.assertAlmostEqual(cm.exception.previous, -1.0)
        self.assertGreaterEqual(cm.exception.current, 0.0)

    def test_krotov_optimize_fidelity_nan(self) -> None:
        """Testing krotov_optimize when the fidelity is NaN"""
        self.spy_on(_Sweeper.tau, owner=_Sweeper,
                    op=SpyOpReturn(complex(float('nan'), 0.0)))

        with self.assertRaises(FidelityNaNError):
            self._optimize()

    def test_write_convergence(self) -> None:
        """Testing OptimizationRecord.write_convergence"""
        record = self._optimize()
        path = os.path.join(self.make_temp_dir(), 'convergence.csv')

        record.write_convergence(path, comments=['seed: 0'])
        header, rows, comments = read_table(path)

        self.assertEqual(header, ['iteration', 'J', 'F', 'delta_F',
                                  'fluence_ratio'])
        self.assertEqual([row[0] for row in rows], ['0', '1', '2'])
        self.assertEqual(comments, ['seed: 0'])

    def test_estimate_alpha(self) -> None:
        """Testing estimate_alpha scales with the requested update"""
        alpha = estimate_alpha(system=self.system,
                               grid=self.grid,
                               targets=self.targets,
                               guess=self.guess)
        doubled = estimate_alpha(system=self.system,
                                 grid=self.grid,
                                 targets=self.targets,
                                 guess=self.guess,
                                 fraction=0.1)

        self.assertGreater(alpha, 0.0)
        self.assertAlmostEqual(doubled, 0.5 * alpha)

    def test_estimate_alpha_zero_guess(self) -> None:
        """Testing estimate_alpha with a zero guess"""
        guess = self.guess.with_amplitude(np.zeros(self.guess.n_steps))

        with self.assertLogs('phasegate.krotov.optimize', 'WARNING'):
            alpha = estimate_alpha(system=self.system,
                                   grid=self.grid,
                                   targets=self.targets,
                                   guess=guess)

        self.assertEqual(alpha, 1.0)

    def test_krotov_optimize_estimates_alpha(self) -> None:
        """Testing krotov_optimize estimates alpha when not configured"""
        record = self._optimize(config=KrotovConfig(max_iterations=1,
                                                    convergence_delta_f=-1.0))

        self.assertGreater(record.alpha, 0.0)
        self.assertEqual(record.n_iterations, 1)

    def test_krotov_optimize_update_scales_inverse_alpha(self) -> None:
        """Testing krotov_optimize first update shrinks as 1/alpha"""
        updates = []

        for alpha in (1e5, 2e5):
            record = self._optimize(
                config=KrotovConfig(alpha=alpha,
                                    max_iterations=1,
                                    convergence_delta_f=-1.0))
            updates.append(np.linalg.norm(record.field.amplitude -
                                          self.guess.amplitude))

        self.assertGreater(updates[1], 0.0)
        self.assertAlmostEqual(updates[0] / updates[1], 2.0, places=2)

    @slow_test
    def test_krotov_optimize_two_level_phase_target(self) -> None:
        """Testing krotov_optimize reaches a two-level phase target"""
        duration = 400.0
        targets = gate_targets(self.system, self.grid, duration)
        atom = targets['0']

        # The guess cycles |0> back with a sign flip, 0.5 rad off target.
        targets = replace(
            targets,
            basis=(replace(atom,
                           target=atom.initial.scaled(
                               cmath.exp(1j * (math.pi + 0.5)))),),
            n_functional=1)

        record = krotov_optimize(
            system=self.system,
            grid=self.grid,
            targets=targets,
            guess=make_guess_pulse(duration, 0.05, self.system, dt=1.0),
            config=KrotovConfig(alpha=10.0,
                                max_iterations=200,
                                convergence_delta_f=1e-7))
        functionals = [info.functional for info in record.iterations]

        self.assertLessEqual(record.n_iterations, 200)
        self.assertGreater(record.final.fidelity, 0.999)

        for previous, current in zip(functionals, functionals[1:]):
            self.assertLessEqual(current, previous + 1e-10)
