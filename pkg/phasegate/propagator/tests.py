"""Unit tests for phasegate.propagator."""

from __future__ import annotations

import cmath
import math
import os

import numpy as np
import scipy.linalg

from phasegate.grid.eigen import displaced_ground_state
from phasegate.krotov.pulses import ControlField, make_time_lattice
from phasegate.model.hamiltonian import GridHamiltonian, WaveState
from phasegate.model.targets import initial_states, trap_ground_state
from phasegate.propagator.chebychev import (ChebychevPropagator,
                                            PropagatorConfig,
                                            chebychev_coefficients,
                                            estimate_spectral_range,
                                            propagate,
                                            propagate_vectors,
                                            step)
from phasegate.propagator.errors import (ChebychevConvergenceError,
                                         PropagationError,
                                         UnitarityLossError)
from phasegate.propagator.recorders import (PhaseRecorder,
                                            PopulationRecorder,
                                            TrajectoryRecorder,
                                            load_checkpoint,
                                            save_checkpoint)
from phasegate.testing.testcases import PhasegateTestCase, slow_test
from phasegate.util.tables import TableError, read_table


def _constant_field(
    duration: float,
    value: float,
    dt: float = 1.0,
) -> ControlField:
    times = make_time_lattice(duration, dt)

    return ControlField(times=times,
                        amplitude=np.full(len(times) - 1, value))


class ChebychevTests(PhasegateTestCase):
    """Unit tests for phasegate.propagator.chebychev."""

    def setUp(self) -> None:
        super().setUp()

        self.system = self.build_toy_system()
        self.grid = self.build_toy_grid(n_points=16)
        self.hamiltonian = GridHamiltonian(self.system, self.grid)
        self.config = PropagatorConfig(dt=1.0)
        self.states = initial_states(self.system, self.grid)

    def test_chebychev_coefficients_zero(self) -> None:
        """Testing chebychev_coefficients with alpha = 0"""
        self.assertArrayAlmostEqual(chebychev_coefficients(0.0), [1.0])

    def test_chebychev_coefficients_series(self) -> None:
        """Testing chebychev_coefficients sum to the propagator at the top
        of the spectrum
        """
        alpha = 25.0
        coefficients = chebychev_coefficients(alpha, tolerance=1e-14)
        phases = (-1j) ** np.arange(len(coefficients))

        self.assertGreater(len(coefficients), alpha)
        self.assertAlmostEqual(complex(np.sum(coefficients * phases)),
                               cmath.exp(-1j * alpha),
                               places=12)

    def test_chebychev_coefficients_max_order(self) -> None:
        """Testing chebychev_coefficients with too small a maximum order"""
        with self.assertRaises(ChebychevConvergenceError) as cm:
            chebychev_coefficients(100.0, max_order=50)

        self.assertEqual(cm.exception.max_order, 50)
        self.assertEqual(str(cm.exception),
                         'the Chebychev series did not converge within 50 '
                         'orders.')

    def test_estimate_spectral_range_bounds_spectrum(self) -> None:
        """Testing estimate_spectral_range covers the exact spectrum"""
        spectral_range = estimate_spectral_range(self.system, self.grid,
                                                 0.05)
        matrix = self.hamiltonian.dense_matrix(0.05)
        energies = np.linalg.eigvals(matrix).real

        self.assertLess(spectral_range.e_min, energies.min())
        self.assertGreater(spectral_range.e_max, energies.max())
        self.assertEqual(spectral_range.max_field, 0.05)

    def test_step_matches_exponential(self) -> None:
        """Testing ChebychevPropagator.step against the matrix exponential
        """
        propagator = ChebychevPropagator(self.hamiltonian, self.config)
        vectors = self.hamiltonian.pack_many(list(self.states.values()))
        exact = scipy.linalg.expm(
            -1j * 2.0 * self.hamiltonian.dense_matrix(0.02))

        result = propagator.step(vectors, 0.02, 2.0)

        self.assertArrayAlmostEqual(result, vectors @ exact.T, atol=1e-10)
        self.assertGreater(propagator.last_order, 1)

    def test_step_order_halves_with_time_step(self) -> None:
        """Testing ChebychevPropagator.step needs about half the order for
        half the time step
        """
        propagator = ChebychevPropagator(self.hamiltonian, self.config)
        vectors = self.hamiltonian.pack_many([self.states['00']])
        dt = 400.0 / propagator.spectral_range.half_width

        propagator.step(vectors, 0.0, dt)
        order = propagator.last_order
        propagator.step(vectors, 0.0, 0.5 * dt)
        ratio = propagator.last_order / order

        self.assertGreaterEqual(ratio, 0.4)
        self.assertLessEqual(ratio, 0.6)

    def test_step_widens_range(self) -> None:
        """Testing ChebychevPropagator.step widens the spectral range for
        larger fields
        """
        propagator = ChebychevPropagator(self.hamiltonian, self.config)
        initial_width = propagator.spectral_range.half_width

        propagator.step(self.hamiltonian.pack(self.states['00']), 0.1, 1.0)

        self.assertGreater(propagator.spectral_range.half_width,
                           initial_width)
        self.assertAlmostEqual(propagator.spectral_range.max_field, 0.125)

    def test_step_backward_inverts_forward(self) -> None:
        """Testing step backward undoes step forward"""
        state = self.states['00']

        forward = step(self.hamiltonian, state, 0.03, self.config)
        restored = step(self.hamiltonian, forward, 0.03, self.config,
                        backward=True)

        self.assertEqual(forward.time_tag, 1.0)
        self.assertEqual(restored.time_tag, 0.0)
        self.assertArrayAlmostEqual(restored.amplitudes, state.amplitudes,
                                    atol=1e-10)

    def test_propagate_free_ground_state(self) -> None:
        """Testing propagate without a field only changes the phase of the
        trap ground state
        """
        energy, _ground = trap_ground_state(self.system, self.grid)
        field = _constant_field(50.0, 0.0)
        state = self.states['00']

        final = propagate(self.hamiltonian, state, field, config=self.config)

        self.assertEqual(final.time_tag, 50.0)
        self.assertAlmostEqual(state.overlap(final, self.grid),
                               cmath.exp(-1j * energy * 50.0),
                               places=9)

    def test_propagate_two_level_rabi(self) -> None:
        """Testing propagate on the two-level atom under a constant field"""
        field = _constant_field(20.0, 0.01)
        state = self.states['0']
        levels = np.array([[0.0, 0.01],
                           [0.01, self.system.params.e_a]])
        exact = scipy.linalg.expm(-1j * 20.0 * levels) @ [1.0, 0.0]

        final = propagate(self.hamiltonian, state, field, config=self.config)

        self.assertArrayAlmostEqual(final.levels, exact, atol=1e-10)
        self.assertArrayAlmostEqual(final.amplitudes, 0.0)

    def test_propagate_two_level_rabi_hundred_periods(self) -> None:
        """Testing propagate on the two-level atom over a hundred Rabi
        periods
        """
        e_a = self.system.params.e_a
        period = 2.0 * math.pi / math.hypot(e_a, 0.02)
        field = _constant_field(100.0 * period, 0.01, dt=period)
        levels = np.array([[0.0, 0.01],
                           [0.01, e_a]])
        exact = scipy.linalg.expm(-1j * 100.0 * period * levels) @ [1.0, 0.0]

        final = propagate(self.hamiltonian, self.states['0'], field,
                          config=PropagatorConfig(dt=period))

        self.assertArrayAlmostEqual(final.levels, exact, atol=1e-10)

    def test_propagate_conserves_norm(self) -> None:
        """Testing propagate conserves the norm of every basis state"""
        field = _constant_field(30.0, 0.05)

        finals = propagate(self.hamiltonian, list(self.states.values()),
                           field, config=self.config)

        self.assertEqual(len(finals), 2)

        for final in finals:
            self.assertAlmostEqual(final.norm(self.grid), 1.0, places=10)

    def test_propagate_coherent_state_oscillates_at_trap_frequency(
        self,
    ) -> None:
        """Testing propagate moves a displaced trap ground state back and
        forth at the trap frequency
        """
        params = self.system.params
        grid = self.build_toy_grid()
        hamiltonian = GridHamiltonian(self.system, grid)
        period = 2.0 * math.pi / params.omega
        dt = period / 128
        state = WaveState.zeros(self.system, grid)
        state.amplitudes[0] = displaced_ground_state(grid, params.mass,
                                                     params.omega,
                                                     params.d + 10.0)
        recorder = TrajectoryRecorder(hamiltonian)

        propagate(hamiltonian, state, _constant_field(period, 0.0, dt=dt),
                  config=PropagatorConfig(dt=dt),
                  recorder=recorder,
                  record_stride=32)

        centers = [
            float(np.sum(grid.step_weights * grid.points *
                         np.abs(snapshot.amplitudes[0]) ** 2))
            for snapshot in recorder.states(0)
        ]

        self.assertEqual(len(centers), 5)
        self.assertArrayAlmostEqual(
            centers,
            params.d + 10.0 * np.cos(params.omega *
                                     np.array(recorder.times)),
            atol=1e-4)

    @slow_test
    def test_propagate_norm_drift_hundred_thousand_steps(self) -> None:
        """Testing propagate keeps the norm over a hundred thousand steps"""
        field = _constant_field(1e5, 0.01)

        finals = propagate(self.hamiltonian, list(self.states.values()),
                           field, config=self.config)

        self.assertEqual(field.n_steps, 100000)

        for final in finals:
            self.assertLess(abs(final.norm(self.grid) - 1.0), 1e-8)

    def test_propagate_backward(self) -> None:
        """Testing propagate backward returns to the initial state"""
        field = _constant_field(20.0, 0.02)
        state = self.states['00']

        final = propagate(self.hamiltonian, state, field, config=self.config)
        restored = propagate(self.hamiltonian, final, field,
                             config=self.config, direction='backward')

        self.assertEqual(restored.time_tag, 0.0)
        self.assertArrayAlmostEqual(restored.amplitudes, state.amplitudes,
                                    atol=1e-9)

    def test_propagate_invalid_direction(self) -> None:
        """Testing propagate with an unknown direction"""
        with self.assertRaisesMessage(PropagationError,
                                      'unknown propagation direction'):
            propagate(self.hamiltonian, self.states['00'],
                      _constant_field(5.0, 0.0), config=self.config,
                      direction='sideways')

    def test_propagate_time_step_mismatch(self) -> None:
        """Testing propagate with a field on another time step"""
        with self.assertRaisesMessage(PropagationError, 'does not match the '
                                                        'configured time '
                                                        'step'):
            propagate(self.hamiltonian, self.states['00'],
                      _constant_field(5.0, 0.0, dt=0.5), config=self.config)

    def test_propagate_unitarity_loss(self) -> None:
        """Testing propagate aborts when the norm drifts"""
        self.spy_on(ChebychevPropagator.step,
                    owner=ChebychevPropagator,
                    call_fake=lambda self, vectors, field_value, dt:
                        1.01 * vectors)

        with self.assertRaises(UnitarityLossError) as cm:
            propagate(self.hamiltonian, self.states['00'],
                      _constant_field(5.0, 0.0), config=self.config)

        self.assertAlmostEqual(cm.exception.norm, 1.01)
        self.assertEqual(cm.exception.time, 1.0)
        self.assertSpyCallCount(ChebychevPropagator.step, 1)

    def test_propagate_vectors_recorder_stride(self) -> None:
        """Testing propagate_vectors calls the recorder at the start, every
        stride and the end
        """
        propagator = ChebychevPropagator(self.hamiltonian, self.config)
        recorder = TrajectoryRecorder(self.hamiltonian)
        vectors = self.hamiltonian.pack_many([self.states['00']])

        propagate_vectors(propagator, vectors, _constant_field(10.0, 0.0),
                          recorder=recorder, record_stride=4)

        self.assertEqual(recorder.times, [0.0, 4.0, 8.0, 10.0])
        self.assertEqual(len(recorder.states(0)), 4)
        self.assertEqual(recorder.states(0)[2].time_tag, 8.0)

    def test_propagate_vectors_backward_recorder(self) -> None:
        """Testing propagate_vectors records backward propagation from T"""
        propagator = ChebychevPropagator(self.hamiltonian, self.config)
        recorder = TrajectoryRecorder(self.hamiltonian)
        vectors = self.hamiltonian.pack_many([self.states['00']])

        propagate_vectors(propagator, vectors, _constant_field(4.0, 0.0),
                          direction='backward', recorder=recorder,
                          record_stride=2)

        self.assertEqual(recorder.times, [4.0, 2.0, 0.0])

    def test_propagate_shared_spectral_range(self) -> None:
        """Testing propagate uses a given spectral range without estimating
        """
        spectral_range = estimate_spectral_range(self.system, self.grid,
                                                 1.0)
        self.spy_on(estimate_spectral_range)

        propagate(self.hamiltonian, self.states['00'],
                  _constant_field(5.0, 0.01), config=self.config,
                  spectral_range=spectral_range)

        self.assertSpyNotCalled(estimate_spectral_range)

    def test_propagator_config_validate(self) -> None:
        """Testing PropagatorConfig.validate"""
        with self.assertRaisesMessage(PropagationError, 'time step must be '
                                                        'positive'):
            PropagatorConfig(dt=0.0).validate()

        with self.assertRaisesMessage(PropagationError, 'tolerance'):
            PropagatorConfig(dt=1.0, tolerance=0.1).validate()


class RecorderTests(PhasegateTestCase):
    """Unit tests for phasegate.propagator.recorders."""

    def setUp(self) -> None:
        super().setUp()

        self.system = self.build_toy_system()
        self.grid = self.build_toy_grid()
        self.hamiltonian = GridHamiltonian(self.system, self.grid)
        self.states = initial_states(self.system, self.grid)
        self.vectors = self.hamiltonian.pack_many(list(self.states.values()))

    def test_population_recorder(self) -> None:
        """Testing PopulationRecorder"""
        _energy, ground = trap_ground_state(self.system, self.grid)
        recorder = PopulationRecorder(self.hamiltonian, reference=ground)

        recorder(0.0, self.vectors)

        self.assertEqual(recorder.columns,
                         ['pop_00', 'pop_0a', 'pop_a0', 'pop_aa', 'pop_0',
                          'pop_a'])
        self.assertArrayAlmostEqual(recorder.populations[0],
                                    [[1, 0, 0, 0, 0, 0],
                                     [0, 0, 0, 0, 1, 0]],
                                    atol=1e-12)
        self.assertAlmostEqual(complex(recorder.projections[0][0, 0]), 1.0)

        recorder.reset()

        self.assertEqual(recorder.times, [])
        self.assertEqual(recorder.populations, [])

    def test_population_recorder_boundary_warning(self) -> None:
        """Testing PopulationRecorder warns once when a state reaches the
        grid edge
        """
        recorder = PopulationRecorder(self.hamiltonian)
        state = WaveState.zeros(self.system, self.grid)
        state.amplitudes[0, 0] = 1.0 / math.sqrt(self.grid.step_weights[0])
        vectors = self.hamiltonian.pack_many([state])

        with self.assertLogs('phasegate.propagator.recorders',
                             'WARNING') as logs:
            recorder(0.0, vectors)
            recorder(1.0, vectors)

        self.assertEqual(len(logs.records), 1)

    def test_population_recorder_write_tables(self) -> None:
        """Testing PopulationRecorder.write_table and write_channel_table"""
        _energy, ground = trap_ground_state(self.system, self.grid)
        recorder = PopulationRecorder(self.hamiltonian, reference=ground)
        recorder(0.0, self.vectors)
        recorder(10.0, self.vectors)
        temp_dir = self.make_temp_dir()

        path = os.path.join(temp_dir, 'populations.csv')
        recorder.write_table(path, 0, comments=['config-hash: abc'])
        header, rows, comments = read_table(path)

        self.assertEqual(header, ['t_fs', 'pop_00', 'pop_0a', 'pop_a0',
                                  'pop_aa', 'pop_0', 'pop_a', 'norm'])
        self.assertEqual(len(rows), 2)
        self.assertAlmostEqual(float(rows[0][-1]), 1.0)
        self.assertEqual(comments, ['config-hash: abc'])

        path = os.path.join(temp_dir, 'channels.csv')
        recorder.write_channel_table(path, 0)
        header, rows, _comments = read_table(path)

        self.assertEqual(header, ['t_fs', 'channel', 'population',
                                  'phase_rad'])
        self.assertEqual(len(rows), 8)
        self.assertEqual([row[1] for row in rows[:4]],
                         ['00', '0a', 'a0', 'aa'])
        self.assertAlmostEqual(float(rows[0][3]), 0.0)

    def test_phase_recorder(self) -> None:
        """Testing PhaseRecorder records overlaps with the references"""
        recorder = PhaseRecorder(self.hamiltonian, self.vectors)

        recorder(0.0, self.vectors)
        recorder(1.0, 1j * self.vectors)

        self.assertArrayAlmostEqual(recorder.as_array(),
                                    [[1.0, 1.0], [1j, 1j]],
                                    atol=1e-12)

    def test_save_load_checkpoint(self) -> None:
        """Testing save_checkpoint and load_checkpoint"""
        state = self.states['00'].scaled(cmath.exp(0.7j))
        state.time_tag = 12.5
        path = os.path.join(self.make_temp_dir(), 'checkpoint.csv')

        save_checkpoint(path, state)
        loaded = load_checkpoint(path)

        self.assertEqual(loaded.time_tag, 12.5)
        self.assertEqual(loaded.amplitudes.shape, (4, 32))
        self.assertArrayAlmostEqual(loaded.amplitudes, state.amplitudes,
                                    atol=0.0)
        self.assertArrayAlmostEqual(loaded.levels, state.levels, atol=0.0)

    def test_load_checkpoint_without_header(self) -> None:
        """Testing load_checkpoint with a table missing its layout"""
        path = os.path.join(self.make_temp_dir(), 'checkpoint.csv')

        with open(path, 'w') as fp:
            fp.write('index,re,im\n0,1.0,0.0\n')

        with self.assertRaisesMessage(TableError, 'missing its layout'):
            load_checkpoint(path)
