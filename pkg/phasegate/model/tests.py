"""Unit tests for phasegate.model."""

from __future__ import annotations

import cmath
import math

import numpy as np

from phasegate.krotov.pulses import guess_carrier, make_guess_pulse
from phasegate.model.channels import (ChannelLabel,
                                      FULL_CHANNELS,
                                      SystemMode,
                                      build_calcium_like_system,
                                      build_dipole_system,
                                      inverse_cube_potential,
                                      reduce_system,
                                      tabulated_potential)
from phasegate.model.errors import ModelError
from phasegate.model.hamiltonian import (GridHamiltonian,
                                         WaveState,
                                         apply_hamiltonian,
                                         channel_populations)
from phasegate.model.targets import (gate_targets,
                                     initial_states,
                                     trap_ground_state)
from phasegate.propagator.chebychev import PropagatorConfig, propagate
from phasegate.testing.testcases import PhasegateTestCase, TOY_PARAMS


class ChannelTests(PhasegateTestCase):
    """Unit tests for phasegate.model.channels."""

    def test_channel_label_parse(self) -> None:
        """Testing ChannelLabel.parse"""
        label = ChannelLabel.parse('|0a>')

        self.assertEqual(label, ChannelLabel('0', 'a'))
        self.assertEqual(label.key, '0a')
        self.assertEqual(str(label), '|0a>')

    def test_channel_label_parse_invalid(self) -> None:
        """Testing ChannelLabel.parse with malformed labels"""
        with self.assertRaisesMessage(ModelError, 'not a two-atom channel'):
            ChannelLabel.parse('0a1')

        with self.assertRaisesMessage(ModelError, 'unknown single-atom '
                                                  'level "b"'):
            ChannelLabel.parse('0b')

    def test_channel_label_transition_to(self) -> None:
        """Testing ChannelLabel.transition_to"""
        ground = ChannelLabel.parse('00')

        self.assertEqual(ground.transition_to(ChannelLabel.parse('0a')),
                         frozenset({'0', 'a'}))
        self.assertEqual(ground.transition_to(ChannelLabel.parse('10')),
                         frozenset({'0', '1'}))
        self.assertIsNone(ground.transition_to(ChannelLabel.parse('aa')))
        self.assertIsNone(ground.transition_to(ground))

    def test_build_calcium_like_system_channels(self) -> None:
        """Testing build_calcium_like_system channel layout"""
        system = build_calcium_like_system(TOY_PARAMS)

        self.assertIs(system.mode, SystemMode.FULL8)
        self.assertEqual([label.key for label in system.labels],
                         ['00', '0a', 'a0', 'aa', '01', 'a1', '10', '1a'])
        self.assertEqual(system.n_levels, 0)

    def test_build_calcium_like_system_couplings(self) -> None:
        """Testing build_calcium_like_system only couples 0 <-> a"""
        system = build_calcium_like_system(TOY_PARAMS)
        matrix = system.coupling_matrix()
        pairs = {
            frozenset({system.labels[i].key, system.labels[j].key})
            for i, j in zip(*np.nonzero(matrix))
        }

        self.assertArrayAlmostEqual(matrix, matrix.T)
        self.assertEqual(pairs, {
            frozenset({'00', '0a'}),
            frozenset({'00', 'a0'}),
            frozenset({'0a', 'aa'}),
            frozenset({'a0', 'aa'}),
            frozenset({'01', 'a1'}),
            frozenset({'10', '1a'}),
        })
        self.assertEqual(set(matrix[np.nonzero(matrix)]), {TOY_PARAMS.mu0})

    def test_build_calcium_like_system_potentials(self) -> None:
        """Testing build_calcium_like_system channel potentials"""
        system = build_calcium_like_system(TOY_PARAMS)
        d = TOY_PARAMS.d
        r = np.array([d])

        def _potential(key):
            channel = system.channels[system.index_of(
                ChannelLabel.parse(key))]

            return float(channel.total_potential(r)[0])

        self.assertAlmostEqual(_potential('00'), 0.0)
        self.assertAlmostEqual(_potential('0a'),
                               TOY_PARAMS.e_a - TOY_PARAMS.c3 / d ** 3)
        self.assertAlmostEqual(_potential('a0'), _potential('0a'))
        self.assertAlmostEqual(_potential('aa'), 2.0 * TOY_PARAMS.e_a)
        self.assertAlmostEqual(_potential('01'), TOY_PARAMS.e1)
        self.assertAlmostEqual(_potential('a1'),
                               TOY_PARAMS.e_a + TOY_PARAMS.e1)

    def test_build_calcium_like_system_invalid(self) -> None:
        """Testing build_calcium_like_system with E_a below E_1"""
        params = self.build_toy_params(e_a=0.01)

        with self.assertRaisesMessage(ModelError, 'must exceed E_1'):
            build_calcium_like_system(params)

    def test_build_dipole_system(self) -> None:
        """Testing build_dipole_system matches the calcium-like layout"""
        params = self.build_toy_params(c3=5e3)
        system = build_dipole_system(params)

        self.assertEqual(system.labels, list(FULL_CHANNELS))
        self.assertEqual(system.params.interaction_energy, 5e-3)

    def test_reduce_system(self) -> None:
        """Testing reduce_system"""
        system = reduce_system(build_calcium_like_system(TOY_PARAMS))

        self.assertIs(system.mode, SystemMode.REDUCED)
        self.assertEqual([label.key for label in system.labels],
                         ['00', '0a', 'a0', 'aa'])
        self.assertEqual(system.levels, ('0', 'a'))
        self.assertEqual(len(system.couplings), 4)

        energies, dipole = system.level_hamiltonian()

        self.assertArrayAlmostEqual(energies,
                                    np.diag([0.0, TOY_PARAMS.e_a]))
        self.assertArrayAlmostEqual(dipole, [[0.0, 1.0], [1.0, 0.0]])

    def test_reduce_system_twice(self) -> None:
        """Testing reduce_system with an already reduced system"""
        system = self.build_toy_system()

        with self.assertRaisesMessage(ModelError, 'only full systems'):
            reduce_system(system)

    def test_index_of_missing(self) -> None:
        """Testing ChannelSystem.index_of with a channel outside the system
        """
        system = self.build_toy_system()

        with self.assertRaisesMessage(ModelError, 'channel |01> is not part '
                                                  'of this reduced4plus2 '
                                                  'system.'):
            system.index_of(ChannelLabel.parse('01'))

    def test_envelope_potential(self) -> None:
        """Testing ChannelSystem.envelope_potential"""
        system = self.build_toy_system()
        r = np.array([TOY_PARAMS.d, TOY_PARAMS.d + 10.0])
        trap = 0.5 * TOY_PARAMS.mass * TOY_PARAMS.omega ** 2 * 100.0

        self.assertArrayAlmostEqual(
            system.envelope_potential(r),
            [-TOY_PARAMS.c3 / r[0] ** 3, trap - TOY_PARAMS.c3 / r[1] ** 3],
            atol=1e-15)

    def test_inverse_cube_potential_singular(self) -> None:
        """Testing inverse_cube_potential at R <= 0"""
        potential = inverse_cube_potential(1.0)

        with self.assertRaisesMessage(ModelError, 'singular'):
            potential(np.array([0.0, 1.0]))

    def test_tabulated_potential(self) -> None:
        """Testing tabulated_potential interpolates its table"""
        r = np.linspace(1.0, 10.0, 20)
        potential = tabulated_potential(r, -1.0 / r ** 3,
                                        asymptotic_energy=0.5)

        self.assertArrayAlmostEqual(potential(r), 0.5 - 1.0 / r ** 3,
                                    atol=1e-14)
        self.assertAlmostEqual(float(potential(np.array([5.25]))[0]),
                               0.5 - 1.0 / 5.25 ** 3,
                               places=4)

    def test_tabulated_potential_invalid(self) -> None:
        """Testing tabulated_potential with unsorted positions"""
        with self.assertRaises(ModelError):
            tabulated_potential([3.0, 2.0, 1.0], [0.0, 0.0, 0.0])


class HamiltonianTests(PhasegateTestCase):
    """Unit tests for phasegate.model.hamiltonian."""

    def setUp(self) -> None:
        super().setUp()

        self.system = self.build_toy_system()
        self.grid = self.build_toy_grid(n_points=16)
        self.hamiltonian = GridHamiltonian(self.system, self.grid)

    def _random_vectors(self, count: int) -> np.ndarray:
        rng = np.random.default_rng(7)
        shape = (count, self.hamiltonian.dimension)

        return rng.normal(size=shape) + 1j * rng.normal(size=shape)

    def test_dimension(self) -> None:
        """Testing GridHamiltonian.dimension"""
        self.assertEqual(self.hamiltonian.dimension, 4 * 16 + 2)

    def test_pack_unpack(self) -> None:
        """Testing GridHamiltonian.pack and unpack"""
        state = WaveState.zeros(self.system, self.grid)
        state.amplitudes[1, 3] = 0.5j
        state.levels[1] = 0.25

        vector = self.hamiltonian.pack(state)

        self.assertEqual(vector[16 + 3], 0.5j)
        self.assertEqual(vector[-1], 0.25)

        unpacked = self.hamiltonian.unpack(vector, time_tag=2.0)

        self.assertArrayAlmostEqual(unpacked.amplitudes, state.amplitudes)
        self.assertArrayAlmostEqual(unpacked.levels, state.levels)
        self.assertEqual(unpacked.time_tag, 2.0)

    def test_pack_mismatch(self) -> None:
        """Testing GridHamiltonian.pack with a state of another system"""
        full = self.build_toy_system(SystemMode.FULL8)
        state = WaveState.zeros(full, self.grid)

        with self.assertRaisesMessage(ModelError, 'does not match the '
                                                  'reduced4plus2 system'):
            self.hamiltonian.pack(state)

    def test_dense_matrix_hermitian(self) -> None:
        """Testing GridHamiltonian.dense_matrix is Hermitian under the
        packed weights
        """
        matrix = self.hamiltonian.dense_matrix(0.01)
        weighted = self.hamiltonian.weights[:, np.newaxis] * matrix

        self.assertArrayAlmostEqual(weighted, weighted.conj().T,
                                    atol=1e-12)

    def test_apply_linear_in_field(self) -> None:
        """Testing GridHamiltonian.apply is linear in the field"""
        vectors = self._random_vectors(3)
        hamiltonian = self.hamiltonian

        self.assertArrayAlmostEqual(
            hamiltonian.apply(vectors, 0.02) - hamiltonian.apply(vectors),
            0.02 * hamiltonian.apply_dipole(vectors),
            atol=1e-12)

    def test_apply_batch(self) -> None:
        """Testing GridHamiltonian.apply on a batch matches single vectors
        """
        vectors = self._random_vectors(2)
        applied = self.hamiltonian.apply(vectors, 0.01)

        for i in range(2):
            self.assertArrayAlmostEqual(
                applied[i], self.hamiltonian.apply(vectors[i], 0.01),
                atol=1e-14)

    def test_apply_levels(self) -> None:
        """Testing GridHamiltonian.apply on the two-level atom"""
        vector = np.zeros(self.hamiltonian.dimension, dtype=complex)
        vector[-2] = 1.0

        applied = self.hamiltonian.apply(vector, 0.5)

        self.assertArrayAlmostEqual(applied[:-2], 0.0)
        self.assertArrayAlmostEqual(applied[-2:], [0.0, 0.5])

    def test_inner_and_norms(self) -> None:
        """Testing GridHamiltonian.inner and norms agree with WaveState"""
        vectors = self._random_vectors(2)
        first = self.hamiltonian.unpack(vectors[0])
        second = self.hamiltonian.unpack(vectors[1])

        self.assertAlmostEqual(
            complex(self.hamiltonian.inner(vectors[0], vectors[1])),
            first.overlap(second, self.grid))
        self.assertAlmostEqual(float(self.hamiltonian.norms(vectors[0])),
                               first.norm(self.grid))

    def test_apply_hamiltonian_ground_state(self) -> None:
        """Testing apply_hamiltonian on the trap ground state of |00>"""
        energy, ground = trap_ground_state(self.system, self.grid)
        state = WaveState.zeros(self.system, self.grid)
        state.amplitudes[0] = ground

        applied = apply_hamiltonian(self.system, self.grid, state, 0.0)

        self.assertArrayAlmostEqual(applied.amplitudes,
                                    energy * state.amplitudes,
                                    atol=1e-12)

    def test_apply_hamiltonian_couples_00_to_singles(self) -> None:
        """Testing apply_hamiltonian with a field couples |00> to |0a> and
        |a0>
        """
        _energy, ground = trap_ground_state(self.system, self.grid)
        state = WaveState.zeros(self.system, self.grid)
        state.amplitudes[0] = ground

        applied = apply_hamiltonian(self.system, self.grid, state, 0.1)

        self.assertArrayAlmostEqual(applied.amplitudes[1], 0.1 * ground,
                                    atol=1e-14)
        self.assertArrayAlmostEqual(applied.amplitudes[2], 0.1 * ground,
                                    atol=1e-14)
        self.assertArrayAlmostEqual(applied.amplitudes[3], 0.0)

    def test_single_excitation_block_isolated_under_pulse(self) -> None:
        """Testing |01> never leaks into the |00> block under a pulse"""
        system = self.build_toy_system(SystemMode.FULL8)
        hamiltonian = GridHamiltonian(system, self.grid)
        field = make_guess_pulse(200.0, guess_carrier(system), system,
                                 dt=1.0)

        final = propagate(hamiltonian,
                          initial_states(system, self.grid)['01'],
                          field,
                          config=PropagatorConfig(dt=1.0))
        populations = channel_populations(system, final, self.grid)

        for key in ('00', '0a', 'a0', 'aa'):
            self.assertLess(populations[key], 1e-12)

        self.assertAlmostEqual(populations['01'] + populations['a1'], 1.0,
                               places=8)

    def test_channel_populations(self) -> None:
        """Testing channel_populations"""
        state = WaveState.zeros(self.system, self.grid)
        _energy, ground = trap_ground_state(self.system, self.grid)
        state.amplitudes[0] = ground * math.sqrt(0.75)
        state.levels[1] = 0.5

        populations = channel_populations(self.system, state, self.grid)

        self.assertEqual(set(populations), {'00', '0a', 'a0', 'aa', '0', 'a'})
        self.assertAlmostEqual(populations['00'], 0.75)
        self.assertAlmostEqual(populations['0a'], 0.0)
        self.assertAlmostEqual(populations['a'], 0.25)


class TargetsTests(PhasegateTestCase):
    """Unit tests for phasegate.model.targets."""

    def test_trap_ground_state(self) -> None:
        """Testing trap_ground_state energy"""
        system = self.build_toy_system()
        energy, ground = trap_ground_state(system, self.build_toy_grid())

        self.assertAlmostEqual(energy, 0.5 * TOY_PARAMS.omega, delta=1e-9)
        self.assertEqual(ground.shape, (32,))

    def test_initial_states_full(self) -> None:
        """Testing initial_states in full mode"""
        system = self.build_toy_system(SystemMode.FULL8)
        grid = self.build_toy_grid()

        states = initial_states(system, grid)

        self.assertEqual(list(states), ['00', '01', '10'])

        for name, state in states.items():
            index = system.index_of(ChannelLabel.parse(name))
            populations = channel_populations(system, state, grid)

            self.assertAlmostEqual(state.norm(grid), 1.0)
            self.assertAlmostEqual(populations[system.labels[index].key],
                                   1.0)

    def test_initial_states_reduced(self) -> None:
        """Testing initial_states in reduced mode"""
        system = self.build_toy_system()
        grid = self.build_toy_grid()

        states = initial_states(system, grid)

        self.assertEqual(list(states), ['00', '0'])
        self.assertArrayAlmostEqual(states['0'].levels, [1.0, 0.0])
        self.assertArrayAlmostEqual(states['0'].amplitudes, 0.0)
        self.assertAlmostEqual(states['00'].norm(grid), 1.0)

    def test_gate_targets_reduced(self) -> None:
        """Testing gate_targets in reduced mode"""
        system = self.build_toy_system()
        grid = self.build_toy_grid()
        duration = 100.0

        targets = gate_targets(system, grid, duration)
        natural = -(2.0 * TOY_PARAMS.e1 + targets.trap_energy) * duration

        self.assertEqual(targets.names, ('00', '0'))
        self.assertEqual(targets.n_functional, 2)
        self.assertEqual(targets.analytic_tau, 0.0)
        self.assertAlmostEqual(targets.natural_phase, natural)
        self.assertAlmostEqual(targets.trap_phase,
                               -targets.trap_energy * duration)

        item = targets['00']

        self.assertAlmostEqual(item.initial.overlap(item.target, grid),
                               cmath.exp(1j * (math.pi + natural)))

        item = targets['0']

        self.assertAlmostEqual(item.initial.overlap(item.target, grid),
                               cmath.exp(-1j * TOY_PARAMS.e1 * duration))

    def test_gate_targets_full(self) -> None:
        """Testing gate_targets in full mode"""
        system = self.build_toy_system(SystemMode.FULL8)
        grid = self.build_toy_grid()

        targets = gate_targets(system, grid, 100.0, chi_target=math.pi / 2)

        self.assertEqual(targets.names, ('00', '01', '10'))
        self.assertEqual(targets.n_functional, 4)
        self.assertEqual(targets.analytic_tau, 1.0)

        for name, phase in (('00', math.pi / 2), ('01', 0.0),
                            ('10', 0.0)):
            item = targets[name]

            self.assertAlmostEqual(
                item.initial.overlap(item.target, grid),
                cmath.exp(1j * (phase + targets.natural_phase)))

    def test_gate_targets_missing(self) -> None:
        """Testing GateTargets lookup of a state that isn't propagated"""
        targets = gate_targets(self.build_toy_system(),
                               self.build_toy_grid(), 100.0)

        with self.assertRaises(KeyError):
            targets['01']

    def test_phase_shifted(self) -> None:
        """Testing GateTargets.phase_shifted"""
        grid = self.build_toy_grid()
        targets = gate_targets(self.build_toy_system(SystemMode.FULL8),
                               grid, 100.0)

        shifted = targets.phase_shifted(0.3)

        self.assertAlmostEqual(shifted.analytic_tau, cmath.exp(-0.3j))

        for old, new in zip(targets.basis, shifted.basis):
            self.assertAlmostEqual(
                old.initial.overlap(new.target, grid),
                cmath.exp(0.3j) * old.initial.overlap(old.target, grid))
