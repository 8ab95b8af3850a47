"""Unit tests for phasegate.grid."""

from __future__ import annotations

import math
import os

import numpy as np

from phasegate.grid.eigen import (check_grid_convergence,
                                  displaced_ground_state,
                                  export_eigenstates,
                                  ground_state_overlap,
                                  solve_bound_states)
from phasegate.grid.errors import GridError
from phasegate.grid.grid import (GridSpec,
                                 MappedMapping,
                                 apply_kinetic,
                                 boundary_population,
                                 build_grid,
                                 kinetic_matrix)
from phasegate.testing.testcases import PhasegateTestCase
from phasegate.util.tables import read_table


def _oscillator(r: np.ndarray) -> np.ndarray:
    return 0.5 * r ** 2


class GridTests(PhasegateTestCase):
    """Unit tests for phasegate.grid.grid."""

    def test_build_grid_uniform(self) -> None:
        """Testing build_grid with a uniform grid"""
        grid = build_grid(GridSpec(r_min=0.0, r_max=8.0, n_points=8,
                                   mass=1.0))

        self.assertFalse(grid.is_mapped)
        self.assertEqual(grid.n_points, 8)
        self.assertArrayAlmostEqual(grid.points, np.arange(8) + 0.5)
        self.assertArrayAlmostEqual(grid.step_weights, np.ones(8))
        self.assertArrayAlmostEqual(grid.jacobian, np.ones(8))
        self.assertAlmostEqual(grid.k_max, math.pi)

    def test_build_grid_read_only(self) -> None:
        """Testing build_grid returns read-only arrays"""
        grid = self.build_toy_grid()

        with self.assertRaises(ValueError):
            grid.points[0] = 0.0

        with self.assertRaises(ValueError):
            grid.step_weights[0] = 0.0

    def test_build_grid_invalid_bounds(self) -> None:
        """Testing build_grid with r_min >= r_max"""
        with self.assertRaisesMessage(GridError, 'must be less than r_max'):
            build_grid(GridSpec(r_min=5.0, r_max=5.0, n_points=16,
                                mass=1.0))

    def test_build_grid_too_few_points(self) -> None:
        """Testing build_grid with a single point"""
        with self.assertRaisesMessage(GridError, 'at least 2 points'):
            build_grid(GridSpec(r_min=0.0, r_max=1.0, n_points=1,
                                mass=1.0))

    def test_build_grid_coarse_warning(self) -> None:
        """Testing build_grid warns about very coarse grids"""
        with self.assertLogs('phasegate.grid.grid', 'WARNING'):
            grid = build_grid(GridSpec(r_min=0.0, r_max=1.0, n_points=5,
                                       mass=1.0))

        self.assertEqual(grid.n_points, 5)

    def test_build_grid_mapped_flat_envelope(self) -> None:
        """Testing build_grid with a mapped grid over a flat envelope
        matches the uniform grid
        """
        spec = GridSpec(r_min=-4.0, r_max=4.0, n_points=32, mass=1.0)
        mapped = build_grid(
            GridSpec(r_min=-4.0, r_max=4.0, n_points=32, mass=1.0,
                     mapping=MappedMapping(beta=0.5, e_max=2.0)),
            lambda r: np.zeros_like(r))
        uniform = build_grid(spec)

        self.assertTrue(mapped.is_mapped)
        self.assertArrayAlmostEqual(mapped.points, uniform.points,
                                    atol=1e-10)
        self.assertArrayAlmostEqual(mapped.jacobian, np.ones(32),
                                    atol=1e-10)

    def test_build_grid_mapped_density(self) -> None:
        """Testing build_grid places mapped nodes more densely where the
        envelope is deep
        """
        grid = build_grid(
            GridSpec(r_min=-8.0, r_max=8.0, n_points=96, mass=1.0,
                     mapping=MappedMapping(beta=0.5, e_max=40.0)),
            _oscillator)
        steps = np.diff(grid.points)

        self.assertLess(steps[len(steps) // 2], steps[0])
        self.assertLess(steps[len(steps) // 2], steps[-1])
        self.assertAlmostEqual(float(np.sum(grid.step_weights)), 16.0,
                               delta=0.5)

    def test_build_grid_mapped_too_few_points(self) -> None:
        """Testing build_grid with a mapped grid that can't fit its domain
        """
        spec = GridSpec(r_min=-8.0, r_max=8.0, n_points=32, mass=1.0,
                        mapping=MappedMapping(beta=0.5, e_max=40.0))

        with self.assertRaisesMessage(GridError, 'but only 32 were '
                                                 'requested'):
            build_grid(spec, _oscillator)

    def test_build_grid_mapped_without_envelope(self) -> None:
        """Testing build_grid with a mapped grid and no envelope"""
        spec = GridSpec(r_min=-8.0, r_max=8.0, n_points=32, mass=1.0,
                        mapping=MappedMapping(beta=0.5, e_max=40.0))

        with self.assertRaisesMessage(GridError, 'require an envelope'):
            build_grid(spec)

    def test_build_grid_mapped_e_max_too_low(self) -> None:
        """Testing build_grid with e_max below the envelope"""
        spec = GridSpec(r_min=1.0, r_max=8.0, n_points=32, mass=1.0,
                        mapping=MappedMapping(beta=0.5, e_max=0.1))

        with self.assertRaisesMessage(GridError, 'must exceed the minimum'):
            build_grid(spec, _oscillator)

    def test_apply_kinetic_plane_wave(self) -> None:
        """Testing apply_kinetic with a plane wave"""
        grid = build_grid(GridSpec(r_min=0.0, r_max=10.0, n_points=32,
                                   mass=2.0))
        k0 = 2.0 * math.pi * 3 / 10.0
        psi = np.exp(1j * k0 * grid.points)

        self.assertArrayAlmostEqual(apply_kinetic(grid, psi),
                                    k0 ** 2 / 4.0 * psi,
                                    atol=1e-10)

    def test_apply_kinetic_stacked(self) -> None:
        """Testing apply_kinetic acts on the last axis of a stack"""
        grid = self.build_toy_grid()
        rng = np.random.default_rng(1)
        stack = rng.normal(size=(3, grid.n_points))

        applied = apply_kinetic(grid, stack)

        for i in range(3):
            self.assertArrayAlmostEqual(applied[i],
                                        apply_kinetic(grid, stack[i]),
                                        atol=1e-14)

    def test_apply_kinetic_wrong_length(self) -> None:
        """Testing apply_kinetic with the wrong number of amplitudes"""
        grid = self.build_toy_grid()

        with self.assertRaisesMessage(GridError, 'expected 32 amplitudes'):
            apply_kinetic(grid, np.zeros(31))

    def test_apply_kinetic_mapped_second_derivative(self) -> None:
        """Testing apply_kinetic on a mapped grid is -psi''/2m in the
        physical coordinate
        """
        grid = build_grid(
            GridSpec(r_min=-8.0, r_max=8.0, n_points=96, mass=1.0,
                     mapping=MappedMapping(beta=0.5, e_max=40.0)),
            _oscillator)
        r = grid.points
        psi = np.exp(-0.5 * r ** 2)
        central = np.abs(r) < 4.0

        applied = apply_kinetic(grid, psi)

        self.assertGreater(grid.jacobian.max() / grid.jacobian.min(), 1.5)
        self.assertArrayAlmostEqual(applied[central],
                                    (0.5 * (1.0 - r ** 2) * psi)[central],
                                    atol=1e-3)

    def test_kinetic_matrix_hermitian(self) -> None:
        """Testing kinetic_matrix is symmetric under the grid weights"""
        grid = build_grid(
            GridSpec(r_min=-8.0, r_max=8.0, n_points=96, mass=1.0,
                     mapping=MappedMapping(beta=0.5, e_max=40.0)),
            _oscillator)
        weighted = grid.step_weights[:, np.newaxis] * kinetic_matrix(grid)

        self.assertArrayAlmostEqual(weighted, weighted.T,
                                    atol=1e-10 * np.abs(weighted).max())

    def test_boundary_population(self) -> None:
        """Testing boundary_population"""
        grid = build_grid(GridSpec(r_min=-10.0, r_max=10.0, n_points=64,
                                   mass=1.0))
        centered = displaced_ground_state(grid, 1.0, 1.0, 0.0)
        edge = np.zeros(grid.n_points)
        edge[0] = 1.0 / math.sqrt(grid.step_weights[0])

        self.assertLess(boundary_population(grid, centered), 1e-12)
        self.assertAlmostEqual(boundary_population(grid, edge), 1.0)
        self.assertAlmostEqual(
            boundary_population(grid, np.array([edge, centered])),
            1.0)


class EigenTests(PhasegateTestCase):
    """Unit tests for phasegate.grid.eigen."""

    def test_solve_bound_states_oscillator(self) -> None:
        """Testing solve_bound_states with a harmonic oscillator"""
        grid = build_grid(GridSpec(r_min=-10.0, r_max=10.0, n_points=64,
                                   mass=1.0))

        states = solve_bound_states(grid, _oscillator, 5)

        self.assertEqual(len(states), 5)

        for n, state in enumerate(states):
            self.assertAlmostEqual(state.energy, n + 0.5, places=8)
            self.assertAlmostEqual(grid.norm(state.amplitudes), 1.0,
                                   places=10)

    def test_solve_bound_states_fifty_oscillator_levels(self) -> None:
        """Testing solve_bound_states resolves the lowest fifty harmonic
        levels
        """
        grid = build_grid(GridSpec(r_min=-16.0, r_max=16.0, n_points=256,
                                   mass=1.0))

        states = solve_bound_states(grid, _oscillator, 50)
        energies = np.array([state.energy for state in states])
        expected = np.arange(50) + 0.5

        self.assertLess(np.max(np.abs(energies - expected) / expected),
                        1e-6)

    def test_solve_bound_states_mapped_oscillator(self) -> None:
        """Testing solve_bound_states with a harmonic oscillator on a
        mapped grid
        """
        grid = build_grid(
            GridSpec(r_min=-8.0, r_max=8.0, n_points=96, mass=1.0,
                     mapping=MappedMapping(beta=0.5, e_max=40.0)),
            _oscillator)

        states = solve_bound_states(grid, _oscillator, 5)

        for n, state in enumerate(states):
            self.assertAlmostEqual(state.energy, n + 0.5, places=4)

    def test_solve_bound_states_ground_state(self) -> None:
        """Testing solve_bound_states ground state matches the analytic
        Gaussian with a positive sign
        """
        grid = build_grid(GridSpec(r_min=-10.0, r_max=10.0, n_points=64,
                                   mass=2.0))
        potential = lambda r: 0.5 * 2.0 * 0.25 * (r - 1.0) ** 2

        ground = solve_bound_states(grid, potential, 1)[0]

        self.assertAlmostEqual(ground.energy, 0.25, places=8)
        self.assertArrayAlmostEqual(
            ground.amplitudes,
            displaced_ground_state(grid, 2.0, 0.5, 1.0),
            atol=1e-7)

    def test_solve_bound_states_too_many(self) -> None:
        """Testing solve_bound_states with more states than a quarter of
        the grid
        """
        grid = self.build_toy_grid(n_points=16)

        with self.assertRaisesMessage(GridError, 'can only solve for 1 to 4 '
                                                 'bound states'):
            solve_bound_states(grid, _oscillator, 5)

    def test_ground_state_overlap(self) -> None:
        """Testing ground_state_overlap against a numerical overlap"""
        grid = build_grid(GridSpec(r_min=-15.0, r_max=15.0, n_points=128,
                                   mass=1.0))
        # Single-atom ground states carry twice the reduced mass.
        first = displaced_ground_state(grid, 2.0, 1.0, -1.0)
        second = displaced_ground_state(grid, 2.0, 1.0, 1.0)

        self.assertAlmostEqual(grid.inner(first, second).real,
                               ground_state_overlap(1.0, 1.0, 2.0),
                               places=10)
        self.assertAlmostEqual(ground_state_overlap(1.0, 1.0, 2.0),
                               math.exp(-2.0))

    def test_check_grid_convergence(self) -> None:
        """Testing check_grid_convergence with a converged grid"""
        spec = GridSpec(r_min=-10.0, r_max=10.0, n_points=64, mass=1.0)

        self.assertLess(check_grid_convergence(spec, _oscillator, 5), 1e-8)

    def test_check_grid_convergence_coarse(self) -> None:
        """Testing check_grid_convergence with an under-resolved grid"""
        spec = GridSpec(r_min=-10.0, r_max=10.0, n_points=16, mass=1.0)

        self.assertGreater(check_grid_convergence(spec, _oscillator, 4),
                           1e-4)

    def test_export_eigenstates(self) -> None:
        """Testing export_eigenstates"""
        grid = build_grid(GridSpec(r_min=-10.0, r_max=10.0, n_points=16,
                                   mass=1.0))
        states = solve_bound_states(grid, _oscillator, 2)
        path = os.path.join(self.make_temp_dir(), 'eigenstates.csv')

        export_eigenstates(path, states, comments=['config-hash: abc'])

        header, rows, comments = read_table(path)

        self.assertEqual(header[:3], ['n', 'energy_hartree', 'psi_1'])
        self.assertEqual(len(header), 18)
        self.assertEqual(len(rows), 2)
        self.assertEqual(rows[1][0], '1')
        self.assertEqual(float(rows[0][1]), states[0].energy)
        self.assertEqual(comments, ['config-hash: abc'])
