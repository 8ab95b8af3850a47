"""Unit tests for phasegate.cli."""

from __future__ import annotations

import math
import os

import kgb
import yaml

from phasegate.cli.config import (ExperimentConfig,
                                  Regime,
                                  SweepVariable,
                                  config_hash,
                                  load_config,
                                  parse_config)
from phasegate.cli.errors import ConfigError
from phasegate.cli.experiments import (build_experiment,
                                       build_system,
                                       format_estimate,
                                       run_crosscheck,
                                       run_eigenstates,
                                       run_estimate,
                                       run_optimize,
                                       run_sweep)
from phasegate.cli.main import (EXIT_CONFIG_ERROR,
                                EXIT_NUMERICAL_ERROR,
                                EXIT_SUCCESS,
                                main)
from phasegate.krotov.errors import OptimizationError
from phasegate.krotov.pulses import save_pulse
from phasegate.model.channels import SystemMode
from phasegate.testing.testcases import PhasegateTestCase, slow_test
from phasegate.util.tables import read_table
from phasegate.util.units import AU_TIME_TO_FS, AU_TIME_TO_S, BOHR_TO_NM


def _shipped_config(filename: str) -> str:
    return os.path.join(os.path.dirname(os.path.dirname(os.path.dirname(
        os.path.abspath(__file__)))), 'configs', filename)


class CLITestCase(PhasegateTestCase):
    """Base class for command line tests."""

    def build_config(self, **sections) -> ExperimentConfig:
        """Return a parsed toy configuration on a small grid.

        Args:
            **sections (dict):
                Section overrides.

        Returns:
            phasegate.cli.config.ExperimentConfig:
            The configuration.
        """
        sections.setdefault('grid', {'n_points': 16})
        sections.setdefault('output', {'directory': self.make_temp_dir()})

        return parse_config(self.build_toy_config_data(**sections))

    def write_config(self, data) -> str:
        """Write a configuration mapping to a YAML file.

        Args:
            data (dict):
                The configuration mapping.

        Returns:
            str:
            The path to the file.
        """
        path = os.path.join(self.make_temp_dir(), 'config.yaml')

        with open(path, 'w') as fp:
            yaml.safe_dump(data, fp)

        return path


class ConfigTests(CLITestCase):
    """Unit tests for phasegate.cli.config."""

    def test_parse_config(self) -> None:
        """Testing parse_config with a toy configuration"""
        config = parse_config(self.build_toy_config_data())

        self.assertEqual(config.params.e1, 0.03)
        self.assertEqual(config.params.c3, 1e4)
        self.assertEqual(config.params.d, 100.0)
        self.assertEqual(config.grid.n_points, 32)
        self.assertEqual(config.grid.mass, 10.0)
        self.assertEqual(config.duration, 200.0)
        self.assertEqual(config.dt, 1.0)
        self.assertEqual(config.propagator.dt, 1.0)
        self.assertEqual(config.krotov.alpha, 10.0)
        self.assertEqual(config.krotov.max_iterations, 2)
        self.assertEqual(config.krotov.record_stride, 20)
        self.assertAlmostEqual(config.chi_target, math.pi)
        self.assertIs(config.mode, SystemMode.REDUCED)
        self.assertIs(config.regime, Regime.TOY)
        self.assertEqual(config.model, 'calcium')
        self.assertIsNone(config.sweep)
        self.assertEqual(config.output_dir, 'out')
        self.assertEqual(config.seed, 0)
        self.assertEqual(config.workers, 1)

    def test_parse_config_units(self) -> None:
        """Testing parse_config converts units to atomic units"""
        data = self.build_toy_config_data(regime='physical',
                                          gate={'chi_over_pi': 0.5})
        data['trap'] = {'omega_khz': 250.0, 'd_nm': 200.0}
        data['time'] = {'T_ps': 1.0, 'dt_fs': 1.0}

        with self.assertLogs('phasegate.cli.config', 'WARNING'):
            config = parse_config(data)

        self.assertAlmostEqual(config.params.omega,
                               2.0 * math.pi * 250e3 * AU_TIME_TO_S)
        self.assertAlmostEqual(config.params.d, 200.0 / BOHR_TO_NM)
        self.assertAlmostEqual(config.duration, 1000.0 / AU_TIME_TO_FS)
        self.assertAlmostEqual(config.dt, 1.0 / AU_TIME_TO_FS)
        self.assertAlmostEqual(config.chi_target, 0.5 * math.pi)
        self.assertIs(config.regime, Regime.PHYSICAL)

    def test_parse_config_full_mode(self) -> None:
        """Testing parse_config with mode aliases"""
        for name in ('full', 'full8', 'FULL'):
            config = parse_config(self.build_toy_config_data(mode=name))

            self.assertIs(config.mode, SystemMode.FULL8)

    def test_parse_config_mapped_grid(self) -> None:
        """Testing parse_config with a mapped grid"""
        config = parse_config(self.build_toy_config_data(
            grid={'mapping': 'mapped', 'beta': 0.7, 'e_max_au': 0.2}))

        self.assertEqual(config.grid.mapping.beta, 0.7)
        self.assertEqual(config.grid.mapping.e_max, 0.2)

    def test_parse_config_missing_section(self) -> None:
        """Testing parse_config with a missing section"""
        data = self.build_toy_config_data()
        del data['trap']

        with self.assertRaisesMessage(ConfigError, 'trap: missing section.'):
            parse_config(data)

    def test_parse_config_missing_quantity(self) -> None:
        """Testing parse_config with a missing quantity"""
        data = self.build_toy_config_data()
        del data['system']['e1_au']

        with self.assertRaisesMessage(
                ConfigError,
                'system: missing required quantity "e1_<unit>".'):
            parse_config(data)

    def test_parse_config_duplicate_quantity(self) -> None:
        """Testing parse_config with a quantity given in two units"""
        data = self.build_toy_config_data(trap={'omega_mhz': 1.0})

        with self.assertRaisesMessage(ConfigError,
                                      '"omega" is given more than once'):
            parse_config(data)

    def test_parse_config_missing_unit(self) -> None:
        """Testing parse_config with a quantity missing its unit"""
        data = self.build_toy_config_data()
        del data['system']['e1_au']
        data['system']['e1'] = 0.03

        with self.assertRaises(ConfigError) as cm:
            parse_config(data)

        self.assertEqual(cm.exception.key, 'system.e1')

    def test_parse_config_wrong_dimension(self) -> None:
        """Testing parse_config with a unit of the wrong dimension"""
        data = self.build_toy_config_data()
        data['time'] = {'T_nm': 1.0, 'dt_au': 1.0}

        with self.assertRaises(ConfigError) as cm:
            parse_config(data)

        self.assertEqual(cm.exception.key, 'time.T_nm')

    def test_parse_config_invalid_mode(self) -> None:
        """Testing parse_config with an unknown mode"""
        with self.assertRaisesMessage(ConfigError,
                                      'mode: must be "full" or "reduced".'):
            parse_config(self.build_toy_config_data(mode='half'))

    def test_parse_config_invalid_model(self) -> None:
        """Testing parse_config with an unknown potential model"""
        with self.assertRaises(ConfigError) as cm:
            parse_config(self.build_toy_config_data(
                system={'model': 'rydberg'}))

        self.assertEqual(cm.exception.key, 'system.model')

    def test_parse_config_invalid_time(self) -> None:
        """Testing parse_config with a time step longer than the gate"""
        with self.assertRaisesMessage(ConfigError, 'time: need 0 < dt <= T.'):
            parse_config(self.build_toy_config_data(
                time={'T_au': 10.0, 'dt_au': 20.0}))

    def test_parse_config_invalid_grid(self) -> None:
        """Testing parse_config with an invalid grid"""
        with self.assertRaisesMessage(ConfigError,
                                      'a grid needs at least 2 points'):
            parse_config(self.build_toy_config_data(grid={'n_points': 1}))

    def test_parse_config_invalid_params(self) -> None:
        """Testing parse_config with invalid physical parameters"""
        with self.assertRaisesMessage(ConfigError, 'must exceed E_1'):
            parse_config(self.build_toy_config_data(
                system={'e_a_au': 0.01}))

    def test_parse_config_toy_time_step_too_coarse(self) -> None:
        """Testing parse_config rejects a toy time step that doesn't resolve
        the carrier
        """
        with self.assertRaises(ConfigError) as cm:
            parse_config(self.build_toy_config_data(
                time={'T_au': 200.0, 'dt_au': 10.0}))

        self.assertEqual(cm.exception.key, 'time.dt')

    def test_parse_config_toy_gate_too_long(self) -> None:
        """Testing parse_config rejects a toy gate with too many steps"""
        with self.assertRaises(ConfigError) as cm:
            parse_config(self.build_toy_config_data(
                time={'T_au': 2e6, 'dt_au': 1.0}))

        self.assertEqual(cm.exception.key, 'time.T')

    def test_parse_config_negative_carrier(self) -> None:
        """Testing parse_config rejects a non-positive carrier"""
        with self.assertRaises(ConfigError) as cm:
            parse_config(self.build_toy_config_data(
                guess={'detuning_au': -0.06}))

        self.assertEqual(cm.exception.key, 'guess')

    def test_parse_config_sweep(self) -> None:
        """Testing parse_config with a gate time sweep"""
        config = parse_config(self.build_toy_config_data(
            sweep={'variable': 'gate_time', 'values_fs': [4.0, 6.0]}))

        self.assertIs(config.sweep.variable, SweepVariable.GATE_TIME)
        self.assertEqual(len(config.sweep.values), 2)
        self.assertAlmostEqual(config.sweep.values[0], 4.0 / AU_TIME_TO_FS)

    def test_parse_config_sweep_not_increasing(self) -> None:
        """Testing parse_config with sweep values out of order"""
        with self.assertRaisesMessage(ConfigError,
                                      'sweep values must be strictly '
                                      'increasing'):
            parse_config(self.build_toy_config_data(
                sweep={'variable': 'c3', 'values_au': [1e4, 1e4]}))

    def test_parse_config_sweep_invalid_variable(self) -> None:
        """Testing parse_config with an unknown sweep variable"""
        with self.assertRaises(ConfigError) as cm:
            parse_config(self.build_toy_config_data(
                sweep={'variable': 'distance', 'values_au': [1.0]}))

        self.assertEqual(cm.exception.key, 'sweep.variable')

    def test_config_hash(self) -> None:
        """Testing config_hash is stable and tracks changes"""
        first = parse_config(self.build_toy_config_data())
        second = parse_config(self.build_toy_config_data())
        changed = parse_config(self.build_toy_config_data(seed=1))

        self.assertEqual(config_hash(first), config_hash(second))
        self.assertEqual(len(config_hash(first)), 64)
        self.assertNotEqual(config_hash(first), config_hash(changed))

    def test_with_sweep_value_gate_time(self) -> None:
        """Testing ExperimentConfig.with_sweep_value for a gate time sweep"""
        config = parse_config(self.build_toy_config_data(
            sweep={'variable': 'gate_time', 'values_au': [150.0, 250.0]}))

        point = config.with_sweep_value(250.0)
        other = config.with_sweep_value(150.0)

        self.assertEqual(point.duration, 250.0)
        self.assertIsNone(point.sweep)
        self.assertEqual(point.raw['time'], {'dt_au': 1.0, 'T_au': 250.0})
        self.assertNotIn('sweep', point.raw)
        self.assertNotEqual(config_hash(point), config_hash(other))
        self.assertIn('sweep', config.raw)

    def test_with_sweep_value_c3(self) -> None:
        """Testing ExperimentConfig.with_sweep_value for a C3 sweep"""
        config = parse_config(self.build_toy_config_data(
            sweep={'variable': 'c3', 'values_au': [1e3, 1e4]}))

        point = config.with_sweep_value(1e3)

        self.assertEqual(point.params.c3, 1e3)
        self.assertEqual(point.raw['system']['c3_au'], 1e3)
        self.assertEqual(point.duration, config.duration)

    def test_with_sweep_value_without_sweep(self) -> None:
        """Testing ExperimentConfig.with_sweep_value without a sweep"""
        config = parse_config(self.build_toy_config_data())

        with self.assertRaisesMessage(ConfigError, 'defines no sweep'):
            config.with_sweep_value(1.0)

    def test_load_config(self) -> None:
        """Testing load_config"""
        path = self.write_config(self.build_toy_config_data())

        config = load_config(path)

        self.assertEqual(config.duration, 200.0)
        self.assertEqual(config_hash(config),
                         config_hash(parse_config(
                             self.build_toy_config_data())))

    def test_load_config_missing(self) -> None:
        """Testing load_config with a missing file"""
        path = os.path.join(self.make_temp_dir(), 'missing.yaml')

        with self.assertRaisesMessage(ConfigError, 'could not read'):
            load_config(path)

    def test_load_config_invalid_yaml(self) -> None:
        """Testing load_config with invalid YAML"""
        path = os.path.join(self.make_temp_dir(), 'bad.yaml')

        with open(path, 'w') as fp:
            fp.write('system: [unclosed\n')

        with self.assertRaisesMessage(ConfigError, 'could not parse'):
            load_config(path)

    def test_load_config_not_mapping(self) -> None:
        """Testing load_config with a document that isn't a mapping"""
        path = os.path.join(self.make_temp_dir(), 'list.yaml')

        with open(path, 'w') as fp:
            fp.write('- 1\n- 2\n')

        with self.assertRaisesMessage(ConfigError, 'must be a mapping'):
            load_config(path)

    def test_load_config_shipped_gate_time_sweep(self) -> None:
        """Testing the shipped toy gate-time sweep spans 0.05 to 3 t_v"""
        config = load_config(_shipped_config('toy_gate_time_sweep.yaml'))
        t_v = 1.0 / config.params.omega
        values = config.sweep.values

        self.assertIs(config.sweep.variable, SweepVariable.GATE_TIME)
        self.assertGreaterEqual(len(values), 5)
        self.assertLessEqual(values[0], 0.05 * t_v)
        self.assertGreaterEqual(values[-1], 3.0 * t_v)

    def test_load_config_shipped_c3_sweep(self) -> None:
        """Testing the shipped toy C3 sweep covers 1.5 decades at a short
        gate time
        """
        config = load_config(_shipped_config('toy_c3_sweep.yaml'))
        values = config.sweep.values

        self.assertIs(config.sweep.variable, SweepVariable.C3)
        self.assertGreaterEqual(math.log10(values[-1] / values[0]), 1.5)
        self.assertLess(config.duration, 1.0 / config.params.omega)

    def test_load_config_shipped_high_fidelity(self) -> None:
        """Testing the shipped long toy gate lasts at least 3 t_v"""
        config = load_config(_shipped_config('toy_high_fidelity.yaml'))

        self.assertIsNone(config.sweep)
        self.assertGreaterEqual(config.duration,
                                3.0 / config.params.omega)


class ExperimentsTests(CLITestCase):
    """Unit tests for phasegate.cli.experiments."""

    def test_build_experiment(self) -> None:
        """Testing build_experiment"""
        experiment = build_experiment(self.build_config())

        self.assertIs(experiment.system.mode, SystemMode.REDUCED)
        self.assertEqual(experiment.grid.n_points, 16)
        self.assertEqual(experiment.targets.names, ('00', '0'))
        self.assertEqual(experiment.guess.n_steps, 200)
        self.assertAlmostEqual(experiment.guess.carrier_freq, 0.05)
        self.assertEqual(experiment.comments[1], 'seed: 0')
        self.assertTrue(experiment.comments[0].startswith('config-hash: '))

    def test_build_experiment_full_mode(self) -> None:
        """Testing build_experiment with a mode override"""
        experiment = build_experiment(self.build_config(),
                                      mode=SystemMode.FULL8)

        self.assertIs(experiment.system.mode, SystemMode.FULL8)
        self.assertEqual(experiment.targets.names, ('00', '01', '10'))

    def test_build_system_dipole(self) -> None:
        """Testing build_system with the dipole model"""
        system = build_system(self.build_config(system={'model': 'dipole'}))

        self.assertIs(system.mode, SystemMode.REDUCED)
        self.assertEqual(system.params.c3, 1e4)

    def test_run_optimize(self) -> None:
        """Testing run_optimize writes its artifacts"""
        config = self.build_config()

        result = run_optimize(config)

        self.assertEqual(result.output_dir, config.output_dir)
        self.assertIn(result.record.n_iterations, (1, 2))
        self.assertEqual(result.report.iterations,
                         result.record.n_iterations)
        self.assertTrue(0.0 <= result.report.gate_fidelity <= 1.0)

        for filename in ('config.yaml', 'report.txt', 'report.csv',
                         'convergence.csv', 'pulse.csv', 'spectrum.csv',
                         'populations_00.csv', 'populations_0.csv',
                         'channels_00.csv', 'channels_0.csv',
                         'phase_trace.csv', 'population_dynamics.csv'):
            self.assertTrue(
                os.path.exists(os.path.join(config.output_dir, filename)),
                filename)

        header, rows, comments = read_table(
            os.path.join(config.output_dir, 'report.csv'))

        self.assertEqual(header[:3], ['T_fs', 'C3_au', 'F'])
        self.assertEqual(len(rows), 1)
        self.assertEqual(comments, ['config-hash: %s' % config_hash(config),
                                    'seed: 0'])

        _header, rows, _comments = read_table(
            os.path.join(config.output_dir, 'populations_00.csv'))

        # Every 20 steps over 200 steps, plus the start.
        self.assertEqual(len(rows), 11)

    def test_run_optimize_resume(self) -> None:
        """Testing run_optimize resumes from a saved pulse"""
        config = self.build_config()
        first = run_optimize(config)

        result = run_optimize(
            config,
            output_dir=self.make_temp_dir(),
            resume=os.path.join(first.output_dir, 'pulse.csv'))

        self.assertAlmostEqual(result.record.iterations[0].fidelity,
                               first.record.final.fidelity,
                               places=10)

    def test_run_optimize_resume_missing(self) -> None:
        """Testing run_optimize with a missing pulse to resume from"""
        config = self.build_config()

        with self.assertRaises(ConfigError) as cm:
            run_optimize(config,
                         resume=os.path.join(self.make_temp_dir(),
                                             'missing.csv'))

        self.assertEqual(cm.exception.key, '--resume')

    def test_run_sweep_continues_after_failure(self) -> None:
        """Testing run_sweep records a failed point and continues"""
        config = self.build_config(
            sweep={'variable': 'gate_time', 'values_au': [150.0, 200.0,
                                                          250.0]})

        def _run_optimize(config, **kwargs):
            if config.duration == 200.0:
                raise OptimizationError('the point diverged.')

            return spy.call_original(config, **kwargs)

        spy = self.spy_on(run_optimize, call_fake=_run_optimize)

        with self.assertLogs('phasegate.cli.experiments', 'WARNING'):
            result = run_sweep(config)

        self.assertSpyCallCount(run_optimize, 3)
        self.assertEqual([point.value for point in result.points],
                         [150.0, 200.0, 250.0])
        self.assertEqual([point.succeeded for point in result.points],
                         [True, False, True])
        self.assertEqual(result.points[1].error, 'the point diverged.')
        self.assertEqual(len(result.rows), 2)

        header, rows, comments = read_table(
            os.path.join(config.output_dir, 'sweep.csv'))

        self.assertEqual(len(rows), 2)
        self.assertIn('sweep: gate_time', comments)
        self.assertAlmostEqual(float(rows[0][0]), 150.0 * AU_TIME_TO_FS)
        self.assertAlmostEqual(float(rows[1][0]), 250.0 * AU_TIME_TO_FS)

        header, rows, _comments = read_table(
            os.path.join(config.output_dir, 'sweep_failures.csv'))

        self.assertEqual(header, ['value_au', 'error'])
        self.assertEqual(rows, [['200.0', 'the point diverged.']])
        self.assertTrue(os.path.exists(
            os.path.join(config.output_dir, 'point_002', 'report.csv')))

    def test_run_sweep_without_sweep(self) -> None:
        """Testing run_sweep without a sweep"""
        with self.assertRaisesMessage(ConfigError, 'defines no sweep'):
            run_sweep(self.build_config())

    @slow_test
    def test_run_sweep_parallel(self) -> None:
        """Testing run_sweep with worker processes keeps sweep order"""
        config = self.build_config(
            sweep={'variable': 'c3', 'values_au': [1e3, 5e3, 1e4]})

        parallel = run_sweep(config, workers=3)
        sequential = run_sweep(config, workers=1,
                               output_dir=self.make_temp_dir())

        self.assertEqual([point.value for point in parallel.points],
                         [1e3, 5e3, 1e4])

        for first, second in zip(parallel.rows, sequential.rows):
            self.assertAlmostEqual(first['F'], second['F'], places=10)

    def test_run_crosscheck(self) -> None:
        """Testing run_crosscheck agrees between models"""
        config = self.build_config()
        path = os.path.join(self.make_temp_dir(), 'pulse.csv')
        save_pulse(path, build_experiment(config).guess)

        result = run_crosscheck(config, path)

        self.assertTrue(0.0 <= result.f_reduced <= 1.0)
        self.assertAlmostEqual(result.delta, 0.0, delta=1e-7)

    def test_run_crosscheck_lattice_mismatch(self) -> None:
        """Testing run_crosscheck with a pulse on another lattice"""
        config = self.build_config()
        other = self.build_config(time={'T_au': 100.0, 'dt_au': 1.0})
        path = os.path.join(self.make_temp_dir(), 'pulse.csv')
        save_pulse(path, build_experiment(other).guess)

        with self.assertRaises(ConfigError) as cm:
            run_crosscheck(config, path)

        self.assertEqual(cm.exception.key, 'time')

    def test_run_eigenstates(self) -> None:
        """Testing run_eigenstates"""
        config = self.build_config(grid={'n_points': 32})

        states = run_eigenstates(config, check_convergence=True)

        self.assertEqual(len(states), 8)
        self.assertAlmostEqual(states[0].energy, 5e-4, delta=1e-7)
        self.assertAlmostEqual(states[1].energy - states[0].energy, 1e-3,
                               delta=1e-6)

        header, rows, comments = read_table(
            os.path.join(config.output_dir, 'eigenstates.csv'))

        self.assertEqual(header[:3], ['n', 'energy_hartree', 'psi_1'])
        self.assertEqual(len(rows), 8)
        self.assertTrue(comments[-1].startswith('convergence: '))

    def test_run_eigenstates_count(self) -> None:
        """Testing run_eigenstates with an explicit count"""
        states = run_eigenstates(self.build_config(), count=2,
                                 output_dir=self.make_temp_dir())

        self.assertEqual(len(states), 2)

    def test_run_estimate(self) -> None:
        """Testing run_estimate and format_estimate"""
        limits = run_estimate(self.build_config(grid={'n_points': 64}))

        self.assertAlmostEqual(limits.t_int_rad, 100.0)
        self.assertAlmostEqual(limits.t_v, 1000.0, delta=1.0)

        lines = format_estimate(limits).splitlines()

        self.assertEqual([line.split(' = ')[0] for line in lines],
                         ['interaction_energy_cm1', 't_int_rad_ps',
                          't_int_pi_ps', 't_v_ps', 'trap_gap_cm1',
                          'overlap'])

    @slow_test
    def test_toy_optimization_monotonic_two_hundred_iterations(self) -> None:
        """Testing a toy optimization decreases J for 200 iterations"""
        config = self.build_config(grid={'n_points': 32},
                                   time={'T_au': 3000.0, 'dt_au': 1.0},
                                   krotov={'alpha': 10.0,
                                           'max_iterations': 200,
                                           'convergence_delta_f': -1.0})

        result = run_optimize(config)
        iterations = result.record.iterations

        self.assertEqual(result.record.n_iterations, 200)
        self.assertGreater(iterations[-1].fidelity, iterations[0].fidelity)

        for previous, current in zip(iterations, iterations[1:]):
            self.assertLessEqual(current.functional,
                                 previous.functional + 1e-10)

    @slow_test
    def test_toy_high_fidelity_gate(self) -> None:
        """Testing the long toy gate reaches a high-fidelity phasegate"""
        config = load_config(_shipped_config('toy_high_fidelity.yaml'))

        result = run_optimize(config, output_dir=self.make_temp_dir())
        report = result.report

        self.assertGreater(result.record.final.fidelity, 0.99)
        self.assertGreater(report.gate_fidelity, 0.99)
        self.assertLess(abs(abs(report.chi) - math.pi), 0.05 * math.pi)
        self.assertGreater(report.f00, 0.99)

    @slow_test
    def test_run_crosscheck_optimized_pulse(self) -> None:
        """Testing run_crosscheck agrees between models on an optimized
        pulse
        """
        config = self.build_config(grid={'n_points': 32},
                                   time={'T_au': 400.0, 'dt_au': 1.0},
                                   krotov={'alpha': 10.0,
                                           'max_iterations': 20,
                                           'convergence_delta_f': -1.0})
        optimized = run_optimize(config)

        result = run_crosscheck(
            config, os.path.join(optimized.output_dir, 'pulse.csv'))

        self.assertGreater(optimized.record.final.fidelity,
                           optimized.record.iterations[0].fidelity)
        self.assertLess(abs(result.delta), 1e-6)

    @slow_test
    def test_toy_gate_time_sweep_trend(self) -> None:
        """Testing the toy gate-time sweep gains nonlocal phase and motional
        fidelity with the gate time
        """
        config = load_config(_shipped_config('toy_gate_time_sweep.yaml'))

        result = run_sweep(config, workers=4,
                           output_dir=self.make_temp_dir())
        chis = [abs(row['chi_over_pi']) for row in result.rows]
        f00s = [row['F00'] for row in result.rows]

        self.assertEqual(result.failures, [])
        self.assertEqual(len(result.rows), len(config.sweep.values))

        for previous, current in zip(chis, chis[1:]):
            self.assertGreaterEqual(current, previous - 0.02)

        self.assertLessEqual(f00s[0], f00s[-1] - 0.1)

    @slow_test
    def test_toy_c3_sweep_trend(self) -> None:
        """Testing the toy C3 sweep reaches chi = pi while losing motional
        fidelity
        """
        config = load_config(_shipped_config('toy_c3_sweep.yaml'))

        result = run_sweep(config, workers=4,
                           output_dir=self.make_temp_dir())
        chis = [abs(row['chi_over_pi']) for row in result.rows]
        f00s = [row['F00'] for row in result.rows]

        self.assertEqual(result.failures, [])
        self.assertEqual(len(result.rows), len(config.sweep.values))
        self.assertLess(chis[0], chis[-1])
        self.assertGreater(chis[-1], 0.9)
        self.assertLess(f00s[-1], 0.8)
        self.assertGreater(f00s[0], f00s[-1])


class MainTests(CLITestCase):
    """Unit tests for phasegate.cli.main."""

    def setUp(self) -> None:
        super().setUp()

        self.out_dir = self.make_temp_dir()
        self.config_path = self.write_config(self.build_toy_config_data(
            grid={'n_points': 16},
            output={'directory': self.out_dir}))

    def test_main_estimate(self) -> None:
        """Testing main with the estimate command"""
        self.assertEqual(main(['-q', 'estimate', self.config_path]),
                         EXIT_SUCCESS)

    def test_main_optimize(self) -> None:
        """Testing main with the optimize command"""
        out_dir = self.make_temp_dir()

        self.assertEqual(main(['-q', 'optimize', self.config_path,
                               '--out', out_dir]),
                         EXIT_SUCCESS)
        self.assertTrue(os.path.exists(os.path.join(out_dir, 'report.txt')))

    def test_main_missing_command(self) -> None:
        """Testing main without a command"""
        self.assertEqual(main([]), EXIT_CONFIG_ERROR)

    def test_main_missing_config(self) -> None:
        """Testing main with a missing configuration file"""
        path = os.path.join(self.make_temp_dir(), 'missing.yaml')

        self.assertEqual(main(['-q', 'estimate', path]), EXIT_CONFIG_ERROR)

    def test_main_invalid_config(self) -> None:
        """Testing main with an invalid configuration"""
        path = self.write_config(self.build_toy_config_data(
            time={'T_au': 200.0, 'dt_au': 10.0}))

        self.assertEqual(main(['-q', 'optimize', path]), EXIT_CONFIG_ERROR)

    def test_main_crosscheck_without_pulse(self) -> None:
        """Testing main with crosscheck and no pulse"""
        self.assertEqual(main(['-q', 'crosscheck', self.config_path]),
                         EXIT_CONFIG_ERROR)

    def test_main_numerical_error(self) -> None:
        """Testing main when the optimization aborts"""
        self.spy_on(run_optimize,
                    op=kgb.SpyOpRaise(OptimizationError('diverged.')))

        self.assertEqual(main(['-q', 'optimize', self.config_path]),
                         EXIT_NUMERICAL_ERROR)
        self.assertSpyCalled(run_optimize)
