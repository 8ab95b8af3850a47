"""Experiment runners.

Each runner takes a validated :py:class:`~phasegate.cli.config.
ExperimentConfig`, does its work in atomic units, and writes CSV artifacts
stamped with the configuration hash.

Version Added:
    1.0
"""

from __future__ import annotations

import logging
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Dict, List, Optional, Sequence, Tuple

import yaml
from threadpoolctl import threadpool_limits

from phasegate.analysis.dynamics import phase_trace, population_dynamics
from phasegate.analysis.gate import (GateReport,
                                     REPORT_COLUMNS,
                                     format_report,
                                     gate_fidelity,
                                     make_gate_report,
                                     report_row)
from phasegate.analysis.spectrum import pulse_spectrum
from phasegate.analysis.speedlimit import SpeedLimits, speed_limit_estimates
from phasegate.cli.config import (ExperimentConfig,
                                  SweepVariable,
                                  config_hash)
from phasegate.cli.errors import ConfigError
from phasegate.errors import PhasegateError
from phasegate.grid.eigen import (BoundState,
                                  check_grid_convergence,
                                  export_eigenstates,
                                  solve_bound_states)
from phasegate.grid.grid import SpatialGrid, build_grid
from phasegate.krotov.optimize import OptimizationRecord, krotov_optimize
from phasegate.krotov.pulses import (ControlField,
                                     guess_carrier,
                                     load_pulse,
                                     make_guess_pulse,
                                     save_pulse)
from phasegate.model.channels import (ChannelSystem,
                                      SystemMode,
                                      build_calcium_like_system,
                                      build_dipole_system,
                                      reduce_system)
from phasegate.model.hamiltonian import GridHamiltonian
from phasegate.model.targets import (GateTargets,
                                     gate_targets,
                                     trap_ground_state)
from phasegate.propagator.chebychev import propagate
from phasegate.propagator.recorders import PhaseRecorder, PopulationRecorder
from phasegate.util.tables import TableError, write_table
from phasegate.util.units import from_atomic


logger = logging.getLogger(__name__)


#: The largest number of trap eigenstates exported by default.
DEFAULT_EIGENSTATE_COUNT = 50


@dataclass(frozen=True)
class Experiment:
    """The objects an experiment is run on.

    Version Added:
        1.0
    """

    #: The validated configuration.
    config: ExperimentConfig

    #: The system, in the configured mode.
    system: ChannelSystem

    #: The spatial grid.
    grid: SpatialGrid

    #: The gate targets.
    targets: GateTargets

    #: The guess pulse.
    guess: ControlField

    @property
    def comments(self) -> List[str]:
        """The provenance comments stamped on every output table."""
        return [
            'config-hash: %s' % config_hash(self.config),
            'seed: %d' % self.config.seed,
        ]


@dataclass
class OptimizeResult:
    """The outcome of a single optimization.

    Version Added:
        1.0
    """

    #: The gate diagnostics.
    report: GateReport

    #: The optimization record.
    record: OptimizationRecord

    #: The directory the artifacts were written to.
    output_dir: str


@dataclass(frozen=True)
class SweepPoint:
    """The outcome of one sweep value.

    Version Added:
        1.0
    """

    #: The swept value, in atomic units.
    value: float

    #: The gate report row, if the run succeeded.
    row: Optional[Dict[str, object]] = None

    #: The error message, if the run failed.
    error: Optional[str] = None

    @property
    def succeeded(self) -> bool:
        """Whether the run succeeded."""
        return self.error is None


@dataclass
class SweepResult:
    """The outcome of a sweep.

    Version Added:
        1.0
    """

    #: The swept quantity.
    variable: SweepVariable

    #: One point per sweep value, in sweep order.
    points: List[SweepPoint] = field(default_factory=list)

    @property
    def rows(self) -> List[Dict[str, object]]:
        """The report rows of the successful points."""
        return [point.row for point in self.points if point.succeeded]

    @property
    def failures(self) -> List[SweepPoint]:
        """The failed points."""
        return [point for point in self.points if not point.succeeded]


@dataclass(frozen=True)
class CrosscheckResult:
    """Fidelities of one pulse under the reduced and full models.

    Version Added:
        1.0
    """

    #: The gate fidelity in the reduced model.
    f_reduced: float

    #: The gate fidelity in the full model.
    f_full: float

    @property
    def delta(self) -> float:
        """The full-model fidelity minus the reduced-model fidelity."""
        return self.f_full - self.f_reduced


def build_system(
    config: ExperimentConfig,
    mode: Optional[SystemMode] = None,
) -> ChannelSystem:
    """Build the system described by a configuration.

    Args:
        config (phasegate.cli.config.ExperimentConfig):
            The configuration.

        mode (phasegate.model.channels.SystemMode, optional):
            The mode to build. Defaults to the configured mode.

    Returns:
        phasegate.model.channels.ChannelSystem:
        The system.
    """
    if config.model == 'dipole':
        full = build_dipole_system(config.params)
    else:
        full = build_calcium_like_system(config.params)

    if (mode or config.mode) is SystemMode.REDUCED:
        return reduce_system(full)

    return full


def build_experiment(
    config: ExperimentConfig,
    mode: Optional[SystemMode] = None,
) -> Experiment:
    """Build the system, grid, targets and guess of a configuration.

    Args:
        config (phasegate.cli.config.ExperimentConfig):
            The configuration.

        mode (phasegate.model.channels.SystemMode, optional):
            The mode to build. Defaults to the configured mode.

    Returns:
        Experiment:
        The experiment.
    """
    system = build_system(config, mode)
    grid = build_grid(config.grid, system.envelope_potential)
    targets = gate_targets(system, grid, config.duration, config.chi_target)
    carrier = guess_carrier(
        system,
        detuning=config.guess.detuning,
        carrier_divisor=config.guess.carrier_divisor,
        compensate_interaction=config.guess.compensate_interaction)
    guess = make_guess_pulse(config.duration, carrier, system, dt=config.dt)

    return Experiment(config=config,
                      system=system,
                      grid=grid,
                      targets=targets,
                      guess=guess)


def _write_artifacts(
    experiment: Experiment,
    record: OptimizationRecord,
    report: GateReport,
    population_recorder: PopulationRecorder,
    phase_recorder: PhaseRecorder,
    output_dir: str,
) -> None:
    comments = experiment.comments
    targets = experiment.targets
    os.makedirs(output_dir, exist_ok=True)

    with open(os.path.join(output_dir, 'config.yaml'), 'w') as fp:
        yaml.safe_dump(dict(experiment.config.raw), fp, sort_keys=True)

    with open(os.path.join(output_dir, 'report.txt'), 'w') as fp:
        fp.write(''.join('# %s\n' % comment for comment in comments))
        fp.write(format_report(report))
        fp.write('\n')

    row = report_row(report)
    write_table(os.path.join(output_dir, 'report.csv'),
                REPORT_COLUMNS,
                [[row[column] for column in REPORT_COLUMNS]],
                comments=comments)
    record.write_convergence(os.path.join(output_dir, 'convergence.csv'),
                             comments=comments)
    save_pulse(os.path.join(output_dir, 'pulse.csv'), record.field,
               comments=comments)
    pulse_spectrum(record.field).write_table(
        os.path.join(output_dir, 'spectrum.csv'),
        comments=comments)

    for index, name in enumerate(targets.names):
        population_recorder.write_table(
            os.path.join(output_dir, 'populations_%s.csv' % name),
            index,
            comments=comments)
        population_recorder.write_channel_table(
            os.path.join(output_dir, 'channels_%s.csv' % name),
            index,
            comments=comments)

    trace = phase_trace(phase_recorder, targets, experiment.system.params.e1)
    trace.write_table(os.path.join(output_dir, 'phase_trace.csv'),
                      comments=comments)

    dynamics = population_dynamics(population_recorder, targets)
    write_table(
        os.path.join(output_dir, 'population_dynamics.csv'),
        ['t_fs', 'pop_00', 'pop_0', 'pop_single_excited'],
        ([from_atomic(t, 'fs'), float(a), float(b), float(c)]
         for t, a, b, c in zip(dynamics.times, dynamics.pop_00,
                               dynamics.pop_0,
                               dynamics.pop_single_excited)),
        comments=comments)

    logger.info('Wrote optimization artifacts to %s', output_dir)


def run_optimize(
    config: ExperimentConfig,
    *,
    output_dir: Optional[str] = None,
    resume: Optional[str] = None,
) -> OptimizeResult:
    """Run a single optimization and write its artifacts.

    The artifacts are the configuration, the gate report (as text and as
    a CSV row), the convergence log, the optimized pulse and its
    spectrum, the population dynamics of every basis state, and the
    phase traces.

    Args:
        config (phasegate.cli.config.ExperimentConfig):
            The configuration.

        output_dir (str, optional):
            The directory to write to. Defaults to the configured one.

        resume (str, optional):
            A pulse file from an earlier run to continue from.

    Returns:
        OptimizeResult:
        The result.

    Raises:
        phasegate.cli.errors.ConfigError:
            The pulse to resume from couldn't be loaded.

        phasegate.errors.NumericalError:
            The optimization was aborted.
    """
    output_dir = output_dir or config.output_dir
    experiment = build_experiment(config)
    system = experiment.system
    grid = experiment.grid
    targets = experiment.targets
    continue_from = None

    if resume:
        try:
            continue_from = load_pulse(resume)
        except TableError as e:
            raise ConfigError(str(e), key='--resume')

        logger.info('Resuming from %s', resume)

    hamiltonian = GridHamiltonian(system, grid)
    _energy, ground = trap_ground_state(system, grid)
    population_recorder = PopulationRecorder(hamiltonian, reference=ground)
    phase_recorder = PhaseRecorder(
        hamiltonian,
        hamiltonian.pack_many([item.initial for item in targets.basis]))

    logger.info('Optimizing T = %g fs, C3 = %g au in %s mode',
                from_atomic(config.duration, 'fs'), config.params.c3,
                system.mode.value)

    record = krotov_optimize(
        system=system,
        grid=grid,
        targets=targets,
        guess=experiment.guess,
        config=config.krotov,
        propagator_config=replace(config.propagator,
                                  dt=experiment.guess.dt),
        continue_from=continue_from,
        recorders=[population_recorder, phase_recorder])
    report = make_gate_report(system, grid, targets, record.final_states,
                              iterations=record.n_iterations,
                              delta_f=record.final.delta_f,
                              converged=record.converged)

    _write_artifacts(experiment, record, report, population_recorder,
                     phase_recorder, output_dir)

    return OptimizeResult(report=report,
                          record=record,
                          output_dir=output_dir)


def _run_sweep_point(
    job: Tuple[ExperimentConfig, int, float, str],
) -> SweepPoint:
    config, index, value, output_dir = job

    logger.info('Started sweep point %d (%s = %g)',
                index, config.sweep.variable.value, value)

    with threadpool_limits(limits=1):
        try:
            result = run_optimize(config.with_sweep_value(value),
                                  output_dir=output_dir)
        except PhasegateError as e:
            logger.warning('Sweep point %d (%g) failed: %s', index, value, e)

            return SweepPoint(value=value, error=str(e))

    logger.info('Finished sweep point %d: F = %.6f',
                index, result.report.gate_fidelity)

    return SweepPoint(value=value, row=report_row(result.report))


def run_sweep(
    config: ExperimentConfig,
    *,
    workers: Optional[int] = None,
    output_dir: Optional[str] = None,
) -> SweepResult:
    """Run one optimization per sweep value.

    Points run independently, in worker processes if more than one worker
    is requested. A failed point is recorded and the sweep continues.
    The successful rows are written to ``sweep.csv`` in sweep order, and
    failures to ``sweep_failures.csv``.

    Args:
        config (phasegate.cli.config.ExperimentConfig):
            The configuration. It must define a sweep.

        workers (int, optional):
            The number of worker processes. Defaults to the configured
            number.

        output_dir (str, optional):
            The directory to write to. Defaults to the configured one.

    Returns:
        SweepResult:
        The result.

    Raises:
        phasegate.cli.errors.ConfigError:
            The configuration defines no sweep.
    """
    if config.sweep is None:
        raise ConfigError('the configuration defines no sweep.',
                          key='sweep')

    output_dir = output_dir or config.output_dir
    workers = workers or config.workers
    sweep = config.sweep
    jobs = [
        (config, index, value,
         os.path.join(output_dir, 'point_%03d' % index))
        for index, value in enumerate(sweep.values)
    ]

    logger.info('Sweeping %s over %d values with %d worker(s)',
                sweep.variable.value, len(jobs), workers)

    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as executor:
            points = list(executor.map(_run_sweep_point, jobs))
    else:
        points = [_run_sweep_point(job) for job in jobs]

    result = SweepResult(variable=sweep.variable, points=points)
    comments = [
        'config-hash: %s' % config_hash(config),
        'seed: %d' % config.seed,
        'sweep: %s' % sweep.variable.value,
    ]
    os.makedirs(output_dir, exist_ok=True)
    write_table(os.path.join(output_dir, 'sweep.csv'),
                REPORT_COLUMNS,
                ([row[column] for column in REPORT_COLUMNS]
                 for row in result.rows),
                comments=comments)

    if result.failures:
        write_table(os.path.join(output_dir, 'sweep_failures.csv'),
                    ['value_au', 'error'],
                    ([point.value, point.error]
                     for point in result.failures),
                    comments=comments)
        logger.warning('%d of %d sweep points failed',
                       len(result.failures), len(points))

    return result


def run_crosscheck(
    config: ExperimentConfig,
    pulse_file: str,
) -> CrosscheckResult:
    """Propagate a pulse under the reduced and the full model.

    Both fidelities are four-state gate fidelities, so they compare like
    with like.

    Args:
        config (phasegate.cli.config.ExperimentConfig):
            The configuration the pulse was optimized with.

        pulse_file (str):
            The pulse file.

    Returns:
        CrosscheckResult:
        The fidelities.

    Raises:
        phasegate.cli.errors.ConfigError:
            The pulse couldn't be loaded or doesn't match the configured
            time lattice.
    """
    try:
        pulse = load_pulse(pulse_file)
    except TableError as e:
        raise ConfigError(str(e), key='--pulse')

    expected_steps = max(1, int(round(config.duration / config.dt)))

    if (pulse.n_steps != expected_steps or
        not math.isclose(pulse.duration, config.duration, rel_tol=1e-9)):
        raise ConfigError(
            'the pulse has %d steps over %r, but the configuration '
            'expects %d steps over %r.'
            % (pulse.n_steps, pulse.duration, expected_steps,
               config.duration),
            key='time')

    propagator_config = replace(config.propagator, dt=pulse.dt)
    fidelities: Dict[SystemMode, float] = {}

    for mode in (SystemMode.REDUCED, SystemMode.FULL8):
        system = build_system(config, mode)
        grid = build_grid(config.grid, system.envelope_potential)
        targets = gate_targets(system, grid, config.duration,
                               config.chi_target)
        final_states = propagate(
            GridHamiltonian(system, grid),
            [item.initial for item in targets.basis],
            pulse,
            config=propagator_config)
        fidelities[mode] = gate_fidelity(final_states, targets, grid)

        logger.info('Gate fidelity in %s mode: %.10f',
                    mode.value, fidelities[mode])

    return CrosscheckResult(f_reduced=fidelities[SystemMode.REDUCED],
                            f_full=fidelities[SystemMode.FULL8])


def run_eigenstates(
    config: ExperimentConfig,
    *,
    count: Optional[int] = None,
    output_dir: Optional[str] = None,
    check_convergence: bool = False,
) -> Sequence[BoundState]:
    """Export the trap eigenstates of a configuration.

    Args:
        config (phasegate.cli.config.ExperimentConfig):
            The configuration.

        count (int, optional):
            The number of eigenstates. Defaults to 50, or a quarter of the
            grid points if fewer.

        output_dir (str, optional):
            The directory to write ``eigenstates.csv`` to. Defaults to the
            configured one.

        check_convergence (bool, optional):
            Whether to also compare against a grid with twice the points.

    Returns:
        list of phasegate.grid.eigen.BoundState:
        The eigenpairs.
    """
    output_dir = output_dir or config.output_dir
    system = build_system(config)
    grid = build_grid(config.grid, system.envelope_potential)
    trap = system.channels[0].trap
    count = count or min(DEFAULT_EIGENSTATE_COUNT, grid.n_points // 4)
    states = solve_bound_states(grid, trap, count)
    comments = [
        'config-hash: %s' % config_hash(config),
        'seed: %d' % config.seed,
    ]

    if check_convergence:
        change = check_grid_convergence(config.grid, trap, count)
        comments.append('convergence: %r' % change)

        logger.info('Largest relative eigenvalue change on doubling the '
                    'grid: %g', change)

    os.makedirs(output_dir, exist_ok=True)
    path = os.path.join(output_dir, 'eigenstates.csv')
    export_eigenstates(path, states, comments=comments)

    logger.info('Wrote %d eigenstates to %s', len(states), path)

    return states


def run_estimate(config: ExperimentConfig) -> SpeedLimits:
    """Return the speed-limit timescales of a configuration.

    Args:
        config (phasegate.cli.config.ExperimentConfig):
            The configuration.

    Returns:
        phasegate.analysis.speedlimit.SpeedLimits:
        The timescales, with the trap gap taken from the grid.
    """
    system = build_system(config)
    grid = build_grid(config.grid, system.envelope_potential)

    return speed_limit_estimates(system, grid=grid)


def format_estimate(limits: SpeedLimits) -> str:
    """Return speed-limit timescales as a key-value text block.

    Args:
        limits (phasegate.analysis.speedlimit.SpeedLimits):
            The timescales.

    Returns:
        str:
        One ``key = value`` line per quantity, times in picoseconds.
    """
    items = [
        ('interaction_energy_cm1',
         from_atomic(limits.interaction_energy, 'cm1')),
        ('t_int_rad_ps', from_atomic(limits.t_int_rad, 'ps')),
        ('t_int_pi_ps', from_atomic(limits.t_int_pi, 'ps')),
        ('t_v_ps', from_atomic(limits.t_v, 'ps')),
        ('trap_gap_cm1', from_atomic(limits.trap_gap, 'cm1')),
        ('overlap', limits.overlap),
    ]

    return '\n'.join('%s = %r' % item for item in items)
