"""Experiment configuration files.

Configurations are YAML files of sections. Dimensional keys carry their
unit as a suffix (``trap.omega_mhz``, ``grid.r_max_a0``), and may use any
unit of their dimension. Everything is converted to atomic units on load.

Version Added:
    1.0
"""

from __future__ import annotations

import copy
import enum
import hashlib
import logging
import math
from dataclasses import dataclass, replace
from typing import Any, Dict, Mapping, Optional, Tuple

import yaml

from phasegate.cli.errors import ConfigError
from phasegate.errors import NumericalError
from phasegate.grid.grid import GridSpec, MappedMapping, UniformMapping
from phasegate.krotov.optimize import KrotovConfig
from phasegate.model.channels import SystemMode, SystemParams
from phasegate.propagator.chebychev import PropagatorConfig
from phasegate.util.units import UnitError, split_unit_key, to_atomic


logger = logging.getLogger(__name__)


#: The smallest carrier period, in time steps, of a toy configuration.
MIN_STEPS_PER_CARRIER_PERIOD = 20

#: The largest gate duration, in time steps, of a toy configuration.
MAX_STEPS_PER_GATE = 1_000_000


class Regime(enum.Enum):
    """The scale of an experiment.

    Version Added:
        1.0
    """

    #: Scale-compressed parameters feasible on a desktop.
    TOY = 'toy'

    #: Physical parameters, which take a long time to run.
    PHYSICAL = 'physical'


class SweepVariable(enum.Enum):
    """The quantity varied by a sweep.

    Version Added:
        1.0
    """

    GATE_TIME = 'gate_time'
    C3 = 'c3'


_MODES = {
    'full': SystemMode.FULL8,
    'full8': SystemMode.FULL8,
    'reduced': SystemMode.REDUCED,
    'reduced4plus2': SystemMode.REDUCED,
}

_SWEEP_DIMENSIONS = {
    SweepVariable.GATE_TIME: 'time',
    SweepVariable.C3: 'c3',
}


@dataclass(frozen=True)
class GuessConfig:
    """Settings for the guess pulse.

    Version Added:
        1.0
    """

    #: The carrier detuning from the atomic line.
    detuning: float = 0.0

    #: The number of photons driving the transition.
    carrier_divisor: int = 1

    #: Whether to shift the carrier by the interaction energy.
    compensate_interaction: bool = False


@dataclass(frozen=True)
class SweepDefinition:
    """A sweep over one experiment parameter.

    Version Added:
        1.0
    """

    #: The swept quantity.
    variable: SweepVariable

    #: The values, in atomic units, strictly increasing.
    values: Tuple[float, ...]


@dataclass(frozen=True)
class ExperimentConfig:
    """A validated experiment configuration, in atomic units.

    Version Added:
        1.0
    """

    #: The physical parameters.
    params: SystemParams

    #: The grid specification.
    grid: GridSpec

    #: The gate duration.
    duration: float

    #: The time step.
    dt: float

    #: The optimization settings.
    krotov: KrotovConfig

    #: The propagator settings.
    propagator: PropagatorConfig

    #: The guess pulse settings.
    guess: GuessConfig

    #: The nonlocal phase to implement.
    chi_target: float

    #: The model to optimize in.
    mode: SystemMode

    #: The scale of the experiment.
    regime: Regime

    #: The potential model, ``calcium`` or ``dipole``.
    model: str

    #: The sweep, if any.
    sweep: Optional[SweepDefinition]

    #: The directory artifacts are written to.
    output_dir: str

    #: The seed recorded with every artifact.
    seed: int

    #: The number of parallel sweep workers.
    workers: int

    #: The parsed configuration mapping.
    raw: Mapping[str, Any]

    def with_sweep_value(
        self,
        value: float,
    ) -> ExperimentConfig:
        """Return the configuration of one sweep point.

        The returned configuration has no sweep, and its raw mapping (and
        so its hash) records the swept value.

        Args:
            value (float):
                The swept value, in atomic units.

        Returns:
            ExperimentConfig:
            The configuration of the sweep point.

        Raises:
            phasegate.cli.errors.ConfigError:
                The configuration has no sweep.
        """
        if self.sweep is None:
            raise ConfigError('the configuration defines no sweep.',
                              key='sweep')

        raw = copy.deepcopy(dict(self.raw))
        raw.pop('sweep', None)

        if self.sweep.variable is SweepVariable.GATE_TIME:
            raw['time'] = _replace_quantity(raw.get('time', {}), 'T',
                                            value)

            return replace(self, duration=value, sweep=None, raw=raw)
        else:
            raw['system'] = _replace_quantity(raw.get('system', {}), 'c3',
                                              value)

            return replace(self,
                           params=replace(self.params, c3=value),
                           sweep=None,
                           raw=raw)


def _replace_quantity(
    section: Mapping[str, Any],
    name: str,
    value: float,
) -> Dict[str, Any]:
    result = {
        key: item
        for key, item in section.items()
        if split_unit_key(key)[0] != name
    }
    result['%s_au' % name] = value

    return result


def config_hash(config: ExperimentConfig) -> str:
    """Return the provenance hash of a configuration.

    This is the SHA-256 of the canonical YAML dump of the parsed mapping.

    Args:
        config (ExperimentConfig):
            The configuration.

    Returns:
        str:
        The hex digest.
    """
    canonical = yaml.safe_dump(dict(config.raw), sort_keys=True)

    return hashlib.sha256(canonical.encode('utf-8')).hexdigest()


def _get_section(
    data: Mapping[str, Any],
    name: str,
    required: bool = True,
) -> Mapping[str, Any]:
    section = data.get(name)

    if section is None:
        if required:
            raise ConfigError('missing section.', key=name)

        return {}

    if not isinstance(section, Mapping):
        raise ConfigError('must be a mapping.', key=name)

    return section


def _get_quantity(
    section: Mapping[str, Any],
    section_name: str,
    name: str,
    dimension: str,
    default: Optional[float] = None,
) -> float:
    matches = []

    for key in section:
        base, unit = split_unit_key(key)

        if base == name:
            matches.append((key, unit))

    if not matches:
        if default is not None:
            return default

        raise ConfigError('missing required quantity "%s_<unit>".' % name,
                          key=section_name)

    if len(matches) > 1:
        raise ConfigError('"%s" is given more than once (%s).'
                          % (name, ', '.join(key for key, _ in matches)),
                          key=section_name)

    key, unit = matches[0]
    full_key = '%s.%s' % (section_name, key)

    if unit is None:
        raise ConfigError('dimensional keys need a unit suffix.',
                          key=full_key)

    try:
        return to_atomic(float(section[key]), unit, dimension)
    except UnitError as e:
        raise ConfigError(str(e), key=full_key)
    except (TypeError, ValueError):
        raise ConfigError('must be a number.', key=full_key)


def _get_value(
    section: Mapping[str, Any],
    section_name: str,
    name: str,
    kind: type,
    default: Any,
) -> Any:
    if name not in section or section[name] is None:
        return default

    try:
        return kind(section[name])
    except (TypeError, ValueError):
        raise ConfigError('must be a %s.' % kind.__name__,
                          key='%s.%s' % (section_name, name))


def _parse_grid(
    data: Mapping[str, Any],
    mass: float,
) -> GridSpec:
    section = _get_section(data, 'grid')
    mapping_name = _get_value(section, 'grid', 'mapping', str, 'uniform')

    if mapping_name == 'uniform':
        mapping = UniformMapping()
    elif mapping_name == 'mapped':
        mapping = MappedMapping(
            beta=_get_value(section, 'grid', 'beta', float, 0.5),
            e_max=_get_quantity(section, 'grid', 'e_max', 'energy'))
    else:
        raise ConfigError('must be "uniform" or "mapped".',
                          key='grid.mapping')

    return GridSpec(
        r_min=_get_quantity(section, 'grid', 'r_min', 'length'),
        r_max=_get_quantity(section, 'grid', 'r_max', 'length'),
        n_points=_get_value(section, 'grid', 'n_points', int, 0),
        mass=mass,
        mapping=mapping)


def _parse_sweep(
    data: Mapping[str, Any],
) -> Optional[SweepDefinition]:
    section = _get_section(data, 'sweep', required=False)

    if not section:
        return None

    try:
        variable = SweepVariable(section.get('variable'))
    except ValueError:
        raise ConfigError('must be "gate_time" or "c3".',
                          key='sweep.variable')

    keys = [key for key in section if split_unit_key(key)[0] == 'values']

    if len(keys) != 1:
        raise ConfigError('exactly one "values_<unit>" list is required.',
                          key='sweep')

    key = keys[0]
    unit = split_unit_key(key)[1]

    if unit is None or not isinstance(section[key], list) or \
       not section[key]:
        raise ConfigError('must be a non-empty list with a unit suffix.',
                          key='sweep.%s' % key)

    try:
        values = tuple(
            to_atomic(float(value), unit, _SWEEP_DIMENSIONS[variable])
            for value in section[key]
        )
    except UnitError as e:
        raise ConfigError(str(e), key='sweep.%s' % key)

    if any(b <= a for a, b in zip(values, values[1:])):
        raise ConfigError('sweep values must be strictly increasing.',
                          key='sweep.%s' % key)

    return SweepDefinition(variable=variable, values=values)


def _check_feasibility(config: ExperimentConfig) -> None:
    params = config.params
    guess = config.guess
    dt = config.dt
    durations = [config.duration]
    c3_values = [params.c3]

    if config.sweep is not None:
        if config.sweep.variable is SweepVariable.GATE_TIME:
            durations = list(config.sweep.values)
        else:
            c3_values = list(config.sweep.values)

    for c3 in c3_values:
        transition = params.e_a + guess.detuning

        if guess.compensate_interaction:
            transition -= c3 / params.d ** 3

        carrier = transition / guess.carrier_divisor

        if carrier <= 0.0:
            raise ConfigError('the guess carrier frequency must be '
                              'positive.', key='guess')

        if config.regime is Regime.TOY and \
           2.0 * math.pi / carrier < MIN_STEPS_PER_CARRIER_PERIOD * dt:
            raise ConfigError(
                'the carrier period %g is shorter than %d time steps.'
                % (2.0 * math.pi / carrier, MIN_STEPS_PER_CARRIER_PERIOD),
                key='time.dt')

    if config.regime is Regime.TOY and \
       max(durations) > MAX_STEPS_PER_GATE * dt:
        raise ConfigError('a toy gate may take at most %d time steps.'
                          % MAX_STEPS_PER_GATE,
                          key='time.T')

    if config.regime is Regime.PHYSICAL:
        logger.warning('Physical-regime configurations take a very long '
                       'time to run.')


def parse_config(
    data: Mapping[str, Any],
) -> ExperimentConfig:
    """Parse and validate a configuration mapping.

    Args:
        data (dict):
            The parsed YAML mapping.

    Returns:
        ExperimentConfig:
        The validated configuration.

    Raises:
        phasegate.cli.errors.ConfigError:
            The configuration is invalid.
    """
    if not isinstance(data, Mapping):
        raise ConfigError('the configuration must be a mapping.')

    system = _get_section(data, 'system')
    trap = _get_section(data, 'trap')
    time = _get_section(data, 'time')
    krotov = _get_section(data, 'krotov', required=False)
    propagator = _get_section(data, 'propagator', required=False)
    guess = _get_section(data, 'guess', required=False)
    gate = _get_section(data, 'gate', required=False)
    output = _get_section(data, 'output', required=False)

    params = SystemParams(
        e1=_get_quantity(system, 'system', 'e1', 'energy'),
        e_a=_get_quantity(system, 'system', 'e_a', 'energy'),
        mass=_get_quantity(system, 'system', 'mass', 'mass'),
        omega=_get_quantity(trap, 'trap', 'omega', 'frequency'),
        d=_get_quantity(trap, 'trap', 'd', 'length'),
        c3=_get_quantity(system, 'system', 'c3', 'c3'),
        mu0=_get_quantity(system, 'system', 'mu0', 'dipole'))

    try:
        mode = _MODES[str(data.get('mode', 'reduced')).lower()]
    except KeyError:
        raise ConfigError('must be "full" or "reduced".', key='mode')

    try:
        regime = Regime(str(data.get('regime', 'toy')).lower())
    except ValueError:
        raise ConfigError('must be "toy" or "physical".', key='regime')

    model = str(system.get('model', 'calcium')).lower()

    if model not in ('calcium', 'dipole'):
        raise ConfigError('must be "calcium" or "dipole".',
                          key='system.model')

    duration = _get_quantity(time, 'time', 'T', 'time')
    dt = _get_quantity(time, 'time', 'dt', 'time')

    if duration <= 0 or dt <= 0 or dt > duration:
        raise ConfigError('need 0 < dt <= T.', key='time')

    alpha = _get_value(krotov, 'krotov', 'alpha', float, None)

    config = ExperimentConfig(
        params=params,
        grid=_parse_grid(data, params.mass),
        duration=duration,
        dt=dt,
        krotov=KrotovConfig(
            alpha=alpha,
            max_iterations=_get_value(krotov, 'krotov', 'max_iterations',
                                      int, 200),
            convergence_delta_f=_get_value(krotov, 'krotov',
                                           'convergence_delta_f', float,
                                           1e-4),
            record_stride=_get_value(krotov, 'krotov', 'record_stride',
                                     int, 10),
            monotonicity_tolerance=_get_value(krotov, 'krotov',
                                              'monotonicity_tolerance',
                                              float, 1e-10),
            storage_budget_mb=_get_value(krotov, 'krotov',
                                         'storage_budget_mb', float,
                                         1024.0),
            alpha_fraction=_get_value(krotov, 'krotov', 'alpha_fraction',
                                      float, 0.05)),
        propagator=PropagatorConfig(
            dt=dt,
            tolerance=_get_value(propagator, 'propagator', 'tolerance',
                                 float, 1e-12),
            max_order=_get_value(propagator, 'propagator', 'max_order',
                                 int, 20000)),
        guess=GuessConfig(
            detuning=_get_quantity(guess, 'guess', 'detuning', 'energy',
                                   default=0.0),
            carrier_divisor=_get_value(guess, 'guess', 'carrier_divisor',
                                       int, 1),
            compensate_interaction=_get_value(guess, 'guess',
                                              'compensate_interaction',
                                              bool, False)),
        chi_target=math.pi * _get_value(gate, 'gate', 'chi_over_pi',
                                        float, 1.0),
        mode=mode,
        regime=regime,
        model=model,
        sweep=_parse_sweep(data),
        output_dir=_get_value(output, 'output', 'directory', str, 'out'),
        seed=_get_value(data, 'config', 'seed', int, 0),
        workers=max(1, _get_value(data, 'config', 'workers', int, 1)),
        raw=copy.deepcopy(dict(data)))

    if config.guess.carrier_divisor < 1:
        raise ConfigError('must be at least 1.', key='guess.carrier_divisor')

    try:
        config.params.validate()
        config.grid.validate()
        config.krotov.validate()
        config.propagator.validate()
    except NumericalError as e:
        raise ConfigError(str(e))

    _check_feasibility(config)

    return config


def load_config(path: str) -> ExperimentConfig:
    """Load and validate a configuration file.

    Args:
        path (str):
            The path to the YAML file.

    Returns:
        ExperimentConfig:
        The validated configuration.

    Raises:
        phasegate.cli.errors.ConfigError:
            The file can't be read or is invalid.
    """
    try:
        with open(path, 'r') as fp:
            data = yaml.load(fp, Loader=yaml.SafeLoader)
    except OSError as e:
        raise ConfigError('could not read "%s": %s.' % (path, e))
    except yaml.YAMLError as e:
        raise ConfigError('could not parse "%s": %s.' % (path, e))

    logger.debug('Loaded configuration %s', path)

    return parse_config(data)
