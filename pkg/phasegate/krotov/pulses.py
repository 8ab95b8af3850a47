"""Control fields and guess pulses.

A :py:class:`ControlField` samples the full oscillating field (carrier
included) at the midpoints of a uniform time lattice. Sample ``k`` drives
the step from ``t_k`` to ``t_{k+1}``.

Version Added:
    1.0
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np
from scipy.integrate import trapezoid

from phasegate.krotov.errors import OptimizationError
from phasegate.model.channels import ChannelSystem
from phasegate.util.tables import (TableError,
                                   get_comment_value,
                                   read_table,
                                   write_table)
from phasegate.util.units import from_atomic


logger = logging.getLogger(__name__)


#: Ratio of the gate duration to the guess envelope's FWHM.
GUESS_FWHM_FRACTION = 1.0 / 6.0

#: Pulse area of the guess, a full Rabi cycle.
GUESS_AREA = 2.0 * math.pi


def shape_function(
    t: np.ndarray,
    duration: float,
) -> np.ndarray:
    """Return the update shape ``sin^2(pi t / T)``.

    Args:
        t (numpy.ndarray):
            The times.

        duration (float):
            The gate duration.

    Returns:
        numpy.ndarray:
        The shape function.
    """
    return np.sin(np.pi * np.asarray(t) / duration) ** 2


def make_time_lattice(
    duration: float,
    dt: float,
) -> np.ndarray:
    """Return a uniform time lattice over ``[0, duration]``.

    The number of steps is ``duration / dt`` rounded to the nearest
    integer, so the actual step may differ slightly from ``dt``.

    Args:
        duration (float):
            The gate duration.

        dt (float):
            The requested time step.

    Returns:
        numpy.ndarray:
        The lattice points.
    """
    n_steps = max(1, int(round(duration / dt)))

    return np.linspace(0.0, duration, n_steps + 1)


@dataclass(frozen=True, eq=False)
class ControlField:
    """A real control field on a uniform time lattice.

    Version Added:
        1.0
    """

    #: The lattice points, from 0 to T.
    #:
    #: Type:
    #:     numpy.ndarray
    times: np.ndarray

    #: The field at each lattice interval's midpoint.
    #:
    #: Type:
    #:     numpy.ndarray
    amplitude: np.ndarray

    #: The angular carrier frequency the field was built with.
    #:
    #: Type:
    #:     float
    carrier_freq: float = 0.0

    def __post_init__(self) -> None:
        if len(self.amplitude) != len(self.times) - 1:
            raise OptimizationError(
                'a field on %d lattice points needs %d samples, not %d.'
                % (len(self.times), len(self.times) - 1,
                   len(self.amplitude)))

        if not np.all(np.isfinite(self.amplitude)):
            raise OptimizationError('the field amplitude is not finite.')

    @property
    def dt(self) -> float:
        """The lattice step."""
        return float(self.times[1] - self.times[0])

    @property
    def duration(self) -> float:
        """The gate duration T."""
        return float(self.times[-1])

    @property
    def n_steps(self) -> int:
        """The number of lattice intervals."""
        return len(self.amplitude)

    @property
    def midpoints(self) -> np.ndarray:
        """The times of the field samples."""
        return 0.5 * (self.times[1:] + self.times[:-1])

    @property
    def shape(self) -> np.ndarray:
        """The shape function on the lattice points."""
        shape = shape_function(self.times, self.duration)
        shape[0] = shape[-1] = 0.0

        return shape

    @property
    def update_shape(self) -> np.ndarray:
        """The update shape for each sample.

        The first and last samples are pinned so the field keeps its
        values at ``t = 0`` and ``t = T``.
        """
        shape = shape_function(self.midpoints, self.duration)
        shape[0] = shape[-1] = 0.0

        return shape

    def on_lattice(self) -> np.ndarray:
        """Return the field at the lattice points.

        Interior points average their neighboring samples. The end points
        take the first and last samples.

        Returns:
            numpy.ndarray:
            The field at each lattice point.
        """
        amplitude = self.amplitude

        return np.concatenate([
            amplitude[:1],
            0.5 * (amplitude[1:] + amplitude[:-1]),
            amplitude[-1:],
        ])

    def with_amplitude(
        self,
        amplitude: np.ndarray,
    ) -> ControlField:
        """Return a copy of this field with new samples.

        Args:
            amplitude (numpy.ndarray):
                The new samples.

        Returns:
            ControlField:
            The new field.
        """
        return replace(self, amplitude=np.asarray(amplitude, dtype=float))


def fluence(field: ControlField) -> float:
    """Return the fluence of a field.

    This is :math:`\\int \\epsilon^2 dt` by the trapezoid rule on the
    lattice.

    Args:
        field (ControlField):
            The field.

    Returns:
        float:
        The fluence.
    """
    return float(trapezoid(field.on_lattice() ** 2, field.times))


def guess_carrier(
    system: ChannelSystem,
    *,
    detuning: float = 0.0,
    carrier_divisor: int = 1,
    compensate_interaction: bool = False,
) -> float:
    """Return the carrier frequency of the guess pulse.

    The carrier is resonant with the ``|0> -> |a>`` line, plus a detuning,
    divided by ``carrier_divisor`` for multi-photon excitation.

    Args:
        system (phasegate.model.channels.ChannelSystem):
            The system.

        detuning (float, optional):
            The detuning from the atomic line.

        carrier_divisor (int, optional):
            The number of photons needed for the transition.

        compensate_interaction (bool, optional):
            Whether to shift the carrier by the interaction energy at the
            trap distance, to address the interacting pair.

    Returns:
        float:
        The angular carrier frequency.
    """
    params = system.params
    transition = params.e_a + detuning

    if compensate_interaction:
        transition -= params.interaction_energy

    return transition / carrier_divisor


def make_guess_pulse(
    duration: float,
    carrier: float,
    system: ChannelSystem,
    *,
    dt: float,
    kind: str = 'gaussian_2pi',
) -> ControlField:
    """Return a Gaussian 2pi guess pulse.

    The envelope is centered at T/2 with a FWHM of T/6. Its peak is chosen
    so the single-atom pulse area :math:`\\int \\mu_0 E(t) dt` is 2pi on
    the lattice.

    Args:
        duration (float):
            The gate duration.

        carrier (float):
            The angular carrier frequency.

        system (phasegate.model.channels.ChannelSystem):
            The system, which provides the transition dipole.

        dt (float):
            The time step.

        kind (str, optional):
            The pulse kind. Only ``gaussian_2pi`` is supported.

    Returns:
        ControlField:
        The guess pulse.

    Raises:
        phasegate.krotov.errors.OptimizationError:
            The duration or pulse kind is invalid.
    """
    if duration <= 0:
        raise OptimizationError('the gate duration must be positive.')

    if kind != 'gaussian_2pi':
        raise OptimizationError('unknown guess pulse kind "%s".' % kind)

    times = make_time_lattice(duration, dt)
    midpoints = 0.5 * (times[1:] + times[:-1])
    fwhm = GUESS_FWHM_FRACTION * duration
    sigma = fwhm / (2.0 * math.sqrt(2.0 * math.log(2.0)))
    envelope = np.exp(-0.5 * ((midpoints - 0.5 * duration) / sigma) ** 2)
    step = times[1] - times[0]
    peak = GUESS_AREA / (system.params.mu0 * float(np.sum(envelope)) * step)

    logger.debug('Guess pulse: T = %g, carrier = %g, peak field = %g',
                 duration, carrier, peak)

    amplitude = peak * envelope * np.cos(carrier * midpoints)

    return ControlField(times=times,
                        amplitude=amplitude,
                        carrier_freq=carrier)


def pulse_area(
    envelope: np.ndarray,
    dt: float,
    mu0: float,
) -> float:
    """Return the pulse area of an envelope sampled at midpoints.

    Args:
        envelope (numpy.ndarray):
            The envelope samples.

        dt (float):
            The time step.

        mu0 (float):
            The transition dipole.

    Returns:
        float:
        The pulse area, in radians.
    """
    return float(mu0 * np.sum(envelope) * dt)


def save_pulse(
    path: str,
    field: ControlField,
    *,
    comments: Sequence[str] = (),
) -> None:
    """Write a field to a CSV table of ``t_fs, epsilon``.

    Times are the sample midpoints. The lattice and carrier are recorded
    in comment lines so the field can be reloaded exactly.

    Args:
        path (str):
            The path to write.

        field (ControlField):
            The field.

        comments (list of str, optional):
            Provenance comment lines.
    """
    write_table(
        path,
        ['t_fs', 'epsilon'],
        ([from_atomic(t, 'fs'), float(value)]
         for t, value in zip(field.midpoints, field.amplitude)),
        comments=list(comments) + [
            'duration_au=%r' % field.duration,
            'n_steps=%d' % field.n_steps,
            'carrier_au=%r' % float(field.carrier_freq),
        ])


def load_pulse(path: str) -> ControlField:
    """Load a field written by :py:func:`save_pulse`.

    Args:
        path (str):
            The path to read.

    Returns:
        ControlField:
        The field.

    Raises:
        phasegate.util.tables.TableError:
            The file couldn't be read or is incomplete.
    """
    _header, rows, comments = read_table(path)

    try:
        duration = float(get_comment_value(comments, 'duration_au'))
        n_steps = int(get_comment_value(comments, 'n_steps'))
        carrier = float(get_comment_value(comments, 'carrier_au') or 0.0)
    except (TypeError, ValueError):
        raise TableError('pulse file "%s" is missing its lattice header.'
                         % path)

    amplitude = np.array([float(row[1]) for row in rows])

    if len(amplitude) != n_steps:
        raise TableError('pulse file "%s" has %d samples, expected %d.'
                         % (path, len(amplitude), n_steps))

    return ControlField(times=np.linspace(0.0, duration, n_steps + 1),
                        amplitude=amplitude,
                        carrier_freq=carrier)

