"""Chebychev propagation of field-driven channel systems.

The short-time propagator :math:`e^{-iH\\Delta t}` is expanded in
Chebychev polynomials of the Hamiltonian rescaled to ``[-1, 1]``. The
expansion coefficients are Bessel functions of the first kind, and the
series is cut once three consecutive coefficients fall below the
tolerance. The field is constant within each step at its midpoint
sample.

Version Added:
    1.0
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import (TYPE_CHECKING, Callable, Dict, List, Optional,
                    Sequence, Tuple, Union)

import numpy as np
from scipy.special import jv

from phasegate.model.hamiltonian import GridHamiltonian, WaveState
from phasegate.propagator.errors import (ChebychevConvergenceError,
                                         PropagationError,
                                         UnitarityLossError)

if TYPE_CHECKING:
    from phasegate.krotov.pulses import ControlField


logger = logging.getLogger(__name__)


#: Relative padding added to both ends of an estimated spectral range.
SPECTRAL_PADDING = 0.05

#: Headroom applied to the field when a range has to be re-estimated.
FIELD_HEADROOM = 1.25

#: Number of consecutive small coefficients that end the series.
_TAIL_LENGTH = 3


#: A callback receiving ``(time, vectors)`` during propagation.
Recorder = Callable[[float, np.ndarray], None]


@dataclass(frozen=True)
class SpectralRange:
    """Bounds on the spectrum of a Hamiltonian.

    Version Added:
        1.0
    """

    #: The lower bound, in hartree.
    #:
    #: Type:
    #:     float
    e_min: float

    #: The upper bound, in hartree.
    #:
    #: Type:
    #:     float
    e_max: float

    #: The largest field magnitude the bounds are valid for.
    #:
    #: Type:
    #:     float
    max_field: float = 0.0

    @property
    def center(self) -> float:
        """The center of the range."""
        return 0.5 * (self.e_max + self.e_min)

    @property
    def half_width(self) -> float:
        """Half the width of the range."""
        return 0.5 * (self.e_max - self.e_min)


@dataclass(frozen=True)
class PropagatorConfig:
    """Settings for Chebychev propagation.

    Version Added:
        1.0
    """

    #: The time step, in atomic units.
    #:
    #: Type:
    #:     float
    dt: float

    #: The truncation bound on the Chebychev coefficients.
    #:
    #: Type:
    #:     float
    tolerance: float = 1e-12

    #: The largest allowed series order.
    #:
    #: Type:
    #:     int
    max_order: int = 20000

    #: The allowed drift of a propagated norm.
    #:
    #: Type:
    #:     float
    norm_tolerance: float = 1e-6

    def validate(self) -> None:
        """Validate the configuration.

        Raises:
            phasegate.propagator.errors.PropagationError:
                A setting is out of range.
        """
        if self.dt <= 0:
            raise PropagationError('the time step must be positive.')

        if not (0.0 < self.tolerance <= 1e-6):
            raise PropagationError('the Chebychev tolerance must be in '
                                   '(0, 1e-6], not %r.' % self.tolerance)

        if self.max_order < 1:
            raise PropagationError('the maximum Chebychev order must be '
                                   'positive.')


def estimate_spectral_range(
    system,
    grid,
    max_field: float,
    *,
    hamiltonian: Optional[GridHamiltonian] = None,
) -> SpectralRange:
    """Return padded bounds on the spectrum of a system.

    The upper bound adds the largest kinetic energy on the grid to the
    largest potential. Field couplings widen both ends by
    ``max_field * max|mu|`` times the largest number of couplings of any
    channel.

    Args:
        system (phasegate.model.channels.ChannelSystem):
            The channel system.

        grid (phasegate.grid.grid.SpatialGrid):
            The grid.

        max_field (float):
            The largest field magnitude to cover.

        hamiltonian (phasegate.model.hamiltonian.GridHamiltonian, optional):
            A prebuilt Hamiltonian for the system, to avoid evaluating the
            potentials again.

    Returns:
        SpectralRange:
        The padded range.
    """
    if hamiltonian is None:
        hamiltonian = GridHamiltonian(system, grid)

    max_field = abs(max_field)
    potential_values = [np.diag(hamiltonian.level_energies)]

    if system.n_channels:
        potential_values.append(hamiltonian.potentials.ravel())

    potential_values = np.concatenate(potential_values)
    kinetic_max = 0.0

    if system.n_channels:
        kinetic_max = (float(np.max(grid.spectral_k ** 2)) /
                       (2.0 * grid.mass) /
                       float(np.min(grid.jacobian)) ** 2)

    coupling_bound = 0.0

    for dipole in (hamiltonian.coupling, hamiltonian.level_dipole):
        if dipole.size:
            coordination = int(np.max(np.count_nonzero(dipole, axis=1)))
            coupling_bound = max(coupling_bound,
                                 max_field * float(np.max(np.abs(dipole))) *
                                 coordination)

    e_min = float(potential_values.min()) - coupling_bound
    e_max = float(potential_values.max()) + kinetic_max + coupling_bound
    padding = SPECTRAL_PADDING * max(e_max - e_min, 1e-12)

    return SpectralRange(e_min=e_min - padding,
                         e_max=e_max + padding,
                         max_field=max_field)


def chebychev_coefficients(
    alpha: float,
    tolerance: float = 1e-12,
    max_order: int = 20000,
) -> np.ndarray:
    """Return the Bessel coefficients of a Chebychev expansion.

    The coefficients are :math:`(2 - \\delta_{n0}) J_n(\\alpha)`, truncated
    before the first of three consecutive orders (beyond ``alpha``) whose
    magnitude is below ``tolerance``.

    Args:
        alpha (float):
            The half-width of the spectral range times the time step.

        tolerance (float, optional):
            The truncation bound.

        max_order (int, optional):
            The largest allowed order.

    Returns:
        numpy.ndarray:
        The real coefficients. The length of the array is the number of
        series terms.

    Raises:
        phasegate.propagator.errors.ChebychevConvergenceError:
            The series needs more than ``max_order`` terms.
    """
    start = int(math.ceil(alpha))
    limits = [min(max_order, int(1.5 * alpha) + 100), max_order]

    for limit in limits:
        orders = np.arange(limit + _TAIL_LENGTH)
        values = jv(orders, alpha)
        small = np.abs(values) < tolerance

        if start + _TAIL_LENGTH <= len(small):
            run = np.ones(len(small) - start - _TAIL_LENGTH + 1, dtype=bool)

            for offset in range(_TAIL_LENGTH):
                run &= small[start + offset:
                             len(small) - _TAIL_LENGTH + 1 + offset]

            hits = np.flatnonzero(run)

            if hits.size and start + hits[0] <= max_order:
                n_terms = max(1, start + int(hits[0]))
                coefficients = 2.0 * values[:n_terms]
                coefficients[0] = values[0]

                return coefficients

    raise ChebychevConvergenceError(max_order=max_order)


class ChebychevPropagator:
    """Propagates packed state vectors step by step.

    Version Added:
        1.0
    """

    ######################
    # Instance variables #
    ######################

    #: The propagator settings.
    #:
    #: Type:
    #:     PropagatorConfig
    config: PropagatorConfig

    #: The Hamiltonian being propagated.
    #:
    #: Type:
    #:     phasegate.model.hamiltonian.GridHamiltonian
    hamiltonian: GridHamiltonian

    #: The number of series terms used by the most recent step.
    #:
    #: Type:
    #:     int
    last_order: int

    #: The spectral range currently in use.
    #:
    #: Type:
    #:     SpectralRange
    spectral_range: SpectralRange

    def __init__(
        self,
        hamiltonian: GridHamiltonian,
        config: PropagatorConfig,
        spectral_range: Optional[SpectralRange] = None,
    ) -> None:
        """Initialize the propagator.

        Args:
            hamiltonian (phasegate.model.hamiltonian.GridHamiltonian):
                The Hamiltonian to propagate.

            config (PropagatorConfig):
                The propagator settings.

            spectral_range (SpectralRange, optional):
                Bounds on the spectrum. If not provided, they're estimated
                for zero field and widened as larger fields are seen.
        """
        config.validate()

        self.hamiltonian = hamiltonian
        self.config = config
        self.last_order = 0
        self._coefficients: Dict[Tuple[float, int], np.ndarray] = {}

        if spectral_range is None:
            spectral_range = self._estimate(0.0)

        self.spectral_range = spectral_range

    def _estimate(self, max_field: float) -> SpectralRange:
        return estimate_spectral_range(self.hamiltonian.system,
                                       self.hamiltonian.grid,
                                       max_field,
                                       hamiltonian=self.hamiltonian)

    def ensure_field(
        self,
        field_value: float,
    ) -> None:
        """Widen the spectral range if it doesn't cover a field value.

        Args:
            field_value (float):
                The field amplitude about to be used.
        """
        if abs(field_value) > self.spectral_range.max_field:
            self.spectral_range = self._estimate(FIELD_HEADROOM *
                                                 abs(field_value))
            self._coefficients.clear()

            logger.debug('Widened spectral range to [%g, %g] for field %g',
                         self.spectral_range.e_min,
                         self.spectral_range.e_max,
                         field_value)

    def _get_coefficients(self, dt: float) -> np.ndarray:
        sign = 1 if dt > 0 else -1
        key = (abs(dt), sign)

        try:
            return self._coefficients[key]
        except KeyError:
            pass

        bessel = chebychev_coefficients(
            self.spectral_range.half_width * abs(dt),
            tolerance=self.config.tolerance,
            max_order=self.config.max_order)
        orders = np.arange(len(bessel))
        coefficients = bessel * (-1j * sign) ** orders
        self._coefficients[key] = coefficients

        logger.debug('Chebychev expansion for dt = %g uses %d terms '
                     '(spectral range [%g, %g])',
                     dt, len(coefficients),
                     self.spectral_range.e_min,
                     self.spectral_range.e_max)

        return coefficients

    def step(
        self,
        vectors: np.ndarray,
        field_value: float,
        dt: float,
    ) -> np.ndarray:
        """Propagate vectors by one time step.

        Args:
            vectors (numpy.ndarray):
                Packed state vectors.

            field_value (float):
                The field amplitude, held constant within the step.

            dt (float):
                The time step. Negative steps propagate backward.

        Returns:
            numpy.ndarray:
            The propagated vectors.

        Raises:
            phasegate.propagator.errors.ChebychevConvergenceError:
                The series didn't converge.
        """
        self.ensure_field(field_value)

        coefficients = self._get_coefficients(dt)
        center = self.spectral_range.center
        half_width = self.spectral_range.half_width
        apply = self.hamiltonian.apply

        def normalized(v: np.ndarray) -> np.ndarray:
            return (apply(v, field_value) - center * v) / half_width

        previous = vectors
        result = coefficients[0] * previous

        if len(coefficients) > 1:
            current = normalized(previous)
            result = result + coefficients[1] * current

            for coefficient in coefficients[2:]:
                previous, current = (current,
                                     2.0 * normalized(current) - previous)
                result = result + coefficient * current

        self.last_order = len(coefficients)

        return result * np.exp(-1j * center * dt)


def step(
    hamiltonian: GridHamiltonian,
    state: WaveState,
    field_value: float,
    config: PropagatorConfig,
    spectral_range: Optional[SpectralRange] = None,
    *,
    backward: bool = False,
) -> WaveState:
    """Propagate a single state by one time step.

    Args:
        hamiltonian (phasegate.model.hamiltonian.GridHamiltonian):
            The Hamiltonian.

        state (phasegate.model.hamiltonian.WaveState):
            The state.

        field_value (float):
            The field amplitude during the step.

        config (PropagatorConfig):
            The propagator settings.

        spectral_range (SpectralRange, optional):
            Bounds on the spectrum.

        backward (bool, optional):
            Whether to step backward in time.

    Returns:
        phasegate.model.hamiltonian.WaveState:
        The propagated state.
    """
    propagator = ChebychevPropagator(hamiltonian, config, spectral_range)
    dt = -config.dt if backward else config.dt
    vector = propagator.step(hamiltonian.pack(state), field_value, dt)

    return hamiltonian.unpack(vector, time_tag=state.time_tag + dt)


def propagate_vectors(
    propagator: ChebychevPropagator,
    vectors: np.ndarray,
    field: ControlField,
    *,
    direction: str = 'forward',
    recorder: Optional[Recorder] = None,
    record_stride: int = 1,
) -> np.ndarray:
    """Propagate packed vectors over the whole time lattice of a field.

    Args:
        propagator (ChebychevPropagator):
            The propagator.

        vectors (numpy.ndarray):
            Packed state vectors at the start of the propagation.

        field (phasegate.krotov.pulses.ControlField):
            The field. Sample ``k`` drives the step from ``t_k`` to
            ``t_{k+1}``.

        direction (str, optional):
            ``forward`` (from 0 to T) or ``backward`` (from T to 0).

        recorder (callable, optional):
            A callback receiving ``(time, vectors)`` at the initial time,
            every ``record_stride`` steps, and the final time.

        record_stride (int, optional):
            The number of steps between recorder calls.

    Returns:
        numpy.ndarray:
        The propagated vectors.

    Raises:
        phasegate.propagator.errors.PropagationError:
            The direction is invalid or the field doesn't match the
            configured time step.

        phasegate.propagator.errors.UnitarityLossError:
            A norm drifted by more than the configured tolerance.
    """
    if direction not in ('forward', 'backward'):
        raise PropagationError('unknown propagation direction "%s".'
                               % direction)

    dt = field.dt

    if not math.isclose(dt, propagator.config.dt, rel_tol=1e-9):
        raise PropagationError('the field time step %r does not match the '
                               'configured time step %r.'
                               % (dt, propagator.config.dt))

    n_steps = len(field.amplitude)
    hamiltonian = propagator.hamiltonian
    initial_norms = hamiltonian.norms(vectors)
    norm_tolerance = propagator.config.norm_tolerance

    if direction == 'forward':
        indices: Sequence[int] = range(n_steps)
        signed_dt = dt
    else:
        indices = range(n_steps - 1, -1, -1)
        signed_dt = -dt

    if recorder is not None:
        recorder(float(field.times[0 if direction == 'forward' else -1]),
                 vectors)

    for count, k in enumerate(indices, start=1):
        vectors = propagator.step(vectors, field.amplitude[k], signed_dt)
        time = float(field.times[k + 1 if direction == 'forward' else k])

        norms = hamiltonian.norms(vectors)
        drift = np.max(np.abs(norms - initial_norms))

        if drift > norm_tolerance:
            worst = int(np.argmax(np.abs(norms - initial_norms)))

            raise UnitarityLossError(norm=float(np.ravel(norms)[worst]),
                                     time=time)

        if recorder is not None and (count % record_stride == 0 or
                                     count == n_steps):
            recorder(time, vectors)

    return vectors


def propagate(
    hamiltonian: GridHamiltonian,
    state: Union[WaveState, Sequence[WaveState]],
    field: ControlField,
    *,
    config: PropagatorConfig,
    direction: str = 'forward',
    recorder: Optional[Recorder] = None,
    record_stride: int = 1,
    spectral_range: Optional[SpectralRange] = None,
) -> Union[WaveState, List[WaveState]]:
    """Propagate one or more states over the time lattice of a field.

    Forward propagation applies :math:`U(T, 0)`. Backward propagation
    starts at T and applies :math:`U^\\dagger(t, T)` by stepping with
    negative time steps.

    Args:
        hamiltonian (phasegate.model.hamiltonian.GridHamiltonian):
            The Hamiltonian.

        state (phasegate.model.hamiltonian.WaveState or list):
            The state, or a list of states propagated together.

        field (phasegate.krotov.pulses.ControlField):
            The field.

        config (PropagatorConfig):
            The propagator settings.

        direction (str, optional):
            ``forward`` or ``backward``.

        recorder (callable, optional):
            A callback receiving ``(time, vectors)`` with packed vectors of
            shape ``(states, dimension)``.

        record_stride (int, optional):
            The number of steps between recorder calls.

        spectral_range (SpectralRange, optional):
            Bounds on the spectrum. By default these are estimated from
            the largest field amplitude.

    Returns:
        phasegate.model.hamiltonian.WaveState or list:
        The propagated state or states.
    """
    single = isinstance(state, WaveState)
    states = [state] if single else list(state)

    if spectral_range is None:
        spectral_range = estimate_spectral_range(
            hamiltonian.system, hamiltonian.grid,
            float(np.max(np.abs(field.amplitude), initial=0.0)),
            hamiltonian=hamiltonian)

    propagator = ChebychevPropagator(hamiltonian, config, spectral_range)
    vectors = propagate_vectors(propagator,
                                hamiltonian.pack_many(states),
                                field,
                                direction=direction,
                                recorder=recorder,
                                record_stride=record_stride)
    end_time = float(field.times[-1 if direction == 'forward' else 0])
    results = [
        hamiltonian.unpack(vector, time_tag=end_time)
        for vector in vectors
    ]

    return results[0] if single else results
