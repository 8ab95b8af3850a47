"""Krotov optimization of phasegate pulses.

Each iteration propagates the target states backward under the current
field, then sweeps forward in time, updating the field sample of each
interval from the backward state and the forward state under the field
updated so far:

    delta_eps_k = S_k / (2 alpha N) * sum_j Im <chi_j(t_k)| mu |psi_j(t_k)>

With the fidelity ``F = Re[tau] / N`` linear in the final states, this
update never increases ``J = -F + sum_k alpha / S_k * delta_eps_k^2 dt``.

Version Added:
    1.0
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np
from housekeeping.functions import deprecate_non_keyword_only_args

from phasegate.deprecation import RemovedInPhasegate20Warning
from phasegate.grid.grid import SpatialGrid
from phasegate.krotov.errors import (FidelityNaNError,
                                     MonotonicityError,
                                     OptimizationError)
from phasegate.krotov.pulses import ControlField, fluence
from phasegate.krotov.storage import BackwardStorage
from phasegate.model.channels import ChannelSystem
from phasegate.model.hamiltonian import GridHamiltonian, WaveState
from phasegate.model.targets import GateTargets
from phasegate.propagator.chebychev import (ChebychevPropagator,
                                            PropagatorConfig,
                                            estimate_spectral_range)
from phasegate.propagator.errors import UnitarityLossError
from phasegate.propagator.recorders import BaseRecorder
from phasegate.util.tables import write_table


logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class KrotovConfig:
    """Settings for a Krotov optimization.

    Version Added:
        1.0
    """

    #: The step-size penalty. If ``None``, it's estimated from the guess.
    #:
    #: Type:
    #:     float
    alpha: Optional[float] = None

    #: The largest number of iterations.
    #:
    #: Type:
    #:     int
    max_iterations: int = 200

    #: The fidelity gain below which the optimization stops.
    #:
    #: Type:
    #:     float
    convergence_delta_f: float = 1e-4

    #: The number of steps between recorded snapshots.
    #:
    #: Type:
    #:     int
    record_stride: int = 10

    #: The allowed increase of J between iterations.
    #:
    #: Type:
    #:     float
    monotonicity_tolerance: float = 1e-10

    #: The memory available for backward-propagated states, in megabytes.
    #:
    #: Type:
    #:     float
    storage_budget_mb: float = 1024.0

    #: The first-iteration peak update, relative to the guess peak, used
    #: to estimate alpha.
    #:
    #: Type:
    #:     float
    alpha_fraction: float = 0.05

    def validate(self) -> None:
        """Validate the configuration.

        Raises:
            phasegate.krotov.errors.OptimizationError:
                A setting is out of range.
        """
        if self.alpha is not None and not self.alpha > 0:
            raise OptimizationError('alpha must be positive, not %r.'
                                    % self.alpha)

        if self.max_iterations < 0:
            raise OptimizationError('max_iterations must not be negative.')

        if self.record_stride < 1:
            raise OptimizationError('record_stride must be at least 1.')

        if not self.alpha_fraction > 0:
            raise OptimizationError('alpha_fraction must be positive.')


@dataclass(frozen=True)
class IterationInfo:
    """Convergence data of one iteration.

    Version Added:
        1.0
    """

    #: The iteration number. Iteration 0 is the guess.
    iteration: int

    #: The functional J.
    functional: float

    #: The fidelity F.
    fidelity: float

    #: The complex overlap tau.
    tau: complex

    #: The fluence of the field.
    fluence: float

    #: The fidelity gain over the previous iteration.
    delta_f: float

    #: The fluence relative to the guess.
    fluence_ratio: float


@dataclass
class OptimizationRecord:
    """The result of a Krotov optimization.

    Version Added:
        1.0
    """

    #: Convergence data, starting with the guess.
    #:
    #: Type:
    #:     list of IterationInfo
    iterations: List[IterationInfo]

    #: The optimized field.
    #:
    #: Type:
    #:     phasegate.krotov.pulses.ControlField
    field: ControlField

    #: The final states of the propagated basis states.
    #:
    #: Type:
    #:     list of phasegate.model.hamiltonian.WaveState
    final_states: List[WaveState]

    #: The step-size penalty that was used.
    #:
    #: Type:
    #:     float
    alpha: float

    #: Whether the fidelity gain fell below the threshold.
    #:
    #: Type:
    #:     bool
    converged: bool = False

    #: Recorders holding the trajectories of the last forward sweep.
    #:
    #: Type:
    #:     list of phasegate.propagator.recorders.BaseRecorder
    recorders: List[BaseRecorder] = field(default_factory=list)

    @property
    def final(self) -> IterationInfo:
        """The data of the last iteration."""
        return self.iterations[-1]

    @property
    def n_iterations(self) -> int:
        """The number of iterations run after the guess."""
        return self.iterations[-1].iteration

    def write_convergence(
        self,
        path: str,
        *,
        comments: Sequence[str] = (),
    ) -> None:
        """Write the convergence log.

        Columns are ``iteration, J, F, delta_F, fluence_ratio``.

        Args:
            path (str):
                The path to write.

            comments (list of str, optional):
                Provenance comment lines.
        """
        write_table(
            path,
            ['iteration', 'J', 'F', 'delta_F', 'fluence_ratio'],
            ([info.iteration, info.functional, info.fidelity, info.delta_f,
              info.fluence_ratio]
             for info in self.iterations),
            comments=comments)


def _tau(
    hamiltonian: GridHamiltonian,
    targets: GateTargets,
    target_vectors: np.ndarray,
    final_vectors: np.ndarray,
) -> complex:
    overlaps = hamiltonian.inner(target_vectors, final_vectors)

    return complex(targets.analytic_tau + np.sum(overlaps))


def _running_cost(
    field_old: ControlField,
    field_new: ControlField,
    alpha: float,
) -> float:
    shape = field_new.update_shape
    gated = shape > 0.0
    delta = field_new.amplitude[gated] - field_old.amplitude[gated]

    return float(np.sum(alpha / shape[gated] * delta ** 2) * field_new.dt)


def evaluate_functional(
    final_states: Sequence[WaveState],
    targets: GateTargets,
    field_old: ControlField,
    field_new: ControlField,
    alpha: float,
    *,
    grid: SpatialGrid,
) -> Tuple[float, float]:
    """Return the functional J and fidelity F of final states.

    ``tau`` sums the overlaps of the targets with the final states, plus
    the analytic contribution of unpropagated basis states. The fidelity
    is ``Re[tau] / N`` and ``J = -F`` plus the running cost of the field
    update. Samples where the update shape vanishes carry no cost.

    Args:
        final_states (list of phasegate.model.hamiltonian.WaveState):
            The final states, in the order of ``targets.basis``.

        targets (phasegate.model.targets.GateTargets):
            The targets.

        field_old (phasegate.krotov.pulses.ControlField):
            The field before the update.

        field_new (phasegate.krotov.pulses.ControlField):
            The field after the update.

        alpha (float):
            The step-size penalty.

        grid (phasegate.grid.grid.SpatialGrid):
            The grid.

    Returns:
        tuple:
        A 2-tuple of J and F.
    """
    tau = targets.analytic_tau + sum(
        item.target.overlap(state, grid)
        for item, state in zip(targets.basis, final_states)
    )
    fidelity = tau.real / targets.n_functional

    return (-fidelity + _running_cost(field_old, field_new, alpha),
            fidelity)


class _Sweeper:
    """Runs the backward and forward sweeps of Krotov iterations."""

    def __init__(
        self,
        system: ChannelSystem,
        grid: SpatialGrid,
        targets: GateTargets,
        field: ControlField,
        config: KrotovConfig,
        propagator_config: PropagatorConfig,
    ) -> None:
        self.hamiltonian = GridHamiltonian(system, grid)
        self.targets = targets
        self.config = config

        hamiltonian = self.hamiltonian
        spectral_range = estimate_spectral_range(
            system, grid, float(np.max(np.abs(field.amplitude))),
            hamiltonian=hamiltonian)

        self.forward = ChebychevPropagator(hamiltonian, propagator_config,
                                           spectral_range)
        self.backward = ChebychevPropagator(hamiltonian, propagator_config,
                                            spectral_range)
        self.initial = hamiltonian.pack_many(
            [item.initial for item in targets.basis])
        self.target_vectors = hamiltonian.pack_many(
            [item.target for item in targets.basis])
        self.initial_norms = hamiltonian.norms(self.initial)
        self.norm_tolerance = propagator_config.norm_tolerance

    def tau(self, final_vectors: np.ndarray) -> complex:
        return _tau(self.hamiltonian, self.targets, self.target_vectors,
                    final_vectors)

    def backward_states(self, field: ControlField) -> BackwardStorage:
        storage = BackwardStorage(
            field.n_steps, self.target_vectors.shape,
            self.config.storage_budget_mb * 1e6)
        amplitude = field.amplitude
        dt = field.dt

        storage.fill(
            self.target_vectors,
            lambda vectors, k: self.backward.step(vectors, amplitude[k],
                                                  -dt))

        return storage

    def forward_sweep(
        self,
        field: ControlField,
        storage: Optional[BackwardStorage] = None,
        step_factor: float = 0.0,
        recorders: Sequence[BaseRecorder] = (),
    ) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Propagate forward, updating the field when a storage is given.

        Returns the new samples, the final vectors and the gradient
        ``sum_j Im <chi_j|mu|psi_j>`` at each lattice point.
        """
        hamiltonian = self.hamiltonian
        old = field.amplitude
        new = old.copy()
        shape = field.update_shape
        gradients = np.zeros(field.n_steps)
        dt = field.dt
        stride = self.config.record_stride
        vectors = self.initial.copy()

        for recorder in recorders:
            recorder.reset()
            recorder(float(field.times[0]), vectors)

        for k in range(field.n_steps):
            if storage is not None and shape[k] > 0.0:
                chi = storage[k]
                gradients[k] = float(np.sum(np.imag(
                    hamiltonian.inner(chi,
                                      hamiltonian.apply_dipole(vectors)))))
                new[k] = old[k] + step_factor * shape[k] * gradients[k]

            vectors = self.forward.step(vectors, new[k], dt)

            norms = hamiltonian.norms(vectors)

            if np.max(np.abs(norms - self.initial_norms)) > \
               self.norm_tolerance:
                raise UnitarityLossError(
                    norm=float(norms[np.argmax(np.abs(
                        norms - self.initial_norms))]),
                    time=float(field.times[k + 1]))

            if recorders and ((k + 1) % stride == 0 or
                              k + 1 == field.n_steps):
                for recorder in recorders:
                    recorder(float(field.times[k + 1]), vectors)

        return new, vectors, gradients


@deprecate_non_keyword_only_args(RemovedInPhasegate20Warning)
def estimate_alpha(
    *,
    system: ChannelSystem,
    grid: SpatialGrid,
    targets: GateTargets,
    guess: ControlField,
    fraction: float = 0.05,
    propagator_config: Optional[PropagatorConfig] = None,
) -> float:
    """Return the alpha giving a first update of a set size.

    The first-iteration update is estimated from the gradient along the
    guess, and alpha is chosen so its peak is ``fraction`` of the guess
    peak.

    Version Changed:
        1.1:
        All arguments are now keyword-only.

    Args:
        system (phasegate.model.channels.ChannelSystem):
            The system.

        grid (phasegate.grid.grid.SpatialGrid):
            The grid.

        targets (phasegate.model.targets.GateTargets):
            The targets.

        guess (phasegate.krotov.pulses.ControlField):
            The guess field.

        fraction (float, optional):
            The desired peak update relative to the guess peak.

        propagator_config (phasegate.propagator.chebychev.PropagatorConfig,
                           optional):
            The propagator settings. Defaults to the guess lattice step.

    Returns:
        float:
        The estimated alpha.
    """
    if propagator_config is None:
        propagator_config = PropagatorConfig(dt=guess.dt)

    sweeper = _Sweeper(system, grid, targets, guess, KrotovConfig(),
                       propagator_config)

    return _estimate_alpha(sweeper, guess, fraction)


def _estimate_alpha(
    sweeper: _Sweeper,
    guess: ControlField,
    fraction: float,
) -> float:
    storage = sweeper.backward_states(guess)
    _new, _final, gradients = sweeper.forward_sweep(guess, storage)
    peak_update = float(np.max(guess.update_shape * np.abs(gradients)))
    peak_field = float(np.max(np.abs(guess.amplitude)))

    if peak_update == 0.0 or peak_field == 0.0:
        logger.warning('Could not estimate alpha from a vanishing gradient '
                       'or guess; using alpha = 1.')

        return 1.0

    alpha = peak_update / (2.0 * sweeper.targets.n_functional *
                           fraction * peak_field)

    logger.info('Estimated alpha = %g for a %g%% first update',
                alpha, 100 * fraction)

    return alpha


@deprecate_non_keyword_only_args(RemovedInPhasegate20Warning)
def krotov_optimize(
    *,
    system: ChannelSystem,
    grid: SpatialGrid,
    targets: GateTargets,
    guess: ControlField,
    config: KrotovConfig,
    propagator_config: Optional[PropagatorConfig] = None,
    continue_from: Optional[ControlField] = None,
    recorders: Sequence[BaseRecorder] = (),
) -> OptimizationRecord:
    """Optimize a field with Krotov's method.

    Version Changed:
        1.1:
        All arguments are now keyword-only. Passing them positionally is
        deprecated.

    Args:
        system (phasegate.model.channels.ChannelSystem):
            The system.

        grid (phasegate.grid.grid.SpatialGrid):
            The grid.

        targets (phasegate.model.targets.GateTargets):
            The basis states and their targets.

        guess (phasegate.krotov.pulses.ControlField):
            The guess field. Fluence ratios are relative to it.

        config (KrotovConfig):
            The optimization settings.

        propagator_config (phasegate.propagator.chebychev.PropagatorConfig,
                           optional):
            The propagator settings. Defaults to the guess lattice step.

        continue_from (phasegate.krotov.pulses.ControlField, optional):
            A previously optimized field to resume from, on the same
            lattice as the guess.

        recorders (list of phasegate.propagator.recorders.BaseRecorder,
                   optional):
            Recorders called during every forward sweep. After the
            optimization they hold the last sweep.

    Returns:
        OptimizationRecord:
        The optimization result.

    Raises:
        phasegate.krotov.errors.MonotonicityError:
            J increased between iterations.

        phasegate.krotov.errors.FidelityNaNError:
            The fidelity evaluated to NaN.

        phasegate.propagator.errors.PropagationError:
            Propagation failed.
    """
    config.validate()

    if propagator_config is None:
        propagator_config = PropagatorConfig(dt=guess.dt)

    field = guess

    if continue_from is not None:
        if (continue_from.n_steps != guess.n_steps or
            not math.isclose(continue_from.duration, guess.duration,
                             rel_tol=1e-9)):
            raise OptimizationError('the field to continue from is not on '
                                    'the lattice of the guess.')

        field = continue_from

    sweeper = _Sweeper(system, grid, targets, field, config,
                       propagator_config)
    n_functional = targets.n_functional
    guess_fluence = fluence(guess)

    def _ratio(f: ControlField) -> float:
        return fluence(f) / guess_fluence if guess_fluence else 1.0

    _same, final, _grad = sweeper.forward_sweep(field, recorders=recorders)
    tau = sweeper.tau(final)
    fidelity = tau.real / n_functional

    if math.isnan(fidelity):
        raise FidelityNaNError()

    functional = -fidelity
    iterations = [IterationInfo(iteration=0,
                                functional=functional,
                                fidelity=fidelity,
                                tau=tau,
                                fluence=fluence(field),
                                delta_f=0.0,
                                fluence_ratio=_ratio(field))]

    logger.info('Starting Krotov optimization: F = %.8f, %d basis states, '
                '%d time steps',
                fidelity, len(targets.basis), field.n_steps)

    alpha = config.alpha

    if alpha is None:
        alpha = _estimate_alpha(sweeper, field, config.alpha_fraction)

    converged = False

    for iteration in range(1, config.max_iterations + 1):
        logger.info('Started Krotov iteration %d', iteration)

        storage = sweeper.backward_states(field)
        new_amplitude, final, _grad = sweeper.forward_sweep(
            field, storage,
            step_factor=1.0 / (2.0 * alpha * n_functional),
            recorders=recorders)
        new_field = field.with_amplitude(new_amplitude)

        tau = sweeper.tau(final)
        new_fidelity = tau.real / n_functional

        if math.isnan(new_fidelity):
            raise FidelityNaNError(
                'the fidelity evaluated to NaN in iteration %d.'
                % iteration)

        new_functional = -new_fidelity + _running_cost(field, new_field,
                                                       alpha)

        if new_functional > functional + config.monotonicity_tolerance:
            raise MonotonicityError(iteration=iteration,
                                    previous=functional,
                                    current=new_functional)

        delta_f = new_fidelity - fidelity
        info = IterationInfo(iteration=iteration,
                             functional=new_functional,
                             fidelity=new_fidelity,
                             tau=tau,
                             fluence=fluence(new_field),
                             delta_f=delta_f,
                             fluence_ratio=_ratio(new_field))
        iterations.append(info)

        logger.info('Krotov iteration %d: J = %.10f, F = %.10f, '
                    'delta F = %.3g',
                    iteration, new_functional, new_fidelity, delta_f)

        field = new_field
        fidelity = new_fidelity
        functional = new_functional

        if delta_f < config.convergence_delta_f:
            converged = True
            break

    logger.info('Finished Krotov optimization after %d iterations: '
                'F = %.10f%s',
                iterations[-1].iteration, fidelity,
                ' (converged)' if converged else '')

    hamiltonian = sweeper.hamiltonian

    return OptimizationRecord(
        iterations=iterations,
        field=field,
        final_states=[
            hamiltonian.unpack(vector, time_tag=field.duration)
            for vector in final
        ],
        alpha=alpha,
        converged=converged,
        recorders=list(recorders))
