"""Storage of backward-propagated states for the forward sweep.

Version Added:
    1.0
"""

from __future__ import annotations

import logging
import math
from typing import Callable, Dict, Optional, Tuple

import numpy as np


logger = logging.getLogger(__name__)


#: Steps a batch of vectors from ``t_{k+1}`` back to ``t_k``.
BackStep = Callable[[np.ndarray, int], np.ndarray]


class BackwardStorage:
    """Backward-propagated states at every lattice point.

    When storing every lattice point would exceed the memory budget, only
    every ``stride``-th point is kept. The points in between are
    re-propagated one segment at a time when first read. The forward
    sweep reads points in increasing order, so each segment is
    recomputed once.

    Version Added:
        1.0
    """

    ######################
    # Instance variables #
    ######################

    #: The number of lattice steps.
    #:
    #: Type:
    #:     int
    n_steps: int

    #: The spacing of stored lattice points.
    #:
    #: Type:
    #:     int
    stride: int

    def __init__(
        self,
        n_steps: int,
        shape: Tuple[int, ...],
        budget_bytes: float,
    ) -> None:
        """Initialize the storage.

        Args:
            n_steps (int):
                The number of lattice steps.

            shape (tuple):
                The shape of the stored vector batches.

            budget_bytes (float):
                The memory available for stored states.
        """
        self.n_steps = n_steps

        item_bytes = 16 * int(np.prod(shape))
        needed = (n_steps + 1) * item_bytes
        capacity = max(2, int(budget_bytes // item_bytes))

        if needed <= budget_bytes:
            self.stride = 1
        else:
            self.stride = max(2, math.ceil(2 * (n_steps + 1) / capacity))

            logger.warning('Backward states need %.1f MB, over the budget '
                           'of %.1f MB; storing every %d steps and '
                           're-propagating in between.',
                           needed / 1e6, budget_bytes / 1e6, self.stride)

        self._checkpoints: Dict[int, np.ndarray] = {}
        self._segment: Dict[int, np.ndarray] = {}
        self._segment_start = -1
        self._back_step: Optional[BackStep] = None

    def fill(
        self,
        final: np.ndarray,
        back_step: BackStep,
    ) -> None:
        """Propagate backward from the final time and store the states.

        Args:
            final (numpy.ndarray):
                The states at the final time.

            back_step (callable):
                A function stepping states from ``t_{k+1}`` to ``t_k``.
                It's kept for re-propagating segments.
        """
        self._back_step = back_step
        self._checkpoints = {self.n_steps: final}
        self._segment = {}
        self._segment_start = -1

        vectors = final

        for k in range(self.n_steps - 1, -1, -1):
            vectors = back_step(vectors, k)

            if k % self.stride == 0:
                self._checkpoints[k] = vectors

    def __getitem__(
        self,
        k: int,
    ) -> np.ndarray:
        """Return the stored states at lattice point ``k``.

        Args:
            k (int):
                The lattice index.

        Returns:
            numpy.ndarray:
            The backward-propagated states.
        """
        try:
            return self._checkpoints[k]
        except KeyError:
            pass

        start = (k // self.stride) * self.stride

        if start != self._segment_start:
            end = min(start + self.stride, self.n_steps)
            vectors = self._checkpoints[end]
            self._segment = {}

            for j in range(end - 1, start, -1):
                vectors = self._back_step(vectors, j)
                self._segment[j] = vectors

            self._segment_start = start

        return self._segment[k]
