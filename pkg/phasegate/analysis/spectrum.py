"""Pulse spectra.

Version Added:
    1.0
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence, Tuple

import numpy as np
from scipy.fft import rfft, rfftfreq

from phasegate.krotov.pulses import ControlField
from phasegate.util.tables import write_table
from phasegate.util.units import from_atomic


@dataclass(frozen=True)
class Spectrum:
    """The power spectrum of a field.

    Version Added:
        1.0
    """

    #: The angular frequencies, in atomic units.
    #:
    #: Type:
    #:     numpy.ndarray
    frequencies: np.ndarray

    #: The power at each frequency.
    #:
    #: Type:
    #:     numpy.ndarray
    power: np.ndarray

    @property
    def frequencies_cm1(self) -> np.ndarray:
        """The frequencies in wavenumbers."""
        return np.array([from_atomic(f, 'cm1') for f in self.frequencies])

    @property
    def resolution(self) -> float:
        """The spacing of the frequency bins."""
        return float(self.frequencies[1] - self.frequencies[0])

    def peak_frequency(self) -> float:
        """Return the frequency of the dominant line.

        Returns:
            float:
            The angular frequency of the largest power.
        """
        return float(self.frequencies[int(np.argmax(self.power))])

    def write_table(
        self,
        path: str,
        *,
        comments: Sequence[str] = (),
    ) -> None:
        """Write the spectrum as ``freq_cm-1, |FT(eps)|^2``.

        Args:
            path (str):
                The path to write.

            comments (list of str, optional):
                Provenance comment lines.
        """
        write_table(path, ['freq_cm-1', '|FT(eps)|^2'],
                    zip(self.frequencies_cm1.tolist(), self.power.tolist()),
                    comments=comments)


def pulse_spectrum(field: ControlField) -> Spectrum:
    """Return the power spectrum of a field.

    Args:
        field (phasegate.krotov.pulses.ControlField):
            The field.

    Returns:
        Spectrum:
        The squared modulus of the discrete Fourier transform.
    """
    dt = field.dt
    transform = rfft(field.amplitude) * dt

    return Spectrum(
        frequencies=2.0 * math.pi * rfftfreq(field.n_steps, d=dt),
        power=np.abs(transform) ** 2)


def spectral_support(
    spectrum: Spectrum,
    fraction: float = 0.99,
) -> Tuple[float, float]:
    """Return the frequency band holding a fraction of the power.

    The band runs between the ``(1 - fraction) / 2`` and
    ``(1 + fraction) / 2`` quantiles of the cumulative power.

    Args:
        spectrum (Spectrum):
            The spectrum.

        fraction (float, optional):
            The fraction of power inside the band.

    Returns:
        tuple:
        A 2-tuple of the lower and upper angular frequencies.
    """
    cumulative = np.cumsum(spectrum.power)
    cumulative = cumulative / cumulative[-1]
    lower = int(np.searchsorted(cumulative, 0.5 * (1.0 - fraction)))
    upper = int(np.searchsorted(cumulative, 0.5 * (1.0 + fraction)))
    upper = min(upper, len(cumulative) - 1)

    return (float(spectrum.frequencies[lower]),
            float(spectrum.frequencies[upper]))
