"""Conversion between configuration units and atomic units.

All computation inside Phasegate happens in atomic units with
:math:`\\hbar = 1`. Configuration keys carry a unit suffix
(``omega_mhz``, ``d_nm``, ``T_ps``), which is resolved here.

Frequencies given in Hz-like units are ordinary frequencies and are
converted to angular frequencies (:math:`\\omega = 2\\pi f`). Energies may
be given in the same units (:math:`E = h f`).

Version Added:
    1.0
"""

from __future__ import annotations

import math
from typing import Dict, Optional, Tuple

from phasegate.errors import PhasegateError


#: Hartree energy in wavenumbers (cm^-1).
HARTREE_TO_CM1 = 219474.6313632

#: Bohr radius in nanometers.
BOHR_TO_NM = 0.0529177210903

#: Atomic unit of time in femtoseconds.
AU_TIME_TO_FS = 0.02418884326585747

#: Atomic unit of time in seconds.
AU_TIME_TO_S = AU_TIME_TO_FS * 1e-15

#: Atomic mass unit in electron masses.
AMU_TO_AU = 1822.888486209

#: Atomic unit of electric field in V/m.
AU_FIELD_TO_VM = 5.14220674763e11


#: Dimensions that share a conversion when hbar = 1.
_COMPATIBLE = {
    'energy': {'energy', 'frequency'},
    'frequency': {'energy', 'frequency'},
}


#: Mapping of unit suffix to (dimension, factor to atomic units).
#:
#: A dimension of ``None`` means the unit is valid for any dimension.
UNITS: Dict[str, Tuple[Optional[str], float]] = {
    'au': (None, 1.0),
    'hartree': ('energy', 1.0),
    'cm1': ('energy', 1.0 / HARTREE_TO_CM1),
    'a0': ('length', 1.0),
    'bohr': ('length', 1.0),
    'nm': ('length', 1.0 / BOHR_TO_NM),
    'fs': ('time', 1.0 / AU_TIME_TO_FS),
    'ps': ('time', 1e3 / AU_TIME_TO_FS),
    'ns': ('time', 1e6 / AU_TIME_TO_FS),
    'khz': ('frequency', 2.0 * math.pi * 1e3 * AU_TIME_TO_S),
    'mhz': ('frequency', 2.0 * math.pi * 1e6 * AU_TIME_TO_S),
    'ghz': ('frequency', 2.0 * math.pi * 1e9 * AU_TIME_TO_S),
    'amu': ('mass', AMU_TO_AU),
    'me': ('mass', 1.0),
    'vm': ('field', 1.0 / AU_FIELD_TO_VM),
    'nm3cm1': ('c3', (1.0 / BOHR_TO_NM) ** 3 / HARTREE_TO_CM1),
    'ea0': ('dipole', 1.0),
}


class UnitError(PhasegateError):
    """An unknown unit, or a unit of the wrong dimension, was used.

    Version Added:
        1.0
    """

    default_message = 'unknown unit.'


def _get_factor(
    unit: str,
    dimension: Optional[str],
) -> float:
    try:
        unit_dimension, factor = UNITS[unit.lower()]
    except KeyError:
        raise UnitError('unknown unit "%s".' % unit)

    if (dimension is not None and
        unit_dimension is not None and
        unit_dimension not in _COMPATIBLE.get(dimension, {dimension})):
        raise UnitError('unit "%s" measures %s, not %s.'
                        % (unit, unit_dimension, dimension))

    return factor


def to_atomic(
    value: float,
    unit: str,
    dimension: Optional[str] = None,
) -> float:
    """Convert a value in the given unit to atomic units.

    Args:
        value (float):
            The value to convert.

        unit (str):
            The unit suffix, such as ``ps`` or ``cm1``.

        dimension (str, optional):
            The expected dimension. If provided, units of another dimension
            are rejected.

    Returns:
        float:
        The value in atomic units.

    Raises:
        UnitError:
            The unit is unknown or doesn't match the dimension.
    """
    return float(value) * _get_factor(unit, dimension)


def from_atomic(
    value: float,
    unit: str,
    dimension: Optional[str] = None,
) -> float:
    """Convert a value in atomic units to the given unit.

    Args:
        value (float):
            The value in atomic units.

        unit (str):
            The target unit suffix.

        dimension (str, optional):
            The expected dimension.

    Returns:
        float:
        The converted value.

    Raises:
        UnitError:
            The unit is unknown or doesn't match the dimension.
    """
    return float(value) / _get_factor(unit, dimension)


def split_unit_key(
    key: str,
) -> Tuple[str, Optional[str]]:
    """Split a configuration key into its name and unit suffix.

    ``omega_mhz`` becomes ``('omega', 'mhz')``. Keys without a known unit
    suffix are returned with a unit of ``None``.

    Args:
        key (str):
            The configuration key.

    Returns:
        tuple:
        A 2-tuple of the base name and the unit suffix (or ``None``).
    """
    name, sep, suffix = key.rpartition('_')

    if sep and name and suffix.lower() in UNITS:
        return name, suffix.lower()

    return key, None
