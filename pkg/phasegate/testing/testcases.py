"""Base test cases for Phasegate."""

from __future__ import annotations

import copy
import os
import shutil
import tempfile
import unittest
from contextlib import contextmanager
from dataclasses import replace
from typing import Any, Dict, Iterator, Optional, Type

import numpy as np
from kgb import SpyAgency

from phasegate.grid.grid import GridSpec, SpatialGrid, build_grid
from phasegate.model.channels import (ChannelSystem,
                                      SystemMode,
                                      SystemParams,
                                      build_calcium_like_system,
                                      reduce_system)


#: Whether long-running reproductions are enabled.
RUN_SLOW_TESTS = os.environ.get('PHASEGATE_RUN_SLOW') == '1'


#: Decorator skipping a test unless slow tests are enabled.
slow_test = unittest.skipUnless(RUN_SLOW_TESTS,
                                'set PHASEGATE_RUN_SLOW=1 to run')


#: Toy-regime parameters, in atomic units.
#:
#: The interaction energy at the trap distance is ten trap quanta, and the
#: carrier period is a little over 100 time steps of 1 au.
TOY_PARAMS = SystemParams(e1=0.03,
                          e_a=0.05,
                          mass=10.0,
                          omega=1e-3,
                          d=100.0,
                          c3=1e4,
                          mu0=1.0)


#: A toy configuration file, as parsed YAML.
TOY_CONFIG_DATA: Dict[str, Any] = {
    'mode': 'reduced',
    'regime': 'toy',
    'seed': 0,
    'workers': 1,
    'system': {
        'e1_au': 0.03,
        'e_a_au': 0.05,
        'mass_au': 10.0,
        'c3_au': 1e4,
        'mu0_au': 1.0,
    },
    'trap': {
        'omega_au': 1e-3,
        'd_a0': 100.0,
    },
    'grid': {
        'r_min_a0': 40.0,
        'r_max_a0': 160.0,
        'n_points': 32,
    },
    'time': {
        'T_au': 200.0,
        'dt_au': 1.0,
    },
    'krotov': {
        'alpha': 10.0,
        'max_iterations': 2,
        'record_stride': 20,
    },
    'output': {
        'directory': 'out',
    },
}


class PhasegateTestCase(SpyAgency, unittest.TestCase):
    """Base class for unit tests for Phasegate."""

    maxDiff = None

    def build_toy_params(self, **kwargs) -> SystemParams:
        """Return toy parameters with the given overrides.

        Args:
            **kwargs (dict):
                Parameter overrides.

        Returns:
            phasegate.model.channels.SystemParams:
            The parameters.
        """
        return replace(TOY_PARAMS, **kwargs)

    def build_toy_system(
        self,
        mode: SystemMode = SystemMode.REDUCED,
        **kwargs,
    ) -> ChannelSystem:
        """Return a toy system.

        Args:
            mode (phasegate.model.channels.SystemMode, optional):
                The mode of the system.

            **kwargs (dict):
                Parameter overrides.

        Returns:
            phasegate.model.channels.ChannelSystem:
            The system.
        """
        system = build_calcium_like_system(self.build_toy_params(**kwargs))

        if mode is SystemMode.REDUCED:
            system = reduce_system(system)

        return system

    def build_toy_grid(
        self,
        n_points: int = 32,
        mass: Optional[float] = None,
    ) -> SpatialGrid:
        """Return a uniform toy grid around the trap distance.

        Args:
            n_points (int, optional):
                The number of grid points.

            mass (float, optional):
                The mass. Defaults to the toy mass.

        Returns:
            phasegate.grid.grid.SpatialGrid:
            The grid.
        """
        return build_grid(GridSpec(r_min=40.0,
                                   r_max=160.0,
                                   n_points=n_points,
                                   mass=mass or TOY_PARAMS.mass))

    def build_toy_config_data(self, **sections) -> Dict[str, Any]:
        """Return a toy configuration mapping with section overrides.

        Each keyword replaces keys within the named section, or sets a
        top-level value if it isn't a mapping.

        Args:
            **sections (dict):
                The overrides.

        Returns:
            dict:
            The configuration mapping.
        """
        data = copy.deepcopy(TOY_CONFIG_DATA)

        for name, value in sections.items():
            if isinstance(value, dict):
                data.setdefault(name, {}).update(value)
            else:
                data[name] = value

        return data

    def make_temp_dir(self) -> str:
        """Return a temporary directory removed after the test.

        Returns:
            str:
            The directory path.
        """
        path = tempfile.mkdtemp(prefix='phasegate-tests.')
        self.addCleanup(shutil.rmtree, path, ignore_errors=True)

        return path

    @contextmanager
    def assertRaisesMessage(
        self,
        expected_exception: Type[BaseException],
        expected_message: str,
    ) -> Iterator[Any]:
        """Assert that an exception containing a message is raised.

        Args:
            expected_exception (type):
                The expected exception class.

            expected_message (str):
                Text the exception message must contain.

        Context:
            object:
            The assertion context, whose ``exception`` is set afterwards.
        """
        with self.assertRaises(expected_exception) as cm:
            yield cm

        self.assertIn(expected_message, str(cm.exception))

    def assertArrayAlmostEqual(
        self,
        first: Any,
        second: Any,
        atol: float = 1e-12,
        rtol: float = 0.0,
    ) -> None:
        """Assert that two arrays are equal within a tolerance.

        Args:
            first (numpy.ndarray):
                The first array.

            second (numpy.ndarray):
                The second array.

            atol (float, optional):
                The absolute tolerance.

            rtol (float, optional):
                The relative tolerance.
        """
        np.testing.assert_allclose(first, second, atol=atol, rtol=rtol)
