"""Unit tests for phasegate.util."""

from __future__ import annotations

import math
import os

from phasegate.testing.testcases import PhasegateTestCase
from phasegate.util.tables import (TableError,
                                   get_comment_value,
                                   read_table,
                                   write_table)
from phasegate.util.units import (AU_TIME_TO_FS,
                                  BOHR_TO_NM,
                                  HARTREE_TO_CM1,
                                  UnitError,
                                  from_atomic,
                                  split_unit_key,
                                  to_atomic)


class UnitsTests(PhasegateTestCase):
    """Unit tests for phasegate.util.units."""

    def test_to_atomic_length(self) -> None:
        """Testing to_atomic with nanometers"""
        self.assertAlmostEqual(to_atomic(5.0, 'nm', 'length'),
                               5.0 / BOHR_TO_NM)
        self.assertAlmostEqual(to_atomic(5.0, 'nm'), 94.486, places=3)

    def test_to_atomic_time(self) -> None:
        """Testing to_atomic with femtoseconds and picoseconds"""
        self.assertAlmostEqual(to_atomic(AU_TIME_TO_FS, 'fs'), 1.0)
        self.assertAlmostEqual(to_atomic(1.0, 'ps'),
                               1000.0 * to_atomic(1.0, 'fs'))

    def test_to_atomic_frequency_is_angular(self) -> None:
        """Testing to_atomic converts Hz-like units to angular frequencies
        """
        omega = to_atomic(400.0, 'mhz', 'frequency')

        self.assertAlmostEqual(omega,
                               2.0 * math.pi * 400e6 * AU_TIME_TO_FS * 1e-15)

    def test_to_atomic_energy_from_frequency_unit(self) -> None:
        """Testing to_atomic accepts frequency units for energies"""
        self.assertEqual(to_atomic(1.0, 'mhz', 'energy'),
                         to_atomic(1.0, 'mhz', 'frequency'))

    def test_to_atomic_wavenumbers(self) -> None:
        """Testing to_atomic with wavenumbers"""
        self.assertAlmostEqual(to_atomic(HARTREE_TO_CM1, 'cm1', 'energy'),
                               1.0)

    def test_to_atomic_au_any_dimension(self) -> None:
        """Testing to_atomic with atomic units for any dimension"""
        for dimension in ('energy', 'length', 'time', 'c3'):
            self.assertEqual(to_atomic(2.5, 'au', dimension), 2.5)

    def test_to_atomic_wrong_dimension(self) -> None:
        """Testing to_atomic with a unit of the wrong dimension"""
        message = 'unit "nm" measures length, not time.'

        with self.assertRaisesMessage(UnitError, message):
            to_atomic(1.0, 'nm', 'time')

    def test_to_atomic_unknown_unit(self) -> None:
        """Testing to_atomic with an unknown unit"""
        with self.assertRaisesMessage(UnitError, 'unknown unit "furlong".'):
            to_atomic(1.0, 'furlong')

    def test_from_atomic(self) -> None:
        """Testing from_atomic inverts to_atomic"""
        value = to_atomic(23652.0, 'cm1', 'energy')

        self.assertAlmostEqual(from_atomic(value, 'cm1'), 23652.0)

    def test_split_unit_key(self) -> None:
        """Testing split_unit_key"""
        self.assertEqual(split_unit_key('omega_mhz'), ('omega', 'mhz'))
        self.assertEqual(split_unit_key('r_max_a0'), ('r_max', 'a0'))
        self.assertEqual(split_unit_key('e_a_CM1'), ('e_a', 'cm1'))
        self.assertEqual(split_unit_key('c3_nm3cm1'), ('c3', 'nm3cm1'))

    def test_split_unit_key_without_unit(self) -> None:
        """Testing split_unit_key with keys that carry no unit"""
        self.assertEqual(split_unit_key('n_points'), ('n_points', None))
        self.assertEqual(split_unit_key('beta'), ('beta', None))


class TablesTests(PhasegateTestCase):
    """Unit tests for phasegate.util.tables."""

    def test_write_table(self) -> None:
        """Testing write_table output"""
        path = os.path.join(self.make_temp_dir(), 'sub', 'table.csv')

        write_table(path, ['a', 'b', 'c'], [[1, 0.1, True], [2, 1e-20, 'x']],
                    comments=['config-hash: abc'])

        with open(path) as fp:
            self.assertEqual(
                fp.read(),
                '# config-hash: abc\n'
                'a,b,c\n'
                '1,0.1,true\n'
                '2,1e-20,x\n')

    def test_read_table(self) -> None:
        """Testing read_table returns header, rows and comments"""
        path = os.path.join(self.make_temp_dir(), 'table.csv')
        write_table(path, ['t_fs', 'epsilon'], [[0.5, -1.25]],
                    comments=['config-hash: abc', 'n_steps=1'])

        header, rows, comments = read_table(path)

        self.assertEqual(header, ['t_fs', 'epsilon'])
        self.assertEqual(rows, [['0.5', '-1.25']])
        self.assertEqual(comments, ['config-hash: abc', 'n_steps=1'])
        self.assertEqual(get_comment_value(comments, 'n_steps'), '1')
        self.assertIsNone(get_comment_value(comments, 'duration_au'))

    def test_read_table_missing(self) -> None:
        """Testing read_table with a missing file"""
        with self.assertRaises(TableError):
            read_table(os.path.join(self.make_temp_dir(), 'missing.csv'))

    def test_read_table_empty(self) -> None:
        """Testing read_table with a file that has no header"""
        path = os.path.join(self.make_temp_dir(), 'empty.csv')

        with open(path, 'w') as fp:
            fp.write('# only a comment\n')

        with self.assertRaisesMessage(TableError, 'has no header'):
            read_table(path)
