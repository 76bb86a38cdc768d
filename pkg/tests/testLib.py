import logging
import os

import numpy

from ep_holonomy import lib
from tests.testbase import TestBase


class TestLib(TestBase):

    def test_namespace_conversion(self):
        self.assertEqual('asdf' + '_' * 8, lib.namespace_conversion('asdf @$@#$@#'))
        self.assertEqual('start_12342342', lib.namespace_conversion('12342342'))
        self.assertEqual('eigencurves', lib.namespace_conversion('eigencurves'))
        for name in ['2C', 'C+C\'', 'circle@0.25']:
            cleaned = lib.namespace_conversion(name)
            self.assertRegex(cleaned, r'^[a-zA-Z][a-zA-Z0-9_]*$')

    def test_wrap_phase(self):
        self.assertAlmostEqual(0., lib.wrap_phase(2 * numpy.pi))
        self.assertAlmostEqual(numpy.pi, lib.wrap_phase(numpy.pi))
        self.assertAlmostEqual(numpy.pi, lib.wrap_phase(-numpy.pi))
        self.assertAlmostEqual(-numpy.pi / 2, lib.wrap_phase(3 * numpy.pi / 2))
        self.assertAlmostEqual(-numpy.pi / 2, lib.wrap_phase(-5 * numpy.pi / 2))

    def test_phase_distance(self):
        self.assertAlmostEqual(0., lib.phase_distance(complex(-numpy.pi / 2, 0.1), complex(3 * numpy.pi / 2, 0.1)))
        self.assertAlmostEqual(0.5, lib.phase_distance(0.2j, 0.7j))

    def test_as_complex(self):
        self.assertEqual(1 + 2j, lib.as_complex([1, 2]))
        self.assertEqual(3 + 0j, lib.as_complex(3))
        self.assertEqual(1 - 1j, lib.as_complex('1 - 1j'))
        self.assertRaises(ValueError, lib.as_complex, [1, 2, 3])
        self.assertEqual([1., -2.], lib.complex_pair(1 - 2j))

    def test_check_square_matrix(self):
        matrix = lib.check_square_matrix([[1, 2], [3, 4]])
        self.assertEqual(numpy.complex128, matrix.dtype)
        self.assertRaises(ValueError, lib.check_square_matrix, [[1, 2, 3], [4, 5, 6]])
        self.assertRaises(ValueError, lib.check_square_matrix, [[numpy.nan]])

    def test_check_labels_are_valid(self):
        self.assertTrue(lib.check_labels_are_valid([0, 2], 3))
        self.assertRaises(ValueError, lib.check_labels_are_valid, [3], 3)
        self.assertRaises(ValueError, lib.check_labels_are_valid, [1, 1], 3)
        self.assertRaises(ValueError, lib.check_labels_are_valid, [0.5], 3)

    def test_configure_logging(self):
        previous = os.environ.get(lib.LOG_LEVEL_VARIABLE)
        try:
            os.environ[lib.LOG_LEVEL_VARIABLE] = 'debug'
            self.assertEqual(logging.DEBUG, lib.configure_logging())
            os.environ[lib.LOG_LEVEL_VARIABLE] = 'not-a-level'
            self.assertEqual(logging.WARNING, lib.configure_logging())
        finally:
            if previous is None:
                os.environ.pop(lib.LOG_LEVEL_VARIABLE, None)
            else:
                os.environ[lib.LOG_LEVEL_VARIABLE] = previous
            logging.getLogger().setLevel(self.log_level)

    def test_get_temp_dir(self):
        temp_dir = lib.get_temp_dir()
        self.assertTrue(os.path.isdir(temp_dir))
