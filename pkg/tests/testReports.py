import json
import os

import numpy
import pandas

from ep_holonomy import curves, lib, phase, reports, tracking
from ep_holonomy.families.NonSymmetric import NonSymmetricB
from ep_holonomy.families.Polynomial import Polynomial
from ep_holonomy.families.SquareRoot import SquareRoot
from tests.testbase import TestBase


class TestReports(TestBase):

    def rows(self):
        family = NonSymmetricB(1 + 1j, 2)
        path = tracking.track(family, curves.circle([0, 0], 1.), 256)
        return [reports.phase_row(phase.geometric_phase(path, label), path, 'NonSymB') for label in [0, 1]], path

    def test_phase_row(self):
        rows, path = self.rows()
        row = rows[1]
        self.assertEqual('phase', row.command)
        self.assertEqual(2, row.label)
        self.assertEqual('id', row.monodromy)
        self.assertEqual(1, row.traversals)
        self.assertEqual(256, row.n_samples)
        self.assertEqual(lib.wrap_phase(row.gamma_raw), row.gamma_mod_2pi)
        self.assertAlmostEqual(numpy.exp(-row.gamma_imag), row.holonomy_abs, delta=1e-12)

        lifted = tracking.track(SquareRoot(), curves.circle([0, 0], 1.).repeated(2), 128)
        row = reports.phase_row(phase.geometric_phase(lifted, 0), lifted, 'H1')
        self.assertEqual(2, row.traversals)
        self.assertEqual('2xcircle', row.curve)

        # A single level has no gap; the row still holds finite numbers
        single = tracking.track(Polynomial([[[1., 1.]]]), curves.circle([0, 0], 1.), 64)
        row = reports.phase_row(phase.geometric_phase(single, 0), single, 'single')
        self.assertEqual(reports.NO_GAP, row.min_gap)
        self.assertEqual('id', row.monodromy)
        self.assertAlmostEqual(0., row.gamma_mod_2pi, delta=1e-12)
        self.assertAlmostEqual(1., row.holonomy_abs, delta=1e-12)
        self.assertEqual(row, reports.read_rows(reports.write_rows([row], lib.get_temp_dir()))[0])

    def test_row_validation(self):
        rows, _ = self.rows()
        values = rows[0].to_dict()
        values['gamma_raw'] = float('nan')
        self.assertRaises(ValueError, reports.ReportRow, **values)
        values['gamma_raw'] = float('inf')
        self.assertRaises(ValueError, reports.ReportRow, **values)

        values = rows[0].to_dict()
        del values['min_gap']
        self.assertRaises(ValueError, reports.ReportRow.from_dict, values)
        self.assertEqual(rows[0], reports.ReportRow.from_dict(rows[0].to_dict()))

    def test_write_and_read(self):
        rows, _ = self.rows()
        directory = lib.get_temp_dir()
        for output_format in reports.FORMATS:
            path = reports.write_rows(rows, directory, output_format)
            self.assertEqual(os.path.join(directory, 'report.{}'.format(output_format)), path)
            self.assertTrue(os.path.exists(path))
            self.assertEqual(rows, reports.read_rows(path))

        frame = pandas.read_csv(os.path.join(directory, 'report.csv'), dtype={'monodromy': str})
        self.assertEqual([field for field in reports.rows_to_frame(rows).columns], list(frame.columns))

        self.assertRaises(ValueError, reports.write_rows, rows, directory, 'xlsx')

    def test_write_table(self):
        directory = lib.get_temp_dir()
        frame = pandas.DataFrame({'x': numpy.array([.1, 1. / 3]), 'count': numpy.array([1, 2]),
                                  'name': ['a', 'b']})
        path = reports.write_table(frame, directory, 'table', reports.JSON)
        with open(path) as table_file:
            parsed = json.load(table_file)
        self.assertEqual(1. / 3, parsed[1]['x'])
        self.assertEqual([1, 2], [record['count'] for record in parsed])

        path = reports.write_table(frame, os.path.join(directory, 'nested'), 'table')
        with open(path) as table_file:
            self.assertIn('0.33333333333333331', table_file.read())

    def test_plots(self):
        _, path = self.rows()
        directory = lib.get_temp_dir()

        filename = reports.output_path(directory, 'eigen curves')
        self.assertEqual(os.path.join(directory, 'eigen_curves.svg'), filename)
        reports.plot_eigencurves(path, [0, 1], filename)
        with open(filename) as plot_file:
            first = plot_file.read()
        self.assertIn('<svg', first)

        # Fixed hash salt and no date: identical input gives identical files
        reports.plot_eigencurves(path, [0, 1], filename)
        with open(filename) as plot_file:
            self.assertEqual(first, plot_file.read())

        running = {label: (path.times, phase.running_phase(path, label)) for label in [0, 1]}
        filename = reports.plot_running_phase(running, reports.output_path(directory, 'running'))
        self.assertTrue(os.path.exists(filename))

        xs, ys = numpy.meshgrid(numpy.linspace(-1, 1, 3), numpy.linspace(-1, 1, 3))
        frame = pandas.DataFrame({'x': xs.ravel(), 'y': ys.ravel(), 'F_re': xs.ravel() * ys.ravel(),
                                  'masked': [False] * 4 + [True] + [False] * 4})
        filename = reports.plot_curvature(frame, reports.output_path(directory, 'curvature'))
        self.assertTrue(os.path.exists(filename))
