"""
Report rows, table writers and SVG plots for the command line front end
"""
from __future__ import annotations

import json
import logging
import os
from dataclasses import asdict, dataclass, fields

import matplotlib

matplotlib.use('Agg')
import matplotlib.pyplot as plt  # noqa: E402
import numpy  # noqa: E402
import pandas  # noqa: E402

from ep_holonomy import lib  # noqa: E402

CSV = 'csv'
JSON = 'json'
FORMATS = [CSV, JSON]

FLOAT_FORMAT = '%.17g'

# Reported minimum gap of single level families, which have no pair of eigenvalues
NO_GAP = float(numpy.finfo(float).max)

# Fixed salt, so that SVG element ids do not change between runs
matplotlib.rcParams['svg.hashsalt'] = 'ep-holonomy'


@dataclass(frozen=True)
class ReportRow:
    """
    One spectral branch of one command run. Labels are 1-based, as in the monodromy cycle notation
    """
    command: str
    family: str
    curve: str
    label: int
    monodromy: str
    traversals: int
    dynamical_re: float
    dynamical_im: float
    gamma_raw: float
    gamma_mod_2pi: float
    gamma_imag: float
    holonomy_abs: float
    refinement_depth: int
    min_gap: float
    n_samples: int

    def __post_init__(self):
        for field in fields(self):
            value = getattr(self, field.name)
            if isinstance(value, float) and not numpy.isfinite(value):
                raise ValueError('Report field: {} is not finite: {}'.format(field.name, value))

    def to_dict(self):
        return asdict(self)

    @classmethod
    def from_dict(cls, values):
        """
        Rebuild a row from `to_dict` output, or from a parsed JSON record

        :type values: dict
        :rtype: ReportRow
        """
        converted = dict()
        for field in fields(cls):
            if field.name not in values:
                raise ValueError('Report record is missing field: {}'.format(field.name))
            value = values[field.name]
            if field.type == 'int':
                value = int(value)
            elif field.type == 'float':
                value = float(value)
            else:
                value = str(value)
            converted[field.name] = value
        return cls(**converted)


def phase_row(result, path, family_name, command='phase'):
    """
    Report row for a phase result computed on a tracked (lifted) path

    :type result: phase.PhaseResult
    :type path: tracking.SpectralPath
    :rtype: ReportRow
    """
    monodromy = path.monodromy.notation() if path.monodromy is not None else 'open'
    return ReportRow(command=command,
                     family=str(family_name),
                     curve=path.curve.name,
                     label=int(result.label) + 1,
                     monodromy=monodromy,
                     traversals=int(result.traversals),
                     dynamical_re=float(result.dynamical.real),
                     dynamical_im=float(result.dynamical.imag),
                     gamma_raw=float(result.geometric_raw),
                     gamma_mod_2pi=float(result.geometric_wrapped),
                     gamma_imag=float(result.geometric_imag),
                     holonomy_abs=float(abs(result.holonomy_factor)),
                     refinement_depth=int(path.refinement_depth),
                     min_gap=float(path.min_gap) if numpy.isfinite(path.min_gap) else NO_GAP,
                     n_samples=int(result.n_samples_used))


def rows_to_frame(rows):
    """
    :type rows: [ReportRow]
    :rtype: pandas.DataFrame
    """
    columns = [field.name for field in fields(ReportRow)]
    return pandas.DataFrame([row.to_dict() for row in rows], columns=columns)


def _plain(value):
    """
    Convert numpy scalars to the matching Python type, so that json can serialize them
    """
    if isinstance(value, numpy.generic):
        return value.item()
    return value


def _check_format(output_format):
    if output_format not in FORMATS:
        raise ValueError('Unknown output format: {}. Choose from: {}'.format(output_format, FORMATS))
    return True


def write_table(frame, directory, stem, output_format=CSV):
    """
    Write a table as `<stem>.csv`, with 17 significant digits, or as `<stem>.json`, a list of records

    :param frame: The table
    :type frame: pandas.DataFrame
    :param directory: Output directory; created if missing
    :param stem: File name without extension
    :param output_format: `CSV` or `JSON`
    :return: Path of the written file
    :rtype: str
    """
    _check_format(output_format)
    os.makedirs(directory, exist_ok=True)
    path = os.path.join(directory, '{}.{}'.format(stem, output_format))
    if output_format == CSV:
        frame.to_csv(path, index=False, float_format=FLOAT_FORMAT)
    else:
        records = [{key: _plain(value) for key, value in record.items()}
                   for record in frame.to_dict(orient='records')]
        with open(path, 'w') as output_file:
            json.dump(records, output_file, indent=2)
    logging.info('Wrote {} rows to: {}'.format(len(frame.index), path))
    return path


def write_rows(rows, directory, output_format=CSV, stem='report'):
    return write_table(rows_to_frame(rows), directory, stem, output_format)


def read_rows(path):
    """
    Parse a report written by `write_rows`, in either format

    :rtype: [ReportRow]
    """
    if path.endswith('.json'):
        with open(path) as input_file:
            records = json.load(input_file)
    else:
        frame = pandas.read_csv(path, dtype={'monodromy': str}, float_precision='round_trip')
        records = frame.to_dict(orient='records')
    return [ReportRow.from_dict(record) for record in records]


def _save(figure, path):
    figure.savefig(path, format='svg', metadata={'Date': None}, bbox_inches='tight')
    plt.close(figure)
    logging.info('Wrote plot: {}'.format(path))
    return path


def plot_eigencurves(path, labels, filename):
    """
    Eigenvalue trajectories in the complex plane, one line per tracked branch

    :type path: tracking.SpectralPath
    :param labels: Zero-based start labels
    """
    figure, axis = plt.subplots(figsize=(6, 6))
    for label in labels:
        energies = path.energies(label)
        axis.plot(energies.real, energies.imag, label='branch {}'.format(label + 1))
        axis.plot(energies.real[:1], energies.imag[:1], 'ko', markersize=4)
    axis.set_xlabel('Re E')
    axis.set_ylabel('Im E')
    axis.set_title('Eigenvalues along {}'.format(path.curve.name))
    axis.legend(loc='best')
    return _save(figure, filename)


def plot_running_phase(running, filename, title='Running geometric phase'):
    """
    Running geometric phase against the curve parameter. Lifted branches run over t in [0, 1] of their own lifted
    curve

    :param running: {zero-based label: (sample times, cumulative phases)}
    """
    figure, (real_axis, imag_axis) = plt.subplots(2, 1, sharex=True, figsize=(7, 6))
    for label, (times, values) in running.items():
        real_axis.plot(times, numpy.real(values), label='branch {}'.format(label + 1))
        imag_axis.plot(times, numpy.imag(values), label='branch {}'.format(label + 1))
    real_axis.set_ylabel('Re gamma')
    imag_axis.set_ylabel('Im gamma')
    imag_axis.set_xlabel('t')
    real_axis.legend(loc='best')
    real_axis.set_title(title)
    return _save(figure, filename)


def plot_curvature(frame, filename, value_column='F_re'):
    """
    Heatmap of a curvature grid table. Masked cells stay blank

    :param frame: Table with columns `x`, `y`, `masked` and `value_column`
    :type frame: pandas.DataFrame
    """
    xs = numpy.unique(frame['x'].values)
    ys = numpy.unique(frame['y'].values)
    values = numpy.zeros((len(ys), len(xs)))
    mask = numpy.ones((len(ys), len(xs)), dtype=bool)
    for x, y, value, masked in zip(frame['x'], frame['y'], frame[value_column], frame['masked']):
        row, column = int(numpy.searchsorted(ys, y)), int(numpy.searchsorted(xs, x))
        values[row, column] = value
        mask[row, column] = bool(masked)

    figure, axis = plt.subplots(figsize=(6, 5))
    image = axis.pcolormesh(xs, ys, numpy.ma.masked_array(values, mask=mask), shading='nearest')
    figure.colorbar(image, ax=axis, label=value_column)
    axis.set_xlabel('x')
    axis.set_ylabel('y')
    axis.set_title('Curvature')
    return _save(figure, filename)


def output_path(directory, name):
    os.makedirs(directory, exist_ok=True)
    return os.path.join(directory, lib.namespace_conversion(name) + '.svg')
