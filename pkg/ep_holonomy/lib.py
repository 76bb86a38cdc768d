"""
Library / helper functions for ep-holonomy
"""
import logging
import os
import re
import string
import tempfile

import numpy

# Default tolerances. Relative tolerances are scaled by the (Frobenius) norm of the matrix at hand
DEGENERACY_TOL = 1e-8
DEFECT_TOL = 1e-6
EP_GUARD = 1e-6
EP_WARNING = 1e-3
BIORTHO_TOL = 1e-9
RESIDUAL_TOL = 1e-10
SELF_ORTHOGONAL_TOL = 1e-10
MAX_BISECTION_DEPTH = 20
AMBIGUITY_RATIO = 2.
PRECISION_LOSS = 0.5
MIN_SAMPLES = 8
FIDELITY_FLOOR = 0.9
JUNCTION_TOL = 1e-6
MAX_POLYNOMIAL_DEGREE = 16

LOG_LEVEL_VARIABLE = 'EP_HOLONOMY_LOG_LEVEL'


def configure_logging(default_level='WARNING'):
    """
    Set the root logger's level from the `EP_HOLONOMY_LOG_LEVEL` environment variable

    :param default_level: Level name to use when the environment variable is not set
    :type default_level: str
    :return: The numeric level that was set
    :rtype: int
    """
    level_name = os.environ.get(LOG_LEVEL_VARIABLE, default_level).upper()
    level = getattr(logging, level_name, None)
    if not isinstance(level, int):
        logging.warning('Unknown log level: {}, falling back to: {}'.format(level_name, default_level))
        level = getattr(logging, default_level)
    logging.basicConfig(format='%(asctime)s %(levelname)s %(message)s')
    logging.getLogger().setLevel(level)
    return level


def check_square_matrix(matrix):
    """
    Validate, and convert `matrix` to a complex, square numpy array

    :param matrix: An N x N array-like, with N >= 1
    :return: The matrix, as a complex numpy array
    :rtype: numpy.ndarray
    """
    matrix = numpy.array(matrix, dtype=complex)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1] or matrix.shape[0] < 1:
        raise ValueError('Expected a square N x N matrix with N >= 1, got shape: {}'.format(matrix.shape))
    if not numpy.all(numpy.isfinite(matrix)):
        raise ValueError('Matrix has non-finite entries: {}'.format(matrix))
    return matrix


def matrix_norm(matrix):
    return float(numpy.linalg.norm(matrix))


def as_point(point):
    """
    Convert a parameter point to a 1-D float array
    """
    point = numpy.atleast_1d(numpy.array(point, dtype=float))
    if point.ndim != 1:
        raise ValueError('Parameter points must be 1-D, got shape: {}'.format(point.shape))
    return point


def wrap_phase(angle):
    """
    Wrap a real angle into the interval (-pi, pi]

    :param angle: An angle, in radians
    :type angle: float
    :return: The equivalent angle in (-pi, pi]
    :rtype: float
    """
    wrapped = float(numpy.mod(angle + numpy.pi, 2 * numpy.pi) - numpy.pi)
    if wrapped == -numpy.pi:
        wrapped = numpy.pi
    return wrapped


def phase_distance(first, second):
    """
    Distance between two complex phases, with the real parts compared modulo 2 pi
    """
    difference = complex(first) - complex(second)
    return abs(complex(wrap_phase(difference.real), difference.imag))


def as_complex(value):
    """
    Parse a complex number from a config value: a number, an `[re, im]` pair, or a string like `1+2j`

    :return: The parsed value
    :rtype: complex
    """
    if isinstance(value, (list, tuple)):
        if len(value) != 2:
            raise ValueError('Complex values are written as [re, im] pairs, got: {}'.format(value))
        return complex(float(value[0]), float(value[1]))
    if isinstance(value, str):
        return complex(value.replace(' ', ''))
    return complex(value)


def complex_pair(value):
    value = complex(value)
    return [value.real, value.imag]


def check_labels_are_valid(labels, dim):
    """
    Checks that the provided spectral labels are valid, by:

     - Confirming that each label is an integer in [0, dim)
     - Confirming that there are no repeated labels

    :param labels: Zero-based spectral labels
    :type labels: [int]
    :param dim: Matrix dimension N
    :type dim: int
    :return: True, if the labels are valid
    :rtype: bool
    """
    for label in labels:
        if int(label) != label or not 0 <= label < dim:
            raise ValueError('Label: {} is not a valid spectral index for dimension: {}'.format(label, dim))

    duplicates = set(filter(lambda x: labels.count(x) > 1, labels))
    if len(duplicates) > 0:
        raise ValueError('Labels repeated: {}'.format(duplicates))

    return True


def namespace_conversion(input_string):
    """
    Convert input_string to be safe for use as a file name stem

    :param input_string: A string, to be converted
    :type input_string: str
    :return: Cleanly formatted version of input_string
    :rtype: str
    """
    letters = set(string.ascii_lowercase + string.ascii_uppercase)
    cleaned = re.sub(r'[^a-zA-Z0-9_]', '_', str(input_string))
    if len(cleaned) <= 0:
        cleaned = 'unnamed'
        logging.warning('Input string: {} reduced to empty name. Replaced w/: {}'.format(input_string, cleaned))
    if cleaned[0] not in letters:
        cleaned = 'start_' + cleaned
    logging.debug('input_string: {} converted to cleaned: {}'.format(input_string, cleaned))
    return cleaned


def get_temp_dir():
    temp_dir = tempfile.mkdtemp(prefix='ep_holonomy')
    logging.info('Created temp_dir: {}'.format(temp_dir))
    return temp_dir
