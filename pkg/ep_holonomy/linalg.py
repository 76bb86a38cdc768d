"""
Dense complex eigendecomposition for small matrices, biorthonormalization of left / right eigenvectors, and
classification of degeneracies as diabolic or exceptional.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy
import scipy.linalg
from scipy.optimize import linear_sum_assignment

from ep_holonomy import lib
from ep_holonomy.exceptions import DegenerateInput, NoConvergence, SelfOrthogonal

NONDEGENERATE = 'Nondegenerate'
DIABOLIC = 'Diabolic'
EXCEPTIONAL = 'Exceptional'


@dataclass(frozen=True, eq=False)
class Eigenframe:
    """
    Eigenvalues plus biorthonormal right / left eigenvectors at one parameter point.

    Vectors are stored as columns: `right[:, j]` is the right eigenvector for `eigenvalues[j]`, and `left[:, j]` is
    the matching eigenvector of H^dagger, with <left_j|right_k> = delta_jk.
    """
    eigenvalues: numpy.ndarray
    right: numpy.ndarray
    left: numpy.ndarray
    residual: float
    gap: float

    @property
    def dim(self):
        return len(self.eigenvalues)

    def overlap(self, other, label, other_label):
        """
        <left_label (this frame) | right_other_label (other frame)>
        """
        return complex(numpy.vdot(self.left[:, label], other.right[:, other_label]))

    def rescaled(self, factors):
        """
        Apply a gauge transformation: right vectors are multiplied by `factors`, left vectors by 1 / conj(factors)

        :param factors: One nonzero complex factor per label
        :return: A new frame
        :rtype: Eigenframe
        """
        factors = numpy.asarray(factors, dtype=complex)
        return Eigenframe(eigenvalues=self.eigenvalues,
                          right=self.right * factors[numpy.newaxis, :],
                          left=self.left / numpy.conj(factors)[numpy.newaxis, :],
                          residual=self.residual,
                          gap=self.gap)

    def nearest_label(self, energy):
        return int(numpy.argmin(numpy.abs(self.eigenvalues - energy)))


@dataclass(frozen=True)
class DegeneracyClass:
    kind: str
    gap: float
    eigenvector_defect: float


def spectral_gap(eigenvalues):
    """
    Minimum pairwise distance between eigenvalues, or infinity for a single eigenvalue
    """
    eigenvalues = numpy.asarray(eigenvalues)
    if len(eigenvalues) < 2:
        return numpy.inf
    distances = numpy.abs(eigenvalues[:, numpy.newaxis] - eigenvalues[numpy.newaxis, :])
    distances[numpy.diag_indices_from(distances)] = numpy.inf
    return float(distances.min())


def canonical_order(eigenvalues, scale=1.):
    """
    Deterministic label order: descending real part, then descending imaginary part. Parts are rounded relative to
    `scale` first, so roundoff does not reorder eigenvalues with equal real parts.
    """
    rounding = 10 - int(numpy.floor(numpy.log10(max(scale, 1e-300))))
    real = numpy.round(numpy.real(eigenvalues), rounding)
    imag = numpy.round(numpy.imag(eigenvalues), rounding)
    return numpy.lexsort((-imag, -real))


def fix_gauge(right, left):
    """
    Rescale each right vector to unit norm with its largest-magnitude component real positive; the left vector absorbs
    the inverse conjugate factor, so pairings are untouched.
    """
    right = numpy.array(right, dtype=complex)
    left = numpy.array(left, dtype=complex)
    for j in range(right.shape[1]):
        column = right[:, j]
        largest = column[numpy.argmax(numpy.abs(column))]
        factor = numpy.linalg.norm(column) * largest / abs(largest)
        right[:, j] = column / factor
        left[:, j] = left[:, j] * numpy.conj(factor)
    return right, left


def biorthonormalize(right, left, tol=lib.SELF_ORTHOGONAL_TOL):
    """
    Rescale paired right / left vectors so that <left_j|right_k> = delta_jk.

    Right vectors end up unit norm with their largest component real positive; left vectors absorb the remaining
    factor. Pairs with distinct eigenvalues are already orthogonal across labels, so only the diagonal is normalized.

    :param right: Right vectors, as columns
    :param left: Left vectors, as columns, paired by column index
    :param tol: Threshold for |<left_j|right_j>| between unit vectors, below which the pair counts as self orthogonal
    :return: (right', left')
    """
    right = numpy.array(right, dtype=complex)
    left = numpy.array(left, dtype=complex)
    if right.ndim == 1:
        right = right[:, numpy.newaxis]
        left = left[:, numpy.newaxis]
    if right.shape != left.shape:
        raise ValueError('Right and left vectors differ in shape: {} vs {}'.format(right.shape, left.shape))

    for j in range(right.shape[1]):
        right_norm = numpy.linalg.norm(right[:, j])
        left_norm = numpy.linalg.norm(left[:, j])
        if right_norm == 0 or left_norm == 0:
            raise SelfOrthogonal('Zero eigenvector for label: {}'.format(j))
        pairing = numpy.vdot(left[:, j], right[:, j])
        if abs(pairing) / (right_norm * left_norm) < tol:
            raise SelfOrthogonal('Left and right vectors for label: {} are self orthogonal, |<phi|psi>| = {}. '
                                 'This signals an exceptional point'.format(j, abs(pairing)))

        # <left / conj(p)|right> = p / p
        left[:, j] = left[:, j] / numpy.conj(pairing)

    return fix_gauge(right, left)


def _frame_residual(matrix, eigenvalues, right, left):
    """
    Largest eigen-equation residual over all right and left vectors, as stored, and the same residual measured on unit
    vectors
    """
    right_residual = numpy.linalg.norm(matrix @ right - right * eigenvalues[numpy.newaxis, :], axis=0)
    left_residual = numpy.linalg.norm(matrix.conj().T @ left - left * numpy.conj(eigenvalues)[numpy.newaxis, :],
                                      axis=0)
    raw = float(max(right_residual.max(), left_residual.max()))
    unit = float(max((right_residual / numpy.linalg.norm(right, axis=0)).max(),
                     (left_residual / numpy.linalg.norm(left, axis=0)).max()))
    return raw, unit


def eig_general(matrix, tol=lib.DEGENERACY_TOL):
    """
    Eigenframe of an N x N complex matrix with a simple spectrum.

    Right vectors come from H, left vectors are computed independently from H^dagger, and paired to the right vectors
    by matching their eigenvalues to conj(E_j).

    :param matrix: An N x N complex matrix
    :param tol: Relative degeneracy tolerance; eigenvalues closer than tol * ||H|| raise `DegenerateInput`
    :type tol: float
    :return: Biorthonormal eigenframe, labels in canonical order
    :rtype: Eigenframe
    """
    matrix = lib.check_square_matrix(matrix)
    norm = lib.matrix_norm(matrix)

    try:
        eigenvalues, right = scipy.linalg.eig(matrix, right=True)
        adjoint_values, left = scipy.linalg.eig(matrix.conj().T, right=True)
    except (numpy.linalg.LinAlgError, ValueError) as error:
        raise NoConvergence('Eigensolver failed on matrix: {}, {}'.format(matrix, error))

    gap = spectral_gap(eigenvalues)
    if gap <= tol * norm:
        raise DegenerateInput('Eigenvalues coincide within tolerance: gap {} <= {} * {}'.format(gap, tol, norm))

    # Pair the spectrum of H^dagger against conj(E_j)
    cost = numpy.abs(adjoint_values[numpy.newaxis, :] - numpy.conj(eigenvalues)[:, numpy.newaxis])
    _, pairing = linear_sum_assignment(cost)
    left = left[:, pairing]

    order = canonical_order(eigenvalues, scale=max(norm, 1e-300))
    eigenvalues = eigenvalues[order]
    right, left = biorthonormalize(right[:, order], left[:, order])

    residual, unit_residual = _frame_residual(matrix, eigenvalues, right, left)
    if unit_residual > lib.RESIDUAL_TOL * max(norm, 1.):
        raise NoConvergence('Eigenframe residual: {} exceeds tolerance for norm: {}'.format(unit_residual, norm))

    return Eigenframe(eigenvalues=eigenvalues, right=right, left=left, residual=residual, gap=gap)


def eig_2x2(matrix, tol=lib.DEGENERACY_TOL):
    """
    Closed form eigenframe of a 2 x 2 matrix, E = tr(H) / 2 +- f with f = sqrt(a^2 + bc) taken on the principal branch.

    Vectors are the closed form patch frames, on whichever patch has the larger denominator. Label 0 is the `+f`
    branch, label 1 the `-f` branch.

    :param matrix: A 2 x 2 complex matrix
    :param tol: Relative tolerance on |f|
    :return: Biorthonormal eigenframe
    :rtype: Eigenframe
    """
    from ep_holonomy import analytic2x2

    matrix = lib.check_square_matrix(matrix)
    if matrix.shape != (2, 2):
        raise ValueError('eig_2x2 expects a 2 x 2 matrix, got shape: {}'.format(matrix.shape))
    norm = lib.matrix_norm(matrix)
    shift = numpy.trace(matrix) / 2.

    a, b, c = analytic2x2.traceless_entries(matrix)
    f = numpy.sqrt(a * a + b * c)
    if abs(f) <= tol * norm:
        raise DegenerateInput('Degenerate 2 x 2 matrix, |f| = {} for matrix: {}'.format(abs(f), matrix))

    patch = analytic2x2.M1 if abs(f + a) >= abs(f - a) else analytic2x2.M2
    frame = analytic2x2.frame_closed_form(analytic2x2.TwoLevelPoint(a=a, b=b, c=c, f=f, patch=patch))

    eigenvalues = numpy.array([shift + f, shift - f])
    right = numpy.column_stack([frame.psi_plus, frame.psi_minus])
    left = numpy.column_stack([frame.phi_plus, frame.phi_minus])
    residual, _ = _frame_residual(matrix, eigenvalues, right, left)
    return Eigenframe(eigenvalues=eigenvalues, right=right, left=left, residual=residual, gap=float(2 * abs(f)))


def classify_degeneracy(matrix, tol, defect_tol=lib.DEFECT_TOL):
    """
    Classify a matrix as nondegenerate, diabolic (coalescing eigenvalues, complete eigenbasis) or exceptional
    (coalescing eigenvalues, incomplete eigenbasis).

    The eigenvector defect is 1 minus the smallest singular value of the unit-normalized eigenvectors belonging to the
    closest eigenvalue cluster.

    :param matrix: An N x N complex matrix
    :param tol: Absolute gap tolerance, > 0
    :type tol: float
    :param defect_tol: Defect above which the eigenbasis counts as incomplete
    :type defect_tol: float
    :rtype: DegeneracyClass
    """
    if tol <= 0:
        raise ValueError('Classification tolerance must be positive, got: {}'.format(tol))
    matrix = lib.check_square_matrix(matrix)
    eigenvalues, vectors = scipy.linalg.eig(matrix)
    gap = spectral_gap(eigenvalues)

    if gap > tol:
        return DegeneracyClass(kind=NONDEGENERATE, gap=gap, eigenvector_defect=0.)

    # Collect every eigenvalue within tol of another one
    distances = numpy.abs(eigenvalues[:, numpy.newaxis] - eigenvalues[numpy.newaxis, :])
    cluster = numpy.where((distances <= tol).sum(axis=1) > 1)[0]
    unit_vectors = vectors[:, cluster] / numpy.linalg.norm(vectors[:, cluster], axis=0)[numpy.newaxis, :]
    singular_values = numpy.linalg.svd(unit_vectors, compute_uv=False)
    defect = float(max(0., 1. - singular_values.min()))

    kind = EXCEPTIONAL if defect > defect_tol else DIABOLIC
    logging.debug('Classified degeneracy: {}, gap: {}, defect: {}'.format(kind, gap, defect))
    return DegeneracyClass(kind=kind, gap=gap, eigenvector_defect=defect)
