"""
Direct integration of i dPsi/dt = H(t) Psi along a curve, to check the adiabatic decomposition of the evolved state
into dynamical and geometric phases.

Evolution is not unitary for non-Hermitian families, so the state is renormalized between chunks of the time interval
and the removed norm is kept as a log scale factor.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, replace
from typing import Optional

import numpy
import pandas
from joblib import Parallel, delayed
from scipy.integrate import solve_ivp

from ep_holonomy import lib, tracking
from ep_holonomy.exceptions import HolonomyError, InvalidParams, LowFidelity, NonCyclicBranch, OpenCurve, \
    StepUnderflow
from ep_holonomy.phase import dynamical_phase, geometric_phase

# Largest growth exponent allowed within one integration chunk
CHUNK_GROWTH = 50.

# Curve samples used to bound the non-Hermitian part of the family
GROWTH_SAMPLES = 64

SWEEP_COLUMNS = ['T', 'error', 'fidelity', 'gamma_exact_re', 'gamma_exact_im', 'gamma_geometric_re',
                 'gamma_geometric_im', 'status']


@dataclass(frozen=True, eq=False)
class EvolutionResult:
    """
    Final state of an integration. The state is Psi(T) = exp(log_scale) * final_state, with final_state of unit norm.

    Projection fields are filled once the result is projected onto a frame: `overlap` is <phi_n(T)|final_state>,
    `fidelity` the cosine similarity of Psi(T) with psi_n(T), and `extracted_total_phase` the complex phase
    -i ln(<phi_n(T)|Psi(T)> / k).
    """
    final_state: numpy.ndarray
    log_scale: float
    T: float
    overlap: Optional[complex] = None
    fidelity: Optional[float] = None
    extracted_total_phase: Optional[complex] = None
    label: Optional[int] = None
    k: complex = 1.

    @property
    def state(self):
        return self.final_state * numpy.exp(self.log_scale)

    @property
    def log_norm(self):
        return self.log_scale + float(numpy.log(numpy.linalg.norm(self.final_state)))


def _check_integration_params(T, psi0, rel_tol):
    if not T > 0:
        raise InvalidParams('Evolution time must be positive, got: {}'.format(T))
    if not 1e-14 < rel_tol < 1e-2:
        raise InvalidParams('rel_tol must lie in (1e-14, 1e-2), got: {}'.format(rel_tol))
    if numpy.linalg.norm(psi0) == 0:
        raise InvalidParams('Initial state must be nonzero')
    return True


def chunk_count(family, curve, T):
    """
    Number of renormalization chunks for an evolution of duration T: the bound on |e^{-iHt}| growth from the
    anti-Hermitian part stays below exp(CHUNK_GROWTH) per chunk
    """
    bound = 0.
    for t in numpy.linspace(0., 1., GROWTH_SAMPLES, endpoint=False):
        matrix = family.matrix(curve(t))
        bound = max(bound, float(numpy.linalg.norm((matrix - matrix.conj().T) / 2., 2)))
    return max(1, int(numpy.ceil(bound * T / CHUNK_GROWTH)))


def project(result, frame, label, k=1.):
    """
    Project an evolved state onto one label of a frame

    :type result: EvolutionResult
    :type frame: linalg.Eigenframe
    :param k: The constant of the initial condition Psi(0) = k psi_n(0)
    :rtype: EvolutionResult
    """
    k = complex(k)
    right = frame.right[:, label]
    overlap = complex(numpy.vdot(frame.left[:, label], result.final_state))
    fidelity = float(abs(numpy.vdot(right, result.final_state))
                     / (numpy.linalg.norm(right) * numpy.linalg.norm(result.final_state)))
    if overlap == 0:
        total = complex(numpy.nan, numpy.nan)
    else:
        total = complex(-1j * (numpy.log(overlap / k) + result.log_scale))
    return replace(result, overlap=overlap, fidelity=fidelity, extracted_total_phase=total, label=int(label), k=k)


def fidelities(result, frame):
    """
    Fidelity of the evolved state to every label of a frame

    :rtype: numpy.ndarray
    """
    return numpy.array([project(result, frame, label).fidelity for label in range(frame.dim)])


def integrate(family, curve, T, psi0, rel_tol=1e-8, frame=None, label=None, k=1.):
    """
    Integrate dPsi/dt = -i H(curve(t / T)) Psi over [0, T] with an adaptive Runge-Kutta 5(4) scheme. No normalization is
    imposed on the physical state.

    :param family: The matrix family
    :param curve: The curve; its parameter runs over [0, 1] while t runs over [0, T]
    :param T: Duration, > 0
    :param psi0: Initial state, nonzero
    :param rel_tol: Relative tolerance of the step controller, in (1e-14, 1e-2)
    :param frame: Optional frame to project the final state on, together with `label`
    :rtype: EvolutionResult
    """
    psi0 = numpy.array(psi0, dtype=complex)
    T = float(T)
    _check_integration_params(T, psi0, rel_tol)

    def rhs(t, y):
        return -1j * (family.matrix(curve(min(t / T, 1.))) @ y)

    chunks = chunk_count(family, curve, T)
    logging.info('Integrating family: {} along: {} over T = {} in {} chunks'.format(family.name, curve.name, T,
                                                                                  chunks))
    norm = numpy.linalg.norm(psi0)
    state = psi0 / norm
    log_scale = float(numpy.log(norm))
    bounds = numpy.linspace(0., T, chunks + 1)
    for t0, t1 in zip(bounds[:-1], bounds[1:]):
        solution = solve_ivp(rhs, (t0, t1), state, method='RK45', rtol=rel_tol, atol=rel_tol * 1e-3)
        if solution.status == -1:
            raise StepUnderflow('Integration failed between t = {} and t = {}: {}'.format(t0, t1, solution.message))
        state = solution.y[:, -1]
        norm = numpy.linalg.norm(state)
        if not numpy.isfinite(norm) or norm == 0:
            raise StepUnderflow('State norm collapsed to: {} at t = {}'.format(norm, t1))
        state = state / norm
        log_scale += float(numpy.log(norm))
        logging.debug('Chunk [{}, {}]: {} steps, log scale: {}'.format(t0, t1, solution.t.size, log_scale))

    result = EvolutionResult(final_state=state, log_scale=log_scale, T=T, k=complex(k))
    if frame is not None and label is not None:
        result = project(result, frame, label, k)
    return result


def adiabatic_extract(result, path, label, k=None, tol=lib.FIDELITY_FLOOR):
    """
    Geometric phase of an evolved state: the extracted total phase minus the dynamical phase, with its 2 pi winding
    matched to the raw discrete geometric phase of the path

    :param result: Evolution along the curve of `path`, over duration `result.T`
    :param path: Tracked closed path; the branch of `label` must be cyclic
    :param k: Constant of the initial condition; defaults to the one stored on the result
    :param tol: Lowest fidelity for which the adiabatic decomposition is meaningful
    :rtype: complex
    """
    if not path.closed:
        raise OpenCurve('Adiabatic extraction needs a closed path, got: {}'.format(path.curve.name))
    if path.branch(label)[-1] != label:
        raise NonCyclicBranch('Label: {} is not cyclic around: {}'.format(label, path.curve.name))
    k = result.k if k is None else complex(k)

    projected = project(result, path.frames[-1], label, k)
    if projected.fidelity < tol:
        raise LowFidelity('Fidelity: {} to label: {} is below: {}, the evolution is not adiabatic'.format(
            projected.fidelity, label, tol), fidelity=projected.fidelity)

    gamma = projected.extracted_total_phase - dynamical_phase(path, label, duration=result.T)
    reference = geometric_phase(path, label).geometric
    winding = round((reference.real - gamma.real) / (2 * numpy.pi))
    return complex(gamma + 2 * numpy.pi * winding)


def _sweep_row(family, curve, path, label, T, rel_tol, k, reference):
    psi0 = k * path.frames[0].right[:, label]
    row = dict(T=float(T), error=numpy.nan, fidelity=numpy.nan, gamma_exact_re=numpy.nan, gamma_exact_im=numpy.nan,
               gamma_geometric_re=reference.real, gamma_geometric_im=reference.imag, status='ok')
    try:
        result = integrate(family, curve, T, psi0, rel_tol=rel_tol, frame=path.frames[-1], label=label, k=k)
        row['fidelity'] = result.fidelity
        gamma = adiabatic_extract(result, path, label, k)
        row['error'] = lib.phase_distance(gamma, reference)
        row['gamma_exact_re'] = gamma.real
        row['gamma_exact_im'] = gamma.imag
    except LowFidelity as error:
        logging.warning('Skipping T = {}: {}'.format(T, error))
        row['status'] = 'non-adiabatic'
    except HolonomyError as error:
        logging.warning('Sweep row T = {} failed: {}'.format(T, error))
        row['status'] = 'failed:{}'.format(type(error).__name__)
    return row


def sweep(family, curve, label, T_list, rel_tol=1e-8, k=1., n_samples=512, workers=1):
    """
    Adiabatic convergence table: the distance between the extracted and discrete geometric phases, per duration T

    :param curve: A closed curve on which `label` is cyclic; lift it first otherwise
    :param T_list: Durations; rows are computed independently on a bounded worker pool
    :param workers: Pool size
    :return: One row per T, with columns `SWEEP_COLUMNS`
    :rtype: pandas.DataFrame
    """
    T_list = list(T_list)
    if len(T_list) == 0:
        logging.warning('Empty T list, nothing to sweep')
        return pandas.DataFrame(columns=SWEEP_COLUMNS)

    path = tracking.track(family, curve, n_samples)
    reference = geometric_phase(path, label).geometric
    rows = Parallel(n_jobs=workers, prefer='threads')(
        delayed(_sweep_row)(family, curve, path, label, T, rel_tol, complex(k), reference) for T in T_list)
    return pandas.DataFrame(rows, columns=SWEEP_COLUMNS)
