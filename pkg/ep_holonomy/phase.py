"""
Dynamical and geometric phases along tracked spectral paths.

The discrete holonomy of a closed branch is built from the step overlaps o_k = <phi(t_k)|psi(t_k+1)> and
o'_k = <phi(t_k+1)|psi(t_k)>:

    gamma = i sum_k [ln o_k - ln(o_k o'_k) / 2]

Both the holonomy factor exp(i gamma) and the products o_k o'_k are invariant under per-sample rescalings of the
frames. The symmetric correction term makes Hermitian holonomies exactly unimodular, and leaves a discretization error
that is even in the step size.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, replace

import numpy
from joblib import Parallel, delayed
from scipy.integrate import trapezoid

from ep_holonomy import curves, lib, tracking
from ep_holonomy.exceptions import InvalidCurve, MismatchedJunction, NearEP, NonCyclicBranch, \
    NotContractible, OpenCurve, PrecisionLoss, ZeroGauge

EXTERIOR_DERIVATIVE = 'ExteriorDerivative'
SUM_OVER_STATES = 'SumOverStates'

# Fewest steps for which the coarse half-sampled loop is used to extrapolate
MIN_EXTRAPOLATION_STEPS = 16


@dataclass(frozen=True)
class PhaseResult:
    """
    Phases of one spectral branch around a closed (lifted) loop

    :param geometric: Complex geometric phase; the real part is the raw, unwrapped sum of principal logs
    :param traversals: Number of times the base loop is covered
    """
    label: int
    dynamical: complex
    geometric: complex
    holonomy_factor: complex
    traversals: int
    n_samples_used: int
    extrapolated: bool = False

    @property
    def geometric_raw(self):
        return self.geometric.real

    @property
    def geometric_wrapped(self):
        return lib.wrap_phase(self.geometric.real)

    @property
    def geometric_imag(self):
        return self.geometric.imag


@dataclass(frozen=True, eq=False)
class CurvatureSample:
    point: numpy.ndarray
    label: int
    components: numpy.ndarray
    method: str
    h: float


def _step_overlaps(frames, labels, closed):
    """
    Overlaps o_k and o'_k for every step. On closed paths the last step ends on the first frame
    """
    forward = numpy.empty(len(frames) - 1, dtype=complex)
    backward = numpy.empty(len(frames) - 1, dtype=complex)
    for k in range(len(frames) - 1):
        start, start_label = frames[k], labels[k]
        if closed and k == len(frames) - 2:
            end, end_label = frames[0], labels[0]
        else:
            end, end_label = frames[k + 1], labels[k + 1]
        forward[k] = start.overlap(end, start_label, end_label)
        backward[k] = end.overlap(start, end_label, start_label)
    return forward, backward


def _check_precision(forward, backward, tol, n_steps):
    deviation = numpy.abs(forward * backward - 1.)
    worst = int(numpy.argmax(deviation))
    if deviation[worst] > tol:
        raise PrecisionLoss('Step: {} overlap deviates from 1 by {}, above: {}. Sampling is too coarse'.format(
            worst, deviation[worst], tol), suggested_samples=4 * n_steps)
    return True


def _log_sum(forward, backward):
    return complex(1j * numpy.sum(numpy.log(forward) - 0.5 * numpy.log(forward * backward)))


def dynamical_phase(path, label, duration=None):
    """
    Dynamical phase -int E_n dt along the tracked branch, by the trapezoidal rule

    :param path: The tracked path
    :type path: tracking.SpectralPath
    :param label: Start label of the branch
    :param duration: Physical duration of the whole path; defaults to the curve's period
    :rtype: complex
    """
    duration = path.duration if duration is None else float(duration)
    return complex(trapezoid(-path.energies(label), path.times * duration))


def geometric_phase(path, label, tol=lib.PRECISION_LOSS, extrapolate=True):
    """
    Discrete holonomy of a cyclic branch around a closed path.

    With `extrapolate`, uniform paths with an even number of steps are also evaluated on every other sample, and the
    two values are combined to cancel the leading discretization error. The combination is built from the wrapped
    difference, so the holonomy factor stays gauge invariant.

    :param path: A tracked closed path; lift the curve first if the monodromy moves `label`
    :type path: tracking.SpectralPath
    :param label: Start label of the branch
    :param tol: Largest allowed |o_k o'_k - 1| per step
    :param extrapolate: Whether to extrapolate against the half-sampled loop
    :rtype: PhaseResult
    """
    if not path.closed:
        raise OpenCurve('The geometric phase needs a closed path, got: {}'.format(path.curve.name))
    lib.check_labels_are_valid([label], path.dim)
    labels = path.branch(label)
    if labels[-1] != label:
        raise NonCyclicBranch('Label: {} ends on label: {} around curve: {}. Lift the curve first'.format(
            label, labels[-1], path.curve.name))

    n_steps = len(path.frames) - 1
    forward, backward = _step_overlaps(path.frames, labels, closed=True)
    _check_precision(forward, backward, tol, n_steps)
    geometric = _log_sum(forward, backward)

    extrapolated = False
    if extrapolate and path.uniform and n_steps % 2 == 0 and n_steps >= MIN_EXTRAPOLATION_STEPS:
        coarse_forward, coarse_backward = _step_overlaps(path.frames[::2], labels[::2], closed=True)
        if numpy.abs(coarse_forward * coarse_backward - 1.).max() <= tol:
            difference = geometric - _log_sum(coarse_forward, coarse_backward)
            geometric += complex(lib.wrap_phase(difference.real), difference.imag) / 3.
            extrapolated = True
        else:
            logging.debug('Half-sampled loop too coarse, skipping extrapolation')

    result = PhaseResult(label=int(label),
                         dynamical=dynamical_phase(path, label),
                         geometric=geometric,
                         holonomy_factor=complex(numpy.exp(1j * geometric)),
                         traversals=path.curve.traversals,
                         n_samples_used=n_steps,
                         extrapolated=extrapolated)
    logging.info('Label: {} around: {}: geometric phase: {}, holonomy factor: {}'.format(
        label, path.curve.name, result.geometric, result.holonomy_factor))
    return result


def running_phase(path, label):
    """
    Cumulative geometric phase at each sample of a path, starting from 0. Closed paths need not be cyclic here

    :rtype: numpy.ndarray
    """
    labels = path.branch(label)
    forward, backward = _step_overlaps(path.frames, labels, closed=False)
    steps = 1j * (numpy.log(forward) - 0.5 * numpy.log(forward * backward))
    return numpy.concatenate([[0j], numpy.cumsum(steps)])


def gauge_perturb(path, rescalings):
    """
    Rescale right vectors by k and left vectors by 1 / conj(k), per sample and label

    :param rescalings: Nonzero complex factors, of shape (number of samples, N)
    :return: The rescaled path. On closed paths, the last sample keeps sharing the first sample's frame
    :rtype: tracking.SpectralPath
    """
    rescalings = numpy.broadcast_to(numpy.asarray(rescalings, dtype=complex), (len(path.frames), path.dim))
    if numpy.any(rescalings == 0):
        raise ZeroGauge('Gauge rescalings must be nonzero')
    frames = [frame.rescaled(factors) for frame, factors in zip(path.frames, rescalings)]
    if path.closed:
        frames[-1] = frames[0]
    return replace(path, frames=tuple(frames))


def _junction_label(previous, following, end_label):
    return following.frames[0].nearest_label(previous.frames[-1].eigenvalues[end_label])


def junction_transition(previous, following, end_label):
    """
    The transition scalar G with psi_end(previous) = G psi_start(following), for the branch that ends on `end_label`

    :rtype: complex
    """
    start_label = _junction_label(previous, following, end_label)
    overlap = previous.frames[-1].overlap(following.frames[0], end_label, start_label)
    if overlap == 0:
        raise MismatchedJunction('Frames at the junction are orthogonal for label: {}'.format(end_label))
    return complex(1. / overlap)


def junction_transitions(segments, label):
    """
    Transition scalars for every junction of a chain of segments, in the layout `multipatch_phase` expects

    :param label: Label of the branch in the first frame of the first segment
    :rtype: [complex]
    """
    segments = list(segments)
    transitions = [1. + 0j] * len(segments)
    current = int(label)
    for index, segment in enumerate(segments):
        following = segments[(index + 1) % len(segments)]
        end_label = segment.branch(current)[-1]
        transitions[(index + 1) % len(segments)] = junction_transition(segment, following, end_label)
        current = _junction_label(segment, following, end_label)
    return transitions


def split_path(path, boundaries):
    """
    Split a closed path into open segments at the given interior sample indices
    """
    indices = [0] + sorted(int(b) for b in boundaries) + [len(path.frames) - 1]
    return [path.segment(start, stop) for start, stop in zip(indices[:-1], indices[1:])]


def multipatch_phase(segments, transitions, label, tol=lib.JUNCTION_TOL, precision_tol=lib.PRECISION_LOSS):
    """
    Holonomy of a loop covered by segments with independent local frames.

    The holonomy factor is the product over segments of exp(i gamma_segment) times the transition scalar at the
    junction that ends the segment.

    :param segments: Paths that chain into a closed loop, each segment ending where the next one starts
    :type segments: [tracking.SpectralPath]
    :param transitions: `transitions[i]` is G at the junction where segment i starts, with psi on segment i - 1 equal
        to G psi on segment i; `transitions[0]` closes the loop
    :param label: Label of the branch in the first frame of the first segment
    :rtype: PhaseResult
    """
    segments = list(segments)
    transitions = [complex(g) for g in transitions]
    if len(segments) == 0 or len(transitions) != len(segments):
        raise ValueError('Need one transition per segment, got {} segments and {} transitions'.format(
            len(segments), len(transitions)))

    geometric = 0j
    dynamical = 0j
    n_steps = 0
    current = int(label)
    for index, segment in enumerate(segments):
        following = segments[(index + 1) % len(segments)]
        if not numpy.allclose(segment.points[-1], following.points[0], rtol=0, atol=1e-12):
            raise MismatchedJunction('Segment: {} ends at {}, but the next one starts at {}'.format(
                index, segment.points[-1], following.points[0]))

        labels = segment.branch(current)
        forward, backward = _step_overlaps(segment.frames, labels, closed=False)
        _check_precision(forward, backward, precision_tol, len(segment.frames) - 1)
        geometric += _log_sum(forward, backward)
        dynamical += dynamical_phase(segment, current)
        n_steps += len(segment.frames) - 1

        transition = transitions[(index + 1) % len(segments)]
        start_label = _junction_label(segment, following, labels[-1])
        mismatch = abs(segment.frames[-1].overlap(following.frames[0], labels[-1], start_label) * transition - 1.)
        if mismatch > tol:
            raise MismatchedJunction('Transition: {} does not match the frames after segment: {}, mismatch: {}'.format(
                transition, index, mismatch))
        geometric += -1j * numpy.log(transition)
        current = start_label

    if current != label:
        raise NonCyclicBranch('Label: {} returns on label: {}. Lift the loop first'.format(label, current))

    return PhaseResult(label=int(label),
                       dynamical=dynamical,
                       geometric=complex(geometric),
                       holonomy_factor=complex(numpy.exp(1j * geometric)),
                       traversals=segments[0].curve.traversals,
                       n_samples_used=n_steps)


def default_step(family, point):
    """
    Finite difference step: 1e-4 times the distance to the nearest known degeneracy, or 1e-4 if none is known
    """
    distance = family.distance_to_ep(point)
    return 1e-4 * (distance if distance else 1.)


def _unit(dim, index):
    vector = numpy.zeros(dim)
    vector[index] = 1.
    return vector


def _sum_over_states(family, point, frame, label, h):
    dim = family.dim_params
    derivatives = [(family.matrix(point + h * _unit(dim, i)) - family.matrix(point - h * _unit(dim, i))) / (2 * h)
                   for i in range(dim)]
    elements = [frame.left.conj().T @ derivative @ frame.right for derivative in derivatives]
    others = [m for m in range(frame.dim) if m != label]
    weights = {m: 1. / (frame.eigenvalues[m] - frame.eigenvalues[label]) ** 2 for m in others}

    components = numpy.zeros((dim, dim), dtype=complex)
    for i in range(dim):
        for j in range(i + 1, dim):
            value = 1j * sum((elements[i][label, m] * elements[j][m, label]
                              - elements[j][label, m] * elements[i][m, label]) * weights[m] for m in others)
            components[i, j] = value
            components[j, i] = -value
    return components


def _exterior_derivative(family, point, frame, label, h, solver, guard):
    dim = family.dim_params
    reference = frame.left[:, label]
    energy = frame.eigenvalues[label]
    cache = dict()

    def projected(q):
        # Frame in the gauge fixed by <phi(point)|psi(q)> = 1
        key = tuple(q)
        if key not in cache:
            local = tracking.frame_at(family, q, solver=solver, guard=guard)
            m = local.nearest_label(energy)
            scale = numpy.vdot(reference, local.right[:, m])
            cache[key] = (local.right[:, m] / scale, local.left[:, m] * numpy.conj(scale))
        return cache[key]

    def connection(q, i):
        step = h * _unit(dim, i)
        difference = (projected(q + step)[0] - projected(q - step)[0]) / (2 * h)
        return 1j * numpy.vdot(projected(q)[1], difference)

    components = numpy.zeros((dim, dim), dtype=complex)
    for i in range(dim):
        for j in range(i + 1, dim):
            step_i = h * _unit(dim, i)
            step_j = h * _unit(dim, j)
            value = ((connection(point + step_i, j) - connection(point - step_i, j))
                     - (connection(point + step_j, i) - connection(point - step_j, i))) / (2 * h)
            components[i, j] = value
            components[j, i] = -value
    return components


def curvature(family, point, label, h=None, method=SUM_OVER_STATES, solver=None, guard=lib.EP_GUARD, frame=None):
    """
    Curvature two-form F_n of one branch at a point

    :param family: The matrix family
    :param point: A nondegenerate parameter point
    :param label: Label in the canonical order of the frame at `point`
    :param h: Finite difference step; defaults to `default_step`
    :param method: `SUM_OVER_STATES` or `EXTERIOR_DERIVATIVE`
    :param frame: Eigenframe at `point`, in any gauge; computed when not given
    :type frame: linalg.Eigenframe
    :return: Antisymmetric d x d components
    :rtype: CurvatureSample
    """
    if method not in (SUM_OVER_STATES, EXTERIOR_DERIVATIVE):
        raise ValueError('Unknown curvature method: {}'.format(method))
    point = family.check_point(point)
    h = default_step(family, point) if h is None else float(h)
    if frame is None:
        frame = tracking.frame_at(family, point, solver=solver, guard=guard)
    lib.check_labels_are_valid([label], frame.dim)

    if method == SUM_OVER_STATES:
        components = _sum_over_states(family, point, frame, label, h)
    else:
        components = _exterior_derivative(family, point, frame, label, h, solver, guard)
    return CurvatureSample(point=point, label=int(label), components=components, method=method, h=h)


def curvature_grid(family, points, label, method=SUM_OVER_STATES, h=None, workers=1):
    """
    Curvature at many points on a bounded worker pool. Points within the EP guard come back as None

    :rtype: [CurvatureSample]
    """

    def evaluate(point):
        try:
            return curvature(family, point, label, h=h, method=method)
        except NearEP:
            return None

    samples = Parallel(n_jobs=workers, prefer='threads')(delayed(evaluate)(point) for point in points)
    masked = sum(sample is None for sample in samples)
    if masked > 0:
        logging.warning('Masked {} of {} curvature grid points near degeneracies'.format(masked, len(samples)))
    return samples


def _check_contractible(family, loop, guard):
    disk = loop.disk
    if disk is None:
        raise InvalidCurve('Stokes checks need a circular loop bounding a flat disk, got: {}'.format(loop.name))
    for ep in family.ep_points:
        if disk.distance_to(ep) < guard * max(disk.radius, 1.):
            raise NotContractible('Degeneracy at {} lies on the disk bounded by: {}'.format(ep, loop.name))
    return True


def stokes_check(family, small_loop, label, n_samples=256, grid=(64, 64), h=None, solver=None):
    """
    Compare the holonomy of a small circular loop with the curvature flux through the flat disk it bounds.

    The flux uses the midpoint rule on a polar grid with `SUM_OVER_STATES` curvature. Labels on the grid follow the
    branch from the loop's start point to the disk center, then outwards along each ray.

    :param small_loop: A circle, as built by `curves.circle`
    :param grid: (radial, angular) grid size
    :return: |gamma - flux|, with real parts compared modulo 2 pi
    :rtype: float
    """
    _check_contractible(family, small_loop, lib.EP_GUARD)
    disk = small_loop.disk
    path = tracking.track(family, small_loop, n_samples, solver=solver)
    if not path.monodromy.is_identity():
        raise NotContractible('Loop: {} permutes labels: {}'.format(small_loop.name, path.monodromy.notation()))
    gamma = geometric_phase(path, label).geometric

    flux = 0j
    if disk.radius > 0:
        spoke = curves.polyline([small_loop(0.), disk.center], name='spoke')
        center_energy = tracking.track(family, spoke, 64, solver=solver).energies(label)[-1]
        n_radial, n_angular = grid
        dr = disk.radius / n_radial
        dtheta = 2 * numpy.pi / n_angular
        for b in range(n_angular):
            theta = (b + 0.5) * dtheta
            energy = center_energy
            for a in range(n_radial):
                r = (a + 0.5) * dr
                point = disk.point(r, theta)
                frame = tracking.frame_at(family, point, solver=solver)
                m = frame.nearest_label(energy)
                energy = frame.eigenvalues[m]
                step = default_step(family, point) if h is None else h
                components = _sum_over_states(family, point, frame, m, step)
                flux += (disk.u @ components @ disk.v) * r * dr * dtheta

    sign = 1. if small_loop.orientation == curves.POSITIVE else -1.
    difference = gamma - sign * flux
    residual = abs(complex(lib.wrap_phase(difference.real), difference.imag))
    logging.info('Stokes check on: {}: phase: {}, flux: {}, residual: {}'.format(small_loop.name, gamma, flux,
                                                                               residual))
    return residual

