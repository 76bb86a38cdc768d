"""
Continuation of eigenvalue branches along discretized curves, monodromy permutations, and covering lifts of loops
"""
from __future__ import annotations

import functools
import itertools
import logging
from dataclasses import dataclass
from typing import Optional

import numpy
from scipy.optimize import linear_sum_assignment

from ep_holonomy import lib, linalg
from ep_holonomy.curves import CurveSpec
from ep_holonomy.exceptions import AmbiguousMatching, DegenerateInput, InvalidCurve, InvalidSampling, NearEP, \
    OpenCurve
from ep_holonomy.permutations import Permutation, elements, generate_group, orbits

# Largest N for which matchings are found by brute force over all N! assignments
EXHAUSTIVE_LIMIT = 5


@dataclass(frozen=True, eq=False)
class SpectralPath:
    """
    Eigenframes sampled along a curve, plus the label matching between neighbouring samples.

    `matchings[k]` maps labels at sample k to labels at sample k + 1. For closed curves the last sample reuses the
    first sample's point and frame, so `monodromy` maps start labels to the labels the branches end on.
    """
    curve: CurveSpec
    times: numpy.ndarray
    points: numpy.ndarray
    frames: tuple
    matchings: tuple
    closed: bool
    monodromy: Optional[Permutation]
    refinement_depth: int
    min_gap: float
    n_samples: int

    @property
    def samples(self):
        return list(zip(self.times, self.points, self.frames))

    @property
    def dim(self):
        return self.frames[0].dim

    @property
    def duration(self):
        return self.curve.period

    @property
    def uniform(self):
        return self.refinement_depth == 0

    def branch(self, label):
        """
        Labels occupied by the branch that starts on `label`, one per sample

        :rtype: [int]
        """
        labels = [int(label)]
        for matching in self.matchings:
            labels.append(matching(labels[-1]))
        return labels

    def energies(self, label):
        return numpy.array([frame.eigenvalues[j] for frame, j in zip(self.frames, self.branch(label))])

    def label_for(self, energy):
        return self.frames[0].nearest_label(energy)

    def segment(self, start, stop):
        """
        The open piece of this path between sample indices `start` and `stop`, both included
        """
        if not 0 <= start < stop < len(self.frames):
            raise ValueError('Invalid segment bounds: {}, {} for {} samples'.format(start, stop, len(self.frames)))
        return SpectralPath(curve=self.curve,
                            times=self.times[start:stop + 1],
                            points=self.points[start:stop + 1],
                            frames=self.frames[start:stop + 1],
                            matchings=self.matchings[start:stop],
                            closed=False,
                            monodromy=None,
                            refinement_depth=self.refinement_depth,
                            min_gap=min(frame.gap for frame in self.frames[start:stop + 1]),
                            n_samples=stop - start)


@dataclass(frozen=True)
class Monodromy:
    sigma: Permutation
    cycle_structure: list
    periods: list

    @property
    def order(self):
        return self.sigma.order

    def notation(self):
        return self.sigma.notation()


@dataclass(frozen=True)
class MonodromyGroup:
    """
    Permutation group generated by the monodromies of a set of based loops. `orbits` lists the labels mixed by the
    group, i.e. the connected sheets of the spectrum over the loops.
    """
    elements: frozenset
    order: int
    generators: list
    orbits: list


def discretize(curve, n_samples):
    """
    Uniform samples t_k = k / n, k = 0..n, of a curve

    :param curve: The curve to sample
    :type curve: CurveSpec
    :param n_samples: Number of steps n, >= 8
    :type n_samples: int
    :return: (t_k, point_k) pairs, n + 1 of them. For closed curves the last point is a copy of the first
    :rtype: [(float, numpy.ndarray)]
    """
    if int(n_samples) != n_samples or n_samples < lib.MIN_SAMPLES:
        raise InvalidSampling('At least {} samples are required, got: {}'.format(lib.MIN_SAMPLES, n_samples))
    n_samples = int(n_samples)

    times = numpy.linspace(0., 1., n_samples + 1)
    points = [curve(t) for t in times]
    if curve.closed:
        points[-1] = points[0].copy()
    return list(zip(times, points))


def frame_at(family, point, t=None, solver=None, guard=lib.EP_GUARD):
    """
    Eigenframe of the family at one point, refusing points within the EP guard

    :param t: Curve parameter of the point, reported by `NearEP`
    :rtype: linalg.Eigenframe
    """
    solver = solver or linalg.eig_general
    matrix = family.matrix(point)
    norm = lib.matrix_norm(matrix)
    try:
        frame = solver(matrix)
    except DegenerateInput as error:
        raise NearEP('Degenerate spectrum at t = {}, point: {}. {}'.format(t, point, error), t=t)
    if frame.gap < guard * norm:
        raise NearEP('Spectral gap: {} below EP guard at t = {}, point: {}'.format(frame.gap, t, point), t=t)
    return frame


def _assignment(cost):
    """
    Minimal total cost assignment, plus the cost of the second best assignment

    :return: (images, best cost, second best cost)
    """
    size = cost.shape[0]
    if size == 1:
        return (0, ), float(cost[0, 0]), numpy.inf

    if size <= EXHAUSTIVE_LIMIT:
        rows = numpy.arange(size)
        candidates = sorted((float(cost[rows, list(images)].sum()), images)
                            for images in itertools.permutations(range(size)))
        return candidates[0][1], candidates[0][0], candidates[1][0]

    rows, images = linear_sum_assignment(cost)
    best = float(cost[rows, images].sum())

    # Second best: the best assignment that avoids at least one edge of the optimum
    forbidden_cost = float(cost.max()) * 1e6 + 1.
    second = numpy.inf
    for row, column in zip(rows, images):
        restricted = cost.copy()
        restricted[row, column] = forbidden_cost
        restricted_rows, restricted_images = linear_sum_assignment(restricted)
        second = min(second, float(restricted[restricted_rows, restricted_images].sum()))
    return tuple(images), best, second


def track(family, curve, n_samples, solver=None, guard=lib.EP_GUARD, ratio=lib.AMBIGUITY_RATIO,
          max_depth=lib.MAX_BISECTION_DEPTH):
    """
    Follow the eigenvalue branches of `family` along `curve`.

    Neighbouring frames are matched by the assignment with minimal total eigenvalue displacement. A step is bisected
    when the second best assignment costs less than `ratio` times the best one, or when some branch moves by half the
    spectral gap or more.

    :param family: The matrix family
    :param curve: The curve
    :type curve: CurveSpec
    :param n_samples: Number of uniform steps, >= 8, before refinement
    :param solver: Eigenframe solver, defaults to `linalg.eig_general`
    :param guard: Relative spectral gap below which a sample counts as an EP
    :param ratio: Ambiguity ratio between the best and second best assignment
    :param max_depth: Maximum bisection depth for a single step
    :return: The tracked path
    :rtype: SpectralPath
    """
    solver = solver or linalg.eig_general
    samples = discretize(curve, n_samples)
    logging.info('Tracking family: {} along curve: {} with {} samples'.format(family.name, curve.name, n_samples))

    def sample_frame(t, point):
        return frame_at(family, point, t, solver, guard)

    def refine(t0, frame0, t1, point1, frame1, depth):
        cost = numpy.abs(frame0.eigenvalues[:, numpy.newaxis] - frame1.eigenvalues[numpy.newaxis, :])
        images, best, second = _assignment(cost)
        displacement = float(cost[numpy.arange(len(images)), list(images)].max())
        if second >= ratio * best and displacement < frame0.gap / 2.:
            return [(t1, point1, frame1)], [Permutation(images)], depth

        if depth >= max_depth:
            raise AmbiguousMatching('Could not match eigenvalues between t = {} and t = {} after {} bisections'.format(
                t0, t1, depth))
        t_mid = (t0 + t1) / 2.
        point_mid = curve(t_mid)
        frame_mid = sample_frame(t_mid, point_mid)
        logging.debug('Bisecting step [{}, {}] at depth: {}'.format(t0, t1, depth + 1))
        first_samples, first_matchings, first_depth = refine(t0, frame0, t_mid, point_mid, frame_mid, depth + 1)
        second_samples, second_matchings, second_depth = refine(t_mid, frame_mid, t1, point1, frame1, depth + 1)
        return first_samples + second_samples, first_matchings + second_matchings, max(first_depth, second_depth)

    start_t, start_point = samples[0]
    start_frame = sample_frame(start_t, start_point)
    times = [start_t]
    points = [start_point]
    frames = [start_frame]
    matchings = []
    depth = 0

    for index, (t, point) in enumerate(samples[1:]):
        last = index == len(samples) - 2
        frame = start_frame if (last and curve.closed) else sample_frame(t, point)
        step_samples, step_matchings, step_depth = refine(times[-1], frames[-1], t, point, frame, 0)
        for sample_t, sample_point, step_frame in step_samples:
            times.append(sample_t)
            points.append(sample_point)
            frames.append(step_frame)
        matchings.extend(step_matchings)
        depth = max(depth, step_depth)

    monodromy = None
    if curve.closed:
        monodromy = functools.reduce(lambda x, y: x * y, matchings, Permutation.identity(start_frame.dim))
        logging.info('Monodromy of curve: {}: {}'.format(curve.name, monodromy.notation()))

    min_gap = float(min(frame.gap for frame in frames))
    norm = max(lib.matrix_norm(family.matrix(point)) for point in (points[0], points[len(points) // 2]))
    if min_gap < lib.EP_WARNING * max(norm, 1.):
        logging.warning('Curve: {} passes close to a degeneracy, minimum spectral gap: {}'.format(curve.name,
                                                                                                min_gap))
    if depth > 0:
        logging.info('Refined {} samples to {}, bisection depth: {}'.format(n_samples, len(times) - 1, depth))

    return SpectralPath(curve=curve,
                        times=numpy.array(times),
                        points=numpy.array(points),
                        frames=tuple(frames),
                        matchings=tuple(matchings),
                        closed=curve.closed,
                        monodromy=monodromy,
                        refinement_depth=depth,
                        min_gap=min_gap,
                        n_samples=int(n_samples))


def monodromy_of(path):
    """
    Monodromy permutation of a tracked closed curve, with its cycles and per-label periods

    :type path: SpectralPath
    :rtype: Monodromy
    """
    if not path.closed or path.monodromy is None:
        raise OpenCurve('Monodromy is only defined for closed curves, got: {}'.format(path.curve.name))
    sigma = path.monodromy
    return Monodromy(sigma=sigma, cycle_structure=sigma.cycles(), periods=sigma.periods())


def lift_closed(curve, label, monodromy):
    """
    The covering lift of `curve` for `label`: the curve traversed as many times as the label's period

    :type curve: CurveSpec
    :type label: int
    :type monodromy: Monodromy
    :rtype: CurveSpec
    """
    if not curve.closed:
        raise OpenCurve('Only closed curves can be lifted: {}'.format(curve.name))
    lib.check_labels_are_valid([label], len(monodromy.periods))
    traversals = monodromy.periods[label]
    logging.info('Lifting curve: {} for label: {}, traversals: {}'.format(curve.name, label, traversals))
    return curve.repeated(traversals)


def monodromy_group(family, loops, n_samples=256, solver=None, paths=None):
    """
    Group generated by the monodromies of loops sharing a base point

    :param family: The matrix family
    :param loops: Closed curves, all starting at the same point
    :type loops: [CurveSpec]
    :param n_samples: Samples per loop
    :param paths: Already tracked paths of `loops`, in the same order; tracked here when not given
    :type paths: [SpectralPath]
    :rtype: MonodromyGroup
    """
    loops = list(loops)
    for loop in loops:
        if not loop.closed:
            raise OpenCurve('Monodromy group generators must be closed loops, got: {}'.format(loop.name))
    if len(loops) > 0:
        base = loops[0](0.)
        for loop in loops[1:]:
            if not numpy.allclose(loop(0.), base, rtol=0, atol=1e-12):
                raise InvalidCurve('Loop: {} starts at {}, not at the base point: {}'.format(loop.name, loop(0.),
                                                                                          base))

    if paths is None:
        paths = [track(family, loop, n_samples, solver=solver) for loop in loops]
    elif len(paths) != len(loops):
        raise InvalidCurve('Got {} tracked paths for {} loops'.format(len(paths), len(loops)))

    generators = [monodromy_of(path).sigma for path in paths]
    group = generate_group(generators, family.dim)
    return MonodromyGroup(elements=frozenset(elements(group)), order=int(group.order()), generators=generators,
                          orbits=orbits(group))
