"""
Parameterized curves in parameter space.

A curve maps t in [0, 1] to a real parameter point. Families of one complex parameter z use the two real coordinates
(Re z, Im z).
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, replace
from typing import Callable, Optional

import numpy
from numpy.polynomial import polynomial

from ep_holonomy import lib
from ep_holonomy.exceptions import InvalidCurve

POSITIVE = 'Positive'
NEGATIVE = 'Negative'


@dataclass(frozen=True, eq=False)
class Disk:
    """
    Flat disk bounded by a circular loop: center + r cos(theta) u + r sin(theta) v, for r <= radius
    """
    center: numpy.ndarray
    radius: float
    u: numpy.ndarray
    v: numpy.ndarray

    def point(self, r, theta):
        return self.center + r * numpy.cos(theta) * self.u + r * numpy.sin(theta) * self.v

    def distance_to(self, point):
        """
        Euclidean distance from `point` to the closed disk
        """
        offset = lib.as_point(point) - self.center
        in_plane = numpy.hypot(numpy.dot(offset, self.u), numpy.dot(offset, self.v))
        normal = numpy.linalg.norm(offset - numpy.dot(offset, self.u) * self.u - numpy.dot(offset, self.v) * self.v)
        return float(numpy.hypot(max(in_plane - self.radius, 0.), normal))


@dataclass(frozen=True, eq=False)
class CurveSpec:
    """
    A parameterized curve C: [0, 1] -> parameter space.

    `base_period` is the physical duration of one traversal of the whole parameter range, and `traversals` counts how
    many times the underlying base loop is covered (greater than 1 for lifted curves).
    """
    dim_params: int
    map: Callable
    closed: bool = True
    orientation: str = POSITIVE
    base_period: float = 1.
    traversals: int = 1
    disk: Optional[Disk] = None
    name: str = 'curve'

    def __post_init__(self):
        if self.dim_params < 1:
            raise InvalidCurve('Curves need at least one parameter dimension, got: {}'.format(self.dim_params))
        if not self.base_period > 0:
            raise InvalidCurve('Curve period must be positive, got: {}'.format(self.base_period))
        if self.orientation not in (POSITIVE, NEGATIVE):
            raise InvalidCurve('Unknown orientation: {}'.format(self.orientation))

        start = self(0.)
        end = self(1.)
        if len(start) != self.dim_params:
            raise InvalidCurve('Curve: {} maps into {} dimensions, expected: {}'.format(self.name, len(start),
                                                                                    self.dim_params))
        if self.closed and not numpy.array_equal(start, end):
            raise InvalidCurve('Closed curve: {} does not return to its start point: {} vs {}'.format(self.name,
                                                                                                    start, end))

    def __call__(self, t):
        return lib.as_point(self.map(t))

    @property
    def period(self):
        return self.base_period

    def repeated(self, k):
        """
        The same loop traversed k times in a row, over a period k times as long
        """
        if not self.closed:
            raise InvalidCurve('Only closed curves can be traversed repeatedly: {}'.format(self.name))
        k = int(k)
        if k < 1:
            raise ValueError('Traversal count must be >= 1, got: {}'.format(k))
        if k == 1:
            return self
        base_map = self.map
        return replace(self, map=lambda t: base_map((k * t) % 1.), base_period=self.base_period * k,
                       traversals=self.traversals * k, name='{}x{}'.format(k, self.name))

    def reversed(self):
        base_map = self.map
        orientation = NEGATIVE if self.orientation == POSITIVE else POSITIVE
        return replace(self, map=lambda t: base_map(1. - t), orientation=orientation,
                       name='-{}'.format(self.name))

    def shifted(self, s):
        """
        The same closed loop, started at parameter s of the original
        """
        if not self.closed:
            raise InvalidCurve('Only closed curves can be cyclically shifted: {}'.format(self.name))
        base_map = self.map
        s = float(s) % 1.

        def shifted_map(t):
            if t >= 1.:
                return base_map(s)
            return base_map((t + s) % 1.)

        return replace(self, map=shifted_map, name='{}@{}'.format(self.name, s))


def circle(center, radius, axes=None, orientation=POSITIVE, period=1., start_angle=0., name='circle'):
    """
    A circle in the plane spanned by `axes` (two orthonormal vectors; default the first two coordinate axes)

    :param center: Center point, length d
    :param radius: Radius, >= 0
    :param axes: Pair of orthonormal in-plane axes (u, v); positive orientation runs from u towards v
    :param orientation: `POSITIVE` or `NEGATIVE`
    :param period: Physical duration of one traversal
    :param start_angle: Angle of the start point, in radians
    :rtype: CurveSpec
    """
    return ellipse(center, (radius, radius), axes=axes, orientation=orientation, period=period,
                   start_angle=start_angle, name=name)


def ellipse(center, radii, axes=None, orientation=POSITIVE, period=1., start_angle=0., name='ellipse'):
    center = lib.as_point(center)
    u, v = _plane_axes(len(center), axes)
    radius_u, radius_v = float(radii[0]), float(radii[1])
    if radius_u < 0 or radius_v < 0:
        raise InvalidCurve('Radii must be non negative, got: {}'.format(radii))
    sign = 1. if orientation == POSITIVE else -1.

    def ellipse_map(t):
        theta = start_angle + sign * 2 * numpy.pi * (t % 1.)
        return center + radius_u * numpy.cos(theta) * u + radius_v * numpy.sin(theta) * v

    disk = Disk(center=center, radius=radius_u, u=u, v=v) if radius_u == radius_v else None
    return CurveSpec(dim_params=len(center), map=ellipse_map, closed=True, orientation=orientation,
                     base_period=period, disk=disk, name=name)


def perturbed_circle(center, radius, coefficients, axes=None, orientation=POSITIVE, period=1.,
                     name='perturbed_circle'):
    """
    A smooth star-shaped loop r(theta) = radius * (1 + sum_m a_m cos(m theta + phase_m))

    :param coefficients: (m, a_m, phase_m) triples, with m >= 1 integer
    """
    center = lib.as_point(center)
    u, v = _plane_axes(len(center), axes)
    sign = 1. if orientation == POSITIVE else -1.
    coefficients = [(int(m), float(a), float(phase)) for m, a, phase in coefficients]
    if sum(abs(a) for _, a, _ in coefficients) >= 1:
        raise InvalidCurve('Perturbation amplitudes must sum below 1, got: {}'.format(coefficients))

    def perturbed_map(t):
        theta = sign * 2 * numpy.pi * (t % 1.)
        r = radius * (1. + sum(a * numpy.cos(m * theta + phase) for m, a, phase in coefficients))
        return center + r * numpy.cos(theta) * u + r * numpy.sin(theta) * v

    return CurveSpec(dim_params=len(center), map=perturbed_map, closed=True, orientation=orientation,
                     base_period=period, name=name)


def polyline(points, closed=False, period=1., name='polyline'):
    """
    Piecewise linear curve through `points`, parameterized by arc length. Closed polylines return to the first point
    """
    points = numpy.array(points, dtype=float)
    if points.ndim != 2 or len(points) < 2:
        raise InvalidCurve('A polyline needs at least two points of equal dimension, got shape: {}'.format(
            points.shape))
    if closed and not numpy.array_equal(points[0], points[-1]):
        points = numpy.vstack([points, points[:1]])

    lengths = numpy.concatenate([[0.], numpy.cumsum(numpy.linalg.norm(numpy.diff(points, axis=0), axis=1))])
    if lengths[-1] == 0:
        lengths = numpy.linspace(0., 1., len(points))
    total = lengths[-1]

    def polyline_map(t):
        s = min(max(t, 0.), 1.) * total
        return numpy.array([numpy.interp(s, lengths, points[:, i]) for i in range(points.shape[1])])

    return CurveSpec(dim_params=points.shape[1], map=polyline_map, closed=closed, base_period=period, name=name)


def parametric_polynomial(coefficients, closed=None, period=1., name='parametric_polynomial'):
    """
    Curve whose coordinates are polynomials in t

    :param coefficients: One coefficient list per coordinate, lowest degree first
    :param closed: Whether the curve is closed; inferred from p(0) == p(1) when None
    """
    coefficients = [numpy.array(c, dtype=float) for c in coefficients]
    for c in coefficients:
        if len(c) - 1 > lib.MAX_POLYNOMIAL_DEGREE:
            raise InvalidCurve('Polynomial degree: {} exceeds: {}'.format(len(c) - 1, lib.MAX_POLYNOMIAL_DEGREE))

    def polynomial_map(t):
        return numpy.array([polynomial.polyval(t, c) for c in coefficients])

    if closed is None:
        closed = bool(numpy.array_equal(polynomial_map(0.), polynomial_map(1.)))
    return CurveSpec(dim_params=len(coefficients), map=polynomial_map, closed=closed, base_period=period, name=name)


def concatenate(first, second, name=None):
    """
    The combined loop that traverses `first`, then `second`. Both must be closed and share their base point.

    Time is split in proportion to the two periods.
    """
    if not (first.closed and second.closed):
        raise InvalidCurve('Only closed curves can be concatenated: {}, {}'.format(first.name, second.name))
    base = first(0.)
    if first.dim_params != second.dim_params or not numpy.allclose(base, second(0.), rtol=0, atol=1e-12):
        raise InvalidCurve('Curves: {} and {} do not share a base point: {} vs {}'.format(first.name, second.name,
                                                                                        base, second(0.)))
    split = first.base_period / (first.base_period + second.base_period)
    first_map = first.map
    second_map = second.map

    def concatenated_map(t):
        if t >= 1.:
            return first_map(0.)
        if t < split:
            return first_map(t / split)
        return second_map((t - split) / (1. - split))

    name = name or '{}+{}'.format(first.name, second.name)
    logging.debug('Concatenated curves: {}, split at t = {}'.format(name, split))
    return CurveSpec(dim_params=first.dim_params, map=concatenated_map, closed=True,
                     base_period=first.base_period + second.base_period, name=name)


def _plane_axes(dim, axes):
    if axes is None:
        if dim < 2:
            raise InvalidCurve('Planar curves need at least two parameter dimensions, got: {}'.format(dim))
        u = numpy.zeros(dim)
        v = numpy.zeros(dim)
        u[0] = 1.
        v[1] = 1.
        return u, v

    u, v = (lib.as_point(axis) for axis in axes)
    if len(u) != dim or len(v) != dim:
        raise InvalidCurve('Axes must have dimension: {}'.format(dim))
    if not numpy.isclose(numpy.dot(u, v), 0., atol=1e-12) or not numpy.allclose(
            [numpy.linalg.norm(u), numpy.linalg.norm(v)], 1., atol=1e-12):
        raise InvalidCurve('Axes must be orthonormal, got: {}, {}'.format(u, v))
    return u, v
