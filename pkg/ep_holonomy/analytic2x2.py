"""
Closed form machinery for traceless 2 x 2 Hamiltonians [[a, b], [c, -a]], with eigenvalues +-f, f = sqrt(a^2 + bc).

Two patches cover the nondegenerate region:

 - `M1` excludes the points with bc = 0 and f = -a, and uses the frame psi_+ = (f + a, c), psi_- = (-b, f + a);
 - `M2` excludes the points with bc = 0 and f = +a, and uses the M1 frame with the labels swapped and f -> -f.

On the overlap the frames differ by the transition scalars G_{2,1}: psi_+^2 = (-b / (f + a)) psi_+^1 and
psi_-^2 = (c / (f + a)) psi_-^1.

Non traceless inputs are split into (tr H / 2) I plus a traceless part; the trace only shifts the eigenvalues.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy
import scipy.integrate

from ep_holonomy import lib, tracking
from ep_holonomy.exceptions import BranchAmbiguity, InvalidParams, NearEP, PatchSingular
from ep_holonomy.families.NonSymmetric import NonSymmetricA, NonSymmetricB
from ep_holonomy.families.Polynomial import Constant
from ep_holonomy.families.SpinHalf import SpinHalf
from ep_holonomy.families.SquareRoot import BlockSquareRoot, SquareRoot
from ep_holonomy.families.Symmetric import SymmetricA, SymmetricB
from ep_holonomy.families.ThreeParameter import ThreeParameter, ThreeParameterSlice
from ep_holonomy.linalg import Eigenframe
from ep_holonomy.permutations import Permutation

M1 = 'M1'
M2 = 'M2'
PLUS = '+'
MINUS = '-'

# Relative size below which a patch denominator counts as zero
PATCH_TOL = 1e-12

# Closed form holonomies move to the other patch once the current denominator drops below this fraction of the other
SWITCH_RATIO = 0.25

FAMILY_HANDLERS = {
    'SymA': SymmetricA,
    'SymB': SymmetricB,
    'NonSymA': NonSymmetricA,
    'NonSymB': NonSymmetricB,
    'ThreeParam': ThreeParameter,
    'ThreeParamSlice': ThreeParameterSlice,
    'H1': SquareRoot,
    'H2block': BlockSquareRoot,
    'SpinHalf': SpinHalf,
    'Constant': Constant
}


class NotAvailable():
    """
    Marker for families without a closed form geometric phase
    """

    def __repr__(self):
        return 'NotAvailable'

    def __bool__(self):
        return False


NOT_AVAILABLE = NotAvailable()


@dataclass(frozen=True)
class TwoLevelPoint:
    a: complex
    b: complex
    c: complex
    f: complex
    patch: str = M1

    def __post_init__(self):
        if self.patch not in (M1, M2):
            raise ValueError('Unknown patch: {}'.format(self.patch))
        if self.f == 0:
            raise NearEP('f vanishes: ({}, {}, {}) is a degeneracy'.format(self.a, self.b, self.c))
        scale = max(abs(self.a) ** 2, abs(self.b * self.c), abs(self.f) ** 2, 1e-300)
        if abs(self.f ** 2 - (self.a ** 2 + self.b * self.c)) > 1e-10 * scale:
            raise ValueError('f = {} is not a square root of a^2 + bc = {}'.format(self.f,
                                                                                  self.a ** 2 + self.b * self.c))

    @property
    def scale(self):
        return max(abs(self.a), abs(self.b), abs(self.c), abs(self.f))

    def denominator(self, patch=None):
        """
        f + a on M1, a - f on M2
        """
        patch = patch or self.patch
        return self.f + self.a if patch == M1 else self.a - self.f

    def on(self, patch):
        return TwoLevelPoint(a=self.a, b=self.b, c=self.c, f=self.f, patch=patch)

    def best_patch(self):
        return M1 if abs(self.denominator(M1)) >= abs(self.denominator(M2)) else M2


@dataclass(frozen=True, eq=False)
class PatchFrame2x2:
    """
    Right vectors psi_+-, and left vectors phi_+- stored as kets, so that <phi|psi> = vdot(phi, psi)
    """
    psi_plus: numpy.ndarray
    psi_minus: numpy.ndarray
    phi_plus: numpy.ndarray
    phi_minus: numpy.ndarray
    patch: str


@dataclass(frozen=True)
class ClosedFormHolonomy:
    """
    Result of integrating the closed form connection around a loop

    :param geometric: Sum of the segment integrals minus i times the logs of the transition factors
    :param patches: (t_start, t_end, patch) per segment
    """
    geometric: complex
    holonomy_factor: complex
    patches: list
    transitions: list


def traceless_entries(matrix):
    """
    (a, b, c) of the traceless part [[a, b], [c, -a]] of a 2 x 2 matrix
    """
    matrix = numpy.asarray(matrix)
    return complex((matrix[0, 0] - matrix[1, 1]) / 2.), complex(matrix[0, 1]), complex(matrix[1, 0])


def _check_patch(p, patch=None):
    patch = patch or p.patch
    if abs(p.denominator(patch)) <= PATCH_TOL * p.scale:
        raise PatchSingular('Point (a={}, b={}, c={}, f={}) is singular on patch: {}'.format(p.a, p.b, p.c, p.f,
                                                                                         patch))
    return True


def _frame_m1(a, b, c, f):
    denominator = 2 * f * (f + a)
    psi_plus = numpy.array([f + a, c], dtype=complex)
    psi_minus = numpy.array([-b, f + a], dtype=complex)
    phi_plus = numpy.conj(numpy.array([f + a, b], dtype=complex) / denominator)
    phi_minus = numpy.conj(numpy.array([-c, f + a], dtype=complex) / denominator)
    return psi_plus, psi_minus, phi_plus, phi_minus


def frame_closed_form(p):
    """
    Closed form biorthonormal frame of a traceless 2 x 2 Hamiltonian on the point's patch

    :type p: TwoLevelPoint
    :rtype: PatchFrame2x2
    """
    _check_patch(p)
    if p.patch == M1:
        psi_plus, psi_minus, phi_plus, phi_minus = _frame_m1(p.a, p.b, p.c, p.f)
    else:
        # M2 frames are the M1 frames of the opposite branch, evaluated at -f
        psi_minus, psi_plus, phi_minus, phi_plus = _frame_m1(p.a, p.b, p.c, -p.f)
    return PatchFrame2x2(psi_plus=psi_plus, psi_minus=psi_minus, phi_plus=phi_plus, phi_minus=phi_minus,
                         patch=p.patch)


def _check_branch(branch):
    if branch not in (PLUS, MINUS):
        raise ValueError('Branch must be {} or {}, got: {}'.format(PLUS, MINUS, branch))
    return True


def _connection_m1(a, b, c, f, da, db, dc, df, branch):
    if branch == PLUS:
        return 1j / (2 * f) * (b * dc / (f + a) + df + da)
    return 1j / (2 * f) * (c * db / (f + a) + df + da)


def connection_closed_form(p, da, db, dc, df, branch):
    """
    The connection one-form i <phi_+-|d psi_+-> of the closed form frame, evaluated on a tangent increment

    :type p: TwoLevelPoint
    :param da: Increment of a, likewise db, dc; df must satisfy 2 f df = 2 a da + b dc + c db
    :param branch: `PLUS` or `MINUS`
    :rtype: complex
    """
    _check_branch(branch)
    _check_patch(p)
    if p.patch == M1:
        return complex(_connection_m1(p.a, p.b, p.c, p.f, da, db, dc, df, branch))
    other = MINUS if branch == PLUS else PLUS
    return complex(_connection_m1(p.a, p.b, p.c, -p.f, da, db, dc, -df, other))


def transition_closed_form(p, branch):
    """
    Transition scalar G_{2,1} with psi^2 = G_{2,1} psi^1 on the overlap of the two patches. The inverse relation is
    psi^1 = G_{1,2} psi^2 with G_{1,2} = 1 / G_{2,1}.

    :type p: TwoLevelPoint
    :param branch: `PLUS` or `MINUS`
    :rtype: complex
    """
    _check_branch(branch)
    _check_patch(p, M1)
    _check_patch(p, M2)
    if branch == PLUS:
        return complex(-p.b / (p.f + p.a))
    return complex(p.c / (p.f + p.a))


def junction_factor(p, from_patch, to_patch, branch):
    """
    The factor G with psi^from = G psi^to, as used by the segmented holonomy product
    """
    if from_patch == to_patch:
        return 1. + 0j
    transition = transition_closed_form(p, branch)
    return transition if from_patch == M2 else 1. / transition


def _other_root(f_previous, a, b, c):
    root = numpy.sqrt(complex(a * a + b * c))
    return (root, -root) if abs(root - f_previous) <= abs(-root - f_previous) else (-root, root)


def _entries_at(family, point):
    return traceless_entries(family.matrix(point))


def continue_f(family, curve, f_start, n_samples, guard=lib.EP_GUARD, ratio=lib.AMBIGUITY_RATIO,
               max_depth=lib.MAX_BISECTION_DEPTH):
    """
    Continue the square root f of a^2 + bc along a curve, from `f_start`.

    Each step picks the root nearer the previous value; steps where both roots are nearly equally far are bisected.

    :return: f at each sample of `tracking.discretize(curve, n_samples)`
    :rtype: numpy.ndarray
    """
    family._check_two_level()
    samples = tracking.discretize(curve, n_samples)
    a, b, c = _entries_at(family, samples[0][1])
    f_start = complex(f_start)
    if abs(f_start ** 2 - (a * a + b * c)) > 1e-8 * max(abs(a * a + b * c), 1.):
        raise ValueError('f_start: {} is not a square root of a^2 + bc = {}'.format(f_start, a * a + b * c))

    def follow(t0, f0, t1, depth):
        a, b, c = _entries_at(family, curve(t1))
        near, far = _other_root(f0, a, b, c)
        scale = max(abs(a), abs(b), abs(c), 1.)
        if abs(near) < guard * scale:
            raise NearEP('|f| = {} below EP guard at t = {}'.format(abs(near), t1), t=t1)
        if abs(far - f0) >= ratio * abs(near - f0):
            return near
        if depth >= max_depth:
            raise BranchAmbiguity('Could not continue f between t = {} and t = {}'.format(t0, t1))
        t_mid = (t0 + t1) / 2.
        return follow(t_mid, follow(t0, f0, t_mid, depth + 1), t1, depth + 1)

    values = [f_start]
    for (t0, _), (t1, _) in zip(samples[:-1], samples[1:]):
        values.append(complex(follow(t0, values[-1], t1, 0)))
    logging.info('Continued f along curve: {}, f(0) = {}, f(1) = {}'.format(curve.name, values[0], values[-1]))
    return numpy.array(values)


def example_family(name, **params):
    """
    One of the built in families, by name

    :param name: One of `FAMILY_HANDLERS`
    :param params: Family parameters, e.g. `alpha`, `beta` for NonSymB or `gamma` for ThreeParam
    :return: The family
    """
    if name not in FAMILY_HANDLERS:
        raise InvalidParams('Unknown family: {}. Available families: {}'.format(name, list(FAMILY_HANDLERS.keys())))
    try:
        return FAMILY_HANDLERS[name](**params)
    except TypeError as error:
        raise InvalidParams('Invalid parameters: {} for family: {}. {}'.format(params, name, error))


def closed_form_phase(name, params=None, branch=PLUS):
    """
    The known geometric phase of a built in family around its EP, for one counterclockwise loop. The real part is
    wrapped to (-pi, pi].

    :return: The phase, or `NOT_AVAILABLE` for families without a closed form
    """
    _check_branch(branch)
    params = params or dict()
    if name == 'NonSymA':
        return 0j
    if name == 'NonSymB':
        family = example_family(name, **params)
        sign = 1. if branch == PLUS else -1.
        value = -numpy.pi * (1 - sign * family.alpha / family.beta)
        return complex(lib.wrap_phase(value.real), value.imag)
    return NOT_AVAILABLE


def _point(family, point, f, patch):
    a, b, c = _entries_at(family, point)
    return TwoLevelPoint(a=a, b=b, c=c, f=f, patch=patch)


def _eigenframe(p, shift):
    frame = frame_closed_form(p)
    eigenvalues = numpy.array([shift + p.f, shift - p.f])
    right = numpy.column_stack([frame.psi_plus, frame.psi_minus])
    left = numpy.column_stack([frame.phi_plus, frame.phi_minus])
    matrix = numpy.array([[p.a + shift, p.b], [p.c, shift - p.a]])
    residual = float(max(numpy.linalg.norm(matrix @ right - right * eigenvalues, axis=0).max(),
                         numpy.linalg.norm(matrix.conj().T @ left - left * numpy.conj(eigenvalues), axis=0).max()))
    return Eigenframe(eigenvalues=eigenvalues, right=right, left=left, residual=residual, gap=float(2 * abs(p.f)))


def closed_form_path(family, curve, n_samples, patch=None, f_start=None):
    """
    A SpectralPath whose frames are the closed form patch frames along the continued f.

    Label 0 is the branch +f and label 1 the branch -f, with f continued from `f_start` (default: the principal root
    at the start point).

    :param patch: `M1` or `M2` for a single patch, or None to use the patch with the larger denominator per sample
    :rtype: tracking.SpectralPath
    """
    family._check_two_level()
    samples = tracking.discretize(curve, n_samples)
    a, b, c = _entries_at(family, samples[0][1])
    f_start = numpy.sqrt(complex(a * a + b * c)) if f_start is None else complex(f_start)
    values = continue_f(family, curve, f_start, n_samples)

    frames = []
    for (t, point), f in zip(samples, values):
        p = _point(family, point, f, patch or M1)
        if patch is None:
            p = p.on(p.best_patch())
        shift = complex(numpy.trace(family.matrix(point)) / 2.)
        frames.append(_eigenframe(p, shift))

    matchings = [Permutation.identity(2)] * (len(frames) - 1)
    monodromy = None
    if curve.closed:
        swapped = abs(values[-1] + values[0]) < abs(values[-1] - values[0])
        frames[-1] = frames[0]
        matchings[-1] = Permutation([1, 0]) if swapped else Permutation.identity(2)
        monodromy = matchings[-1]

    return tracking.SpectralPath(curve=curve,
                                 times=numpy.array([t for t, _ in samples]),
                                 points=numpy.array([point for _, point in samples]),
                                 frames=tuple(frames),
                                 matchings=tuple(matchings),
                                 closed=curve.closed,
                                 monodromy=monodromy,
                                 refinement_depth=0,
                                 min_gap=float(min(frame.gap for frame in frames)),
                                 n_samples=int(n_samples))


def closed_form_holonomy(family, curve, branch=PLUS, n_samples=512, f_start=None, step=1e-6):
    """
    Integrate the closed form connection around a closed curve, switching patches where a denominator gets small.

    Each patch switch contributes the transition factor G, with psi on the old patch equal to G psi on the new one,
    to the holonomy factor. The curve must return f to its start value, i.e. it must already be lifted.

    :param branch: `PLUS` for the branch continued from f_start, `MINUS` for the other one
    :param n_samples: Grid used to continue f and to place patch switches
    :param step: Relative step for the parameter derivatives of a, b, c
    :rtype: ClosedFormHolonomy
    """
    _check_branch(branch)
    family._check_two_level()
    if not curve.closed:
        raise ValueError('Closed form holonomies need a closed curve, got: {}'.format(curve.name))
    samples = tracking.discretize(curve, n_samples)
    times = numpy.array([t for t, _ in samples])
    a, b, c = _entries_at(family, samples[0][1])
    f_start = numpy.sqrt(complex(a * a + b * c)) if f_start is None else complex(f_start)
    values = continue_f(family, curve, f_start, n_samples)
    if abs(values[-1] - values[0]) > 1e-8 * max(abs(values[0]), 1.):
        raise ValueError('f does not return to its start value along: {}; lift the curve first'.format(curve.name))

    points = [_point(family, point, f, M1) for (_, point), f in zip(samples, values)]

    # Segments of constant patch, switching with hysteresis
    patch = points[0].best_patch()
    boundaries = [(0, patch)]
    for index, p in enumerate(points[1:-1], start=1):
        other = M2 if patch == M1 else M1
        if abs(p.denominator(patch)) < SWITCH_RATIO * abs(p.denominator(other)):
            patch = other
            boundaries.append((index, patch))
    logging.info('Closed form holonomy along: {} uses {} patch segments'.format(curve.name, len(boundaries)))

    def f_at(t):
        index = min(int(numpy.searchsorted(times, t, side='right')) - 1, len(times) - 2)
        weight = (t - times[index]) / (times[index + 1] - times[index])
        guess = (1 - weight) * values[index] + weight * values[index + 1]
        a, b, c = _entries_at(family, curve(t))
        return _other_root(guess, a, b, c)[0]

    def integrand(t, patch):
        a, b, c = _entries_at(family, curve(t))
        forward = _entries_at(family, curve(t + step))
        backward = _entries_at(family, curve(t - step))
        da, db, dc = ((x - y) / (2 * step) for x, y in zip(forward, backward))
        f = f_at(t)
        df = (2 * a * da + b * dc + c * db) / (2 * f)
        return connection_closed_form(TwoLevelPoint(a=a, b=b, c=c, f=f, patch=patch), da, db, dc, df, branch)

    geometric = 0j
    transitions = []
    patches = []
    for position, (start, segment_patch) in enumerate(boundaries):
        stop = boundaries[position + 1][0] if position + 1 < len(boundaries) else len(times) - 1
        t0, t1 = times[start], times[stop]
        real, _ = scipy.integrate.quad(lambda t: integrand(t, segment_patch).real, t0, t1, limit=200,
                                       epsabs=1e-12, epsrel=1e-12)
        imag, _ = scipy.integrate.quad(lambda t: integrand(t, segment_patch).imag, t0, t1, limit=200,
                                       epsabs=1e-12, epsrel=1e-12)
        geometric += complex(real, imag)
        patches.append((float(t0), float(t1), segment_patch))

        next_patch = boundaries[(position + 1) % len(boundaries)][1]
        junction = points[stop] if position + 1 < len(boundaries) else points[0]
        if next_patch != segment_patch:
            factor = junction_factor(junction, segment_patch, next_patch, branch)
            transitions.append(factor)
            geometric += -1j * numpy.log(factor)

    return ClosedFormHolonomy(geometric=complex(geometric), holonomy_factor=complex(numpy.exp(1j * geometric)),
                              patches=patches, transitions=transitions)
