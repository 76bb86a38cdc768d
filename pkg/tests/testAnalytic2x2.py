import numpy
from sklearn.utils import check_random_state

from ep_holonomy import analytic2x2, curves, phase, tracking
from ep_holonomy.analytic2x2 import M1, M2, MINUS, PLUS, TwoLevelPoint
from ep_holonomy.exceptions import NearEP, PatchSingular
from ep_holonomy.families.NonSymmetric import NonSymmetricA, NonSymmetricB
from ep_holonomy.families.SpinHalf import SpinHalf
from ep_holonomy.families.SquareRoot import BlockSquareRoot
from ep_holonomy.families.Symmetric import SymmetricA, SymmetricB
from ep_holonomy.families.ThreeParameter import ThreeParameter
from tests.testbase import TestBase


def nearest_root(a, b, c, guess):
    root = numpy.sqrt(complex(a * a + b * c))
    return root if abs(root - guess) <= abs(-root - guess) else -root


def random_complex(random_state, size=None):
    return random_state.normal(size=size) + 1j * random_state.normal(size=size)


class TestAnalytic2x2(TestBase):

    def test_two_level_point(self):
        p = TwoLevelPoint(a=1., b=2., c=4., f=3.)
        self.assertEqual(M1, p.patch)
        self.assertEqual(4., p.denominator())
        self.assertEqual(-2., p.denominator(M2))
        self.assertEqual(M1, p.best_patch())
        self.assertEqual(M2, p.on(M2).patch)
        self.assertEqual(M2, TwoLevelPoint(a=1., b=2., c=4., f=-3.).best_patch())

        self.assertRaises(NearEP, TwoLevelPoint, a=0., b=1., c=0., f=0.)
        self.assertRaises(ValueError, TwoLevelPoint, a=1., b=2., c=4., f=2.)
        self.assertRaises(ValueError, TwoLevelPoint, a=1., b=2., c=4., f=3., patch='M3')

    def test_frame_closed_form(self):
        random_state = check_random_state(0)
        for _ in range(10):
            a, b, c = random_complex(random_state, 3)
            f = numpy.sqrt(a * a + b * c)
            matrix = numpy.array([[a, b], [c, -a]])
            for patch in [M1, M2]:
                frame = analytic2x2.frame_closed_form(TwoLevelPoint(a=a, b=b, c=c, f=f, patch=patch))
                self.assertEqual(patch, frame.patch)
                numpy.testing.assert_allclose(matrix @ frame.psi_plus, f * frame.psi_plus, atol=1e-10)
                numpy.testing.assert_allclose(matrix @ frame.psi_minus, -f * frame.psi_minus, atol=1e-10)
                numpy.testing.assert_allclose(matrix.conj().T @ frame.phi_plus, numpy.conj(f) * frame.phi_plus,
                                              atol=1e-10)
                self.assertAlmostEqual(1., numpy.vdot(frame.phi_plus, frame.psi_plus), delta=1e-10)
                self.assertAlmostEqual(1., numpy.vdot(frame.phi_minus, frame.psi_minus), delta=1e-10)
                self.assertAlmostEqual(0., numpy.vdot(frame.phi_plus, frame.psi_minus), delta=1e-10)
                self.assertAlmostEqual(0., numpy.vdot(frame.phi_minus, frame.psi_plus), delta=1e-10)

        # bc = 0 with f = -a is outside M1, and f = +a is outside M2
        singular = TwoLevelPoint(a=1., b=0., c=0., f=-1.)
        self.assertRaises(PatchSingular, analytic2x2.frame_closed_form, singular)
        analytic2x2.frame_closed_form(singular.on(M2))
        self.assertRaises(PatchSingular, analytic2x2.frame_closed_form, TwoLevelPoint(a=1., b=0., c=0., f=1.,
                                                                                     patch=M2))

    def test_transition(self):
        random_state = check_random_state(1)
        for _ in range(10):
            a, b, c = random_complex(random_state, 3)
            p = TwoLevelPoint(a=a, b=b, c=c, f=numpy.sqrt(a * a + b * c))
            first = analytic2x2.frame_closed_form(p)
            second = analytic2x2.frame_closed_form(p.on(M2))
            plus = analytic2x2.transition_closed_form(p, PLUS)
            minus = analytic2x2.transition_closed_form(p, MINUS)
            numpy.testing.assert_allclose(second.psi_plus, plus * first.psi_plus, atol=1e-10)
            numpy.testing.assert_allclose(second.psi_minus, minus * first.psi_minus, atol=1e-10)

            self.assertAlmostEqual(1. / plus, analytic2x2.junction_factor(p, M1, M2, PLUS), delta=1e-10)
            self.assertAlmostEqual(plus, analytic2x2.junction_factor(p, M2, M1, PLUS), delta=1e-10)
            self.assertEqual(1., analytic2x2.junction_factor(p, M2, M2, MINUS))

        self.assertRaises(PatchSingular, analytic2x2.transition_closed_form, TwoLevelPoint(a=1., b=0., c=0., f=1.),
                          PLUS)
        self.assertRaises(ValueError, analytic2x2.transition_closed_form, TwoLevelPoint(a=1., b=2., c=4., f=3.), 'x')

    def test_connection_closed_form(self):
        random_state = check_random_state(2)
        h = 1e-5
        for _ in range(5):
            a, b, c = random_complex(random_state, 3)
            da, db, dc = random_complex(random_state, 3)
            f = numpy.sqrt(a * a + b * c)
            df = (2 * a * da + b * dc + c * db) / (2 * f)

            def at(s, patch):
                shifted = (a + s * da, b + s * db, c + s * dc)
                root = nearest_root(*shifted, guess=f + s * df)
                return analytic2x2.frame_closed_form(TwoLevelPoint(*shifted, f=root, patch=patch))

            for patch in [M1, M2]:
                p = TwoLevelPoint(a=a, b=b, c=c, f=f, patch=patch)
                here, forward, backward = at(0., patch), at(h, patch), at(-h, patch)
                numeric_plus = 1j * numpy.vdot(here.phi_plus, (forward.psi_plus - backward.psi_plus) / (2 * h))
                numeric_minus = 1j * numpy.vdot(here.phi_minus, (forward.psi_minus - backward.psi_minus) / (2 * h))
                self.assertAlmostEqual(numeric_plus, analytic2x2.connection_closed_form(p, da, db, dc, df, PLUS),
                                       delta=1e-6)
                self.assertAlmostEqual(numeric_minus, analytic2x2.connection_closed_form(p, da, db, dc, df, MINUS),
                                       delta=1e-6)

    def test_second_patch_connection(self):
        # On M2 the connection of one branch is the M1 connection of the other, at -f
        random_state = check_random_state(3)
        for _ in range(10):
            a, b, c, da, db, dc = random_complex(random_state, 6)
            f = numpy.sqrt(a * a + b * c)
            df = (2 * a * da + b * dc + c * db) / (2 * f)
            second = TwoLevelPoint(a=a, b=b, c=c, f=f, patch=M2)
            flipped = TwoLevelPoint(a=a, b=b, c=c, f=-f, patch=M1)
            for branch, other in [(PLUS, MINUS), (MINUS, PLUS)]:
                self.assertEqual(analytic2x2.connection_closed_form(second, da, db, dc, df, branch),
                                 analytic2x2.connection_closed_form(flipped, da, db, dc, -df, other))

    def test_patch_compatibility(self):
        # A^2 - A^1 = i d ln G_{2,1}, with G_{2,1} differentiated along the same increment
        random_state = check_random_state(4)
        h = 1e-5
        for _ in range(10):
            a, b, c, da, db, dc = random_complex(random_state, 6)
            f = numpy.sqrt(a * a + b * c)
            df = (2 * a * da + b * dc + c * db) / (2 * f)

            def at(s):
                shifted = (a + s * da, b + s * db, c + s * dc)
                return TwoLevelPoint(*shifted, f=nearest_root(*shifted, guess=f + s * df))

            p = at(0.)
            for branch in [PLUS, MINUS]:
                transition = analytic2x2.transition_closed_form(p, branch)
                d_transition = (analytic2x2.transition_closed_form(at(h), branch)
                                - analytic2x2.transition_closed_form(at(-h), branch)) / (2 * h)
                difference = (analytic2x2.connection_closed_form(p.on(M2), da, db, dc, df, branch)
                              - analytic2x2.connection_closed_form(p, da, db, dc, df, branch))
                self.assertAlmostEqual(1j * d_transition / transition, difference,
                                       delta=1e-6 * max(1., abs(difference)))

    def test_connection_curvature(self):
        # The exterior derivative of the closed form connection matches the sum over states curvature
        h = 1e-4
        cases = [(SpinHalf(), [.3, -.4, .8]),
                 (SpinHalf(), [-.5, .2, .4]),
                 (ThreeParameter(1.), [.9, .2, .3]),
                 (ThreeParameter(1.), [.1, -.2, .6])]
        for family, point in cases:
            point = numpy.array(point)
            a, b, c = analytic2x2.traceless_entries(family.matrix(point))
            f = numpy.sqrt(a * a + b * c)
            label = tracking.frame_at(family, point).nearest_label(f)
            summed = phase.curvature(family, point, label).components

            def connection(q, axis):
                step = h * numpy.eye(3)[axis]
                a, b, c = analytic2x2.traceless_entries(family.matrix(q))
                forward = analytic2x2.traceless_entries(family.matrix(q + step))
                backward = analytic2x2.traceless_entries(family.matrix(q - step))
                da, db, dc = [(x - y) / (2 * h) for x, y in zip(forward, backward)]
                root = nearest_root(a, b, c, f)
                df = (2 * a * da + b * dc + c * db) / (2 * root)
                return analytic2x2.connection_closed_form(TwoLevelPoint(a=a, b=b, c=c, f=root), da, db, dc, df, PLUS)

            for i in range(3):
                for j in range(3):
                    if i == j:
                        continue
                    step_i, step_j = h * numpy.eye(3)[i], h * numpy.eye(3)[j]
                    exterior = ((connection(point + step_i, j) - connection(point - step_i, j))
                                - (connection(point + step_j, i) - connection(point - step_j, i))) / (2 * h)
                    self.assertAlmostEqual(summed[i, j], exterior, delta=1e-6)

    def test_named_connections(self):
        random_state = check_random_state(5)
        for alpha, beta in [(1, 2), (1 + 1j, 2), (3, 1 + 2j)]:
            family = NonSymmetricB(alpha, beta)
            for _ in range(5):
                z, dz = random_complex(random_state, 2)
                a, b, c = analytic2x2.traceless_entries(family.matrix_at(z))
                da, db, dc = alpha * dz, 0., 2 * (beta ** 2 - alpha ** 2) * z * dz
                p = TwoLevelPoint(a=a, b=b, c=c, f=beta * z)
                expected = 1j * dz / z * (3 * beta - alpha) / (2 * beta)
                self.assertAlmostEqual(expected, analytic2x2.connection_closed_form(p, da, db, dc, beta * dz, PLUS),
                                       delta=1e-10 * abs(expected))

        # NonSymA: pure gauge i dz / z for both branches on M1, and zero for the upper branch in the tracked gauge
        family = NonSymmetricA()
        h = 1e-6
        for _ in range(5):
            z, dz = random_complex(random_state, 2)
            p = TwoLevelPoint(a=z, b=1., c=0., f=z)
            for branch in [PLUS, MINUS]:
                self.assertAlmostEqual(1j * dz / z, analytic2x2.connection_closed_form(p, dz, 0., 0., dz, branch),
                                       delta=1e-10 * abs(dz / z))

            point = family.to_point(z)
            step = h * family.to_point(dz / abs(dz))
            here = tracking.frame_at(family, point)
            upper = here.nearest_label(z)
            forward = tracking.frame_at(family, point + step)
            backward = tracking.frame_at(family, point - step)
            derivative = (forward.right[:, forward.nearest_label(z)] - backward.right[:, backward.nearest_label(z)])
            self.assertLess(abs(1j * numpy.vdot(here.left[:, upper], derivative) / (2 * h)), 1e-8)

    def test_continue_f(self):
        family = SymmetricA()
        loop = curves.circle([0, 0], 1.)
        values = analytic2x2.continue_f(family, loop, 2., 128)
        self.assertEqual(129, len(values))
        self.assertEqual(2., values[0])
        self.assertLess(abs(values[-1] + 2.), 1e-8)
        # f = 2 sqrt(z), continued: at z = -1 it is 2i
        self.assertLess(abs(values[64] - 2j), 1e-8)

        values = analytic2x2.continue_f(family, loop.repeated(2), 2., 256)
        self.assertLess(abs(values[-1] - 2.), 1e-8)

        self.assertRaises(ValueError, analytic2x2.continue_f, family, loop, 1., 128)
        self.assertRaises(NearEP, analytic2x2.continue_f, family, curves.circle([1, 0], 1., start_angle=numpy.pi / 2),
                          numpy.sqrt(4 * (1 + 1j)), 128)

    def test_closed_form_phase(self):
        self.assertEqual(0j, analytic2x2.closed_form_phase('NonSymA'))
        self.assertAlmostEqual(-numpy.pi / 2, analytic2x2.closed_form_phase('NonSymB', dict(alpha=1, beta=2)),
                               delta=1e-12)
        # -3 pi / 2, wrapped
        self.assertAlmostEqual(numpy.pi / 2, analytic2x2.closed_form_phase('NonSymB', dict(alpha=1, beta=2), MINUS),
                               delta=1e-12)
        expected = -numpy.pi * (1 - (1 + 1j) / 2)
        self.assertPhaseClose(analytic2x2.closed_form_phase('NonSymB', dict(alpha=1 + 1j, beta=2)), expected, 1e-12)

        not_available = analytic2x2.closed_form_phase('SymA')
        self.assertIs(analytic2x2.NOT_AVAILABLE, not_available)
        self.assertFalse(not_available)
        self.assertRaises(ValueError, analytic2x2.closed_form_phase, 'NonSymB', None, 'up')

    def test_closed_form_holonomy(self):
        loop = curves.circle([0, 0], 1.)
        for alpha, beta in [(1, 2), (1 + 1j, 2), (3, 1 + 2j)]:
            family = NonSymmetricB(alpha, beta)
            for branch in [PLUS, MINUS]:
                result = analytic2x2.closed_form_holonomy(family, loop, branch)
                self.assertEqual(1, len(result.patches))
                self.assertEqual([], result.transitions)
                expected = analytic2x2.closed_form_phase('NonSymB', dict(alpha=alpha, beta=beta), branch)
                self.assertPhaseClose(result.geometric, expected, 1e-7)

        # NonSymA never leaves M1, where both branches pick up -2 pi
        result = analytic2x2.closed_form_holonomy(NonSymmetricA(), loop, PLUS)
        self.assertEqual([(0., 1., M1)], result.patches)
        self.assertAlmostEqual(-2 * numpy.pi, result.geometric, delta=1e-7)

        # Around the branch point of SymA, f reaches -a on the lifted loop and the holonomy switches patches
        for radius in [.5, 1.]:
            lifted = curves.circle([0, 0], radius).repeated(2)
            for branch in [PLUS, MINUS]:
                result = analytic2x2.closed_form_holonomy(SymmetricA(), lifted, branch)
                self.assertGreater(len(result.patches), 1)
                self.assertEqual(len(result.patches) - 1, len(result.transitions))
                self.assertLess(abs(result.holonomy_factor + 1), 1e-6)

        result = analytic2x2.closed_form_holonomy(SymmetricB(), curves.circle([0, 1], 1.).repeated(2), PLUS)
        self.assertLess(abs(result.holonomy_factor + 1), 1e-6)

        self.assertRaises(ValueError, analytic2x2.closed_form_holonomy, SymmetricA(), loop)
        self.assertRaises(ValueError, analytic2x2.closed_form_holonomy, SymmetricA(),
                          curves.polyline([[1, 0], [2, 0]]))

    def test_closed_form_path(self):
        family = NonSymmetricB(1 + 1j, 2)
        loop = curves.circle([0, 0], 1.)
        closed_form = analytic2x2.closed_form_path(family, loop, 256)
        tracked = tracking.track(family, loop, 256)
        self.assertTrue(closed_form.monodromy.is_identity())
        self.assertIs(closed_form.frames[0], closed_form.frames[-1])
        for frame in closed_form.frames:
            self.assertLess(frame.residual, 1e-10)

        for label, energy in [(0, 2.), (1, -2.)]:
            numpy.testing.assert_allclose(closed_form.energies(label), tracked.energies(tracked.label_for(energy)),
                                          atol=1e-10)
            expected = phase.geometric_phase(tracked, tracked.label_for(energy)).holonomy_factor
            self.assertLess(abs(phase.geometric_phase(closed_form, label).holonomy_factor - expected),
                            1e-10 * abs(expected))

        # Branch points swap the continued roots
        swapped = analytic2x2.closed_form_path(SymmetricA(), curves.circle([0, 0], .5), 128)
        self.assertEqual('(1 2)', swapped.monodromy.notation())

        self.assertRaises(PatchSingular, analytic2x2.closed_form_path, NonSymmetricA(), loop, 64, patch=M2)
        self.assertRaises(ValueError, analytic2x2.closed_form_path, BlockSquareRoot(), curves.circle([0, 0], 2.), 64)

