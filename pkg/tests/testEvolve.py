import numpy
import scipy.linalg

from ep_holonomy import curves, evolve, lib, tracking
from ep_holonomy.exceptions import InvalidParams, LowFidelity, NonCyclicBranch, OpenCurve
from ep_holonomy.families.NonSymmetric import NonSymmetricB
from ep_holonomy.families.Polynomial import Constant
from ep_holonomy.families.SpinHalf import SpinHalf
from ep_holonomy.families.SquareRoot import SquareRoot
from ep_holonomy.families.ThreeParameter import ThreeParameter
from tests.testbase import TestBase

# Concentric loop outside the EP ring, in the plane of real spectra: f = 1/4 all the way round
REAL_SPECTRUM_RADIUS = numpy.sqrt(.3125)


class TestEvolve(TestBase):

    def test_constant_evolution(self):
        family = Constant()
        loop = curves.circle([0, 0], 1.)
        frame = tracking.frame_at(family, loop(0.))
        result = evolve.integrate(family, loop, 1., frame.right[:, 0], rel_tol=1e-10, frame=frame, label=0)
        self.assertAlmostEqual(1., result.fidelity, delta=1e-10)
        self.assertAlmostEqual(-1., result.extracted_total_phase, delta=1e-8)
        self.assertEqual(1, evolve.chunk_count(family, loop, 1.))
        numpy.testing.assert_allclose([1., 0.], evolve.fidelities(result, frame), atol=1e-8)

        # Initial scale k is divided out of the extracted phase, and kept in the log scale
        result = evolve.integrate(family, loop, 1., 3j * frame.right[:, 0], rel_tol=1e-10, frame=frame, label=0,
                                  k=3j)
        self.assertAlmostEqual(-1., result.extracted_total_phase, delta=1e-8)
        self.assertAlmostEqual(numpy.log(3.), result.log_norm, delta=1e-8)

    def test_adiabatic_extract_constant(self):
        family = Constant()
        loop = curves.circle([0, 0], 1.)
        path = tracking.track(family, loop, 64)
        result = evolve.integrate(family, loop, 10., path.frames[0].right[:, 0], rel_tol=1e-10)
        self.assertIsNone(result.fidelity)
        self.assertLess(abs(evolve.adiabatic_extract(result, path, 0)), 1e-6)

    def test_chunked_growth(self):
        family = Constant([[10j, 0], [0, -10j]])
        loop = curves.circle([0, 0], 1.)
        self.assertEqual(4, evolve.chunk_count(family, loop, 20.))
        result = evolve.integrate(family, loop, 20., [1., 1.], rel_tol=1e-10)
        self.assertAlmostEqual(1., numpy.linalg.norm(result.final_state), delta=1e-12)
        self.assertAlmostEqual(200., result.log_norm, delta=1e-5)
        self.assertTrue(numpy.isfinite(result.log_scale))

    def test_invalid_params(self):
        family = Constant()
        loop = curves.circle([0, 0], 1.)
        self.assertRaises(InvalidParams, evolve.integrate, family, loop, 0., [1, 0])
        self.assertRaises(InvalidParams, evolve.integrate, family, loop, -1., [1, 0])
        self.assertRaises(InvalidParams, evolve.integrate, family, loop, 1., [1, 0], rel_tol=.1)
        self.assertRaises(InvalidParams, evolve.integrate, family, loop, 1., [1, 0], rel_tol=1e-16)
        self.assertRaises(InvalidParams, evolve.integrate, family, loop, 1., [0, 0])

    def test_branch_swap(self):
        # The growing branch of the square root family follows the swap around its EP
        family = SquareRoot()
        loop = curves.circle([0, 0], 1.)
        frame = tracking.frame_at(family, loop(0.))
        result = evolve.integrate(family, loop, 1e3, frame.right[:, 0], rel_tol=1e-9)
        swapped = evolve.fidelities(result, frame)
        self.assertGreater(swapped[1], .99)
        self.assertLess(swapped[0], .05)
        self.assertGreater(result.log_norm, 100.)

    def test_lifted_loop_changes_dominance(self):
        # On the second traversal the followed branch decays, so the state ends on the other branch
        family = SquareRoot()
        loop = curves.circle([0, 0], 1.)
        frame = tracking.frame_at(family, loop(0.))
        result = evolve.integrate(family, loop.repeated(2), 1e3, frame.right[:, 0], rel_tol=1e-9)
        final = evolve.fidelities(result, frame)
        self.assertGreater(final[1], .99)
        self.assertLess(final[0], .05)

    def test_hermitian_norm(self):
        family = SpinHalf()
        loop = curves.circle([0, 0, .5], numpy.sqrt(.75))
        psi0 = numpy.array([.6, .8j])
        result = evolve.integrate(family, loop, 50., psi0, rel_tol=1e-10)
        self.assertEqual(1, evolve.chunk_count(family, loop, 50.))
        self.assertAlmostEqual(0., result.log_norm, delta=1e-7)
        self.assertAlmostEqual(1., numpy.linalg.norm(result.final_state), delta=1e-12)

    def test_constant_against_exponential(self):
        matrix = numpy.array([[.5, 1.], [.25, -.5]])
        family = Constant(matrix)
        loop = curves.circle([0, 0], 1.)
        psi0 = numpy.array([1., 1j])
        rel_tol = 1e-8
        for T in [1., 3.]:
            result = evolve.integrate(family, loop, T, psi0, rel_tol=rel_tol)
            expected = scipy.linalg.expm(-1j * T * matrix) @ psi0
            self.assertLess(numpy.linalg.norm(result.state - expected) / numpy.linalg.norm(expected), 10 * rel_tol)

    def test_extract_errors(self):
        family = SquareRoot()
        loop = curves.circle([0, 0], 1.)
        path = tracking.track(family, loop, 64)
        result = evolve.integrate(family, loop, 10., path.frames[0].right[:, 0])
        self.assertRaises(NonCyclicBranch, evolve.adiabatic_extract, result, path, 0)

        segment = tracking.track(family, curves.polyline([[1, 0], [2, 0]]), 16)
        self.assertRaises(OpenCurve, evolve.adiabatic_extract, result, segment, 0)

    def test_low_fidelity(self):
        # Each branch of NonSymB decays over half of the loop, so the other one takes over
        family = NonSymmetricB(1, 2)
        loop = curves.circle([0, 0], 1.)
        path = tracking.track(family, loop, 512)
        result = evolve.integrate(family, loop, 200., path.frames[0].right[:, 0])
        with self.assertRaises(LowFidelity) as context:
            evolve.adiabatic_extract(result, path, 0)
        self.assertLess(context.exception.fidelity, lib.FIDELITY_FLOOR)

        table = evolve.sweep(family, loop, 0, [200.])
        self.assertEqual(evolve.SWEEP_COLUMNS, list(table.columns))
        self.assertEqual('non-adiabatic', table['status'][0])
        self.assertTrue(numpy.isnan(table['error'][0]))

    def test_adiabatic_convergence(self):
        family = ThreeParameter(1.)
        loop = curves.circle([0, 0, 0], REAL_SPECTRUM_RADIUS)
        table = evolve.sweep(family, loop, 0, [200., 500., 1000.], rel_tol=1e-10, workers=3)
        self.assertEqual(3, len(table.index))
        self.assertEqual(['ok'] * 3, list(table['status']))
        errors = list(table['error'])
        self.assertLess(errors[1], errors[0])
        self.assertLess(errors[2], errors[1])
        self.assertLess(errors[2], errors[0] / 2.)

        # The discrete reference is the closed form -pi - i pi Gamma / (2 f)
        reference = complex(table['gamma_geometric_re'][0], table['gamma_geometric_im'][0])
        self.assertPhaseClose(reference, complex(-numpy.pi, -2 * numpy.pi), 1e-6)
        self.assertTrue(all(table['fidelity'] > lib.FIDELITY_FLOOR))

    def test_empty_sweep(self):
        table = evolve.sweep(Constant(), curves.circle([0, 0], 1.), 0, [])
        self.assertEqual(0, len(table.index))
        self.assertEqual(evolve.SWEEP_COLUMNS, list(table.columns))
