import numpy

from ep_holonomy.exceptions import InvalidParams
from ep_holonomy.families.Abstract import AbstractFamily


class ThreeParameter(AbstractFamily):
    """
    Traceless family with a constant non-Hermitian part, (R - i Gamma e_3 / 2) . sigma:

        [[R3 - i Gamma / 2, R1 - i R2], [R1 + i R2, -(R3 - i Gamma / 2)]]

    Its EPs form the circle R1^2 + R2^2 = Gamma^2 / 4, R3 = 0. In the plane R3 = 0, outside that circle, the spectrum
    is real.

    :param gamma: Nonzero real decay constant
    """

    def __init__(self, gamma=1.):
        super(ThreeParameter, self).__init__()
        self.gamma = float(gamma)
        if self.gamma == 0:
            raise InvalidParams('ThreeParam requires a nonzero Gamma')
        self.name = 'ThreeParam'
        self.dim = 2
        self.dim_params = 3
        self.ep_locus = 'R1^2 + R2^2 = {}, R3 = 0'.format(self.gamma ** 2 / 4)

    def matrix(self, point):
        r1, r2, r3 = self.check_point(point)
        diagonal = r3 - 0.5j * self.gamma
        return numpy.array([[diagonal, r1 - 1j * r2],
                            [r1 + 1j * r2, -diagonal]])

    def distance_to_ep(self, point):
        r1, r2, r3 = self.check_point(point)
        radial = numpy.hypot(r1, r2) - abs(self.gamma) / 2.
        return float(numpy.hypot(radial, r3))


class ThreeParameterSlice(AbstractFamily):
    """
    The R2 = 0 slice of `ThreeParameter`, on the coordinates (R1, R3). Its EPs sit at (+-Gamma / 2, 0).
    """

    def __init__(self, gamma=1.):
        super(ThreeParameterSlice, self).__init__()
        self.parent = ThreeParameter(gamma)
        self.gamma = self.parent.gamma
        self.name = 'ThreeParamSlice'
        self.dim = 2
        self.dim_params = 2
        self.ep_points = [numpy.array([self.gamma / 2., 0.]), numpy.array([-self.gamma / 2., 0.])]
        self.ep_locus = '(R1, R3) = (+-{}, 0)'.format(self.gamma / 2.)

    def matrix(self, point):
        r1, r3 = self.check_point(point)
        return self.parent.matrix([r1, 0., r3])

    def loop(self, sign=1, epsilon=None, period=1.):
        """
        Loop of radius epsilon around the EP at (sign Gamma / 2, 0), traced as
        (sign (Gamma / 2 + epsilon cos wt), epsilon sin wt). The two loops are mirror images of each other.

        :param sign: +1 for the EP on the positive R1 axis, -1 for the other one
        :param epsilon: Loop radius, in (0, Gamma / 2); defaults to Gamma / 4
        :rtype: ep_holonomy.curves.CurveSpec
        """
        from ep_holonomy import curves

        epsilon = abs(self.gamma) / 4. if epsilon is None else float(epsilon)
        if not 0 < epsilon < abs(self.gamma) / 2.:
            raise InvalidParams('Loop radius must lie in (0, Gamma / 2), got: {}'.format(epsilon))
        sign = 1. if sign > 0 else -1.
        center = numpy.array([sign * abs(self.gamma) / 2., 0.])
        axes = (numpy.array([sign, 0.]), numpy.array([0., 1.]))
        return curves.circle(center, epsilon, axes=axes, period=period, name='C{}'.format('+' if sign > 0 else '-'))
