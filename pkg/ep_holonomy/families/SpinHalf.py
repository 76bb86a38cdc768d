import numpy

from ep_holonomy.families.Abstract import AbstractFamily

PAULI = numpy.array([[[0, 1], [1, 0]],
                     [[0, -1j], [1j, 0]],
                     [[1, 0], [0, -1]]], dtype=complex)


class SpinHalf(AbstractFamily):
    """
    Hermitian spin-1/2 family H = R . sigma over R in R^3. Its only degeneracy is the diabolic point R = 0, and the
    curvature of the upper level is the monopole field -R / (2 |R|^3).
    """

    def __init__(self):
        super(SpinHalf, self).__init__()
        self.name = 'SpinHalf'
        self.dim = 2
        self.dim_params = 3
        self.hermitian = True
        self.ep_points = [numpy.zeros(3)]
        self.ep_locus = 'R = 0 (diabolic)'

    def matrix(self, point):
        point = self.check_point(point)
        return numpy.tensordot(point, PAULI, axes=1)
