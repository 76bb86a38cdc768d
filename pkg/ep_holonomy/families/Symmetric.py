import numpy

from ep_holonomy.families.Abstract import ComplexParameterFamily


class SymmetricA(ComplexParameterFamily):
    """
    Complex symmetric family [[1+z, i(1-z)], [i(1-z), -(1+z)]], with f = 2 sqrt(z). The only EP is z = 0, a branch
    point, so loops around it swap the two eigenvalues.
    """

    def __init__(self):
        super(SymmetricA, self).__init__()
        self.name = 'SymA'
        self.dim = 2
        self.symmetric = True
        self.ep_values = [0j]
        self.ep_locus = 'z = 0'

    def matrix_at(self, z):
        return [[1 + z, 1j * (1 - z)],
                [1j * (1 - z), -(1 + z)]]

    @staticmethod
    def f_squared(z):
        return 4 * z


class SymmetricB(ComplexParameterFamily):
    """
    Complex symmetric family [[1+z, 1-z], [1-z, -(1+z)]], with f^2 = 2 (z+i)(z-i) and branch point EPs at z = +-i
    """

    def __init__(self):
        super(SymmetricB, self).__init__()
        self.name = 'SymB'
        self.dim = 2
        self.symmetric = True
        self.ep_values = [1j, -1j]
        self.ep_locus = 'z = +i, z = -i'

    def matrix_at(self, z):
        return numpy.array([[1 + z, 1 - z],
                            [1 - z, -(1 + z)]])

    @staticmethod
    def f_squared(z):
        return 2 * (1 + z * z)
