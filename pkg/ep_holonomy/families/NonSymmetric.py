from ep_holonomy import lib
from ep_holonomy.exceptions import InvalidParams
from ep_holonomy.families.Abstract import ComplexParameterFamily


class NonSymmetricA(ComplexParameterFamily):
    """
    Triangular family [[z, 1], [0, -z]]. Here a = f = z, so the EP at z = 0 is not a branch point: eigenvalues return
    to themselves after one loop, and the geometric phase angle vanishes modulo 2 pi.
    """

    def __init__(self):
        super(NonSymmetricA, self).__init__()
        self.name = 'NonSymA'
        self.dim = 2
        self.ep_values = [0j]
        self.ep_locus = 'z = 0'

    def matrix_at(self, z):
        return [[z, 1],
                [0, -z]]

    @staticmethod
    def f_of(z):
        return z


class NonSymmetricB(ComplexParameterFamily):
    """
    Family [[alpha z, 1], [(beta^2 - alpha^2) z^2, -alpha z]] with f = beta z. The EP at z = 0 is not a branch point,
    and the geometric phase around it depends on alpha / beta.

    :param alpha: Nonzero complex constant
    :param beta: Nonzero complex constant
    """

    def __init__(self, alpha=1., beta=2.):
        super(NonSymmetricB, self).__init__()
        self.alpha = lib.as_complex(alpha)
        self.beta = lib.as_complex(beta)
        if self.alpha == 0 or self.beta == 0:
            raise InvalidParams('NonSymB requires nonzero alpha and beta, got: {}, {}'.format(alpha, beta))
        self.name = 'NonSymB'
        self.dim = 2
        self.ep_values = [0j]
        self.ep_locus = 'z = 0'

    def matrix_at(self, z):
        return [[self.alpha * z, 1],
                [(self.beta ** 2 - self.alpha ** 2) * z ** 2, -self.alpha * z]]

    def f_of(self, z):
        return self.beta * z
