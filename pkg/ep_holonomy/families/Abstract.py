import numpy

from ep_holonomy import lib
from ep_holonomy.exceptions import InvalidParams


class AbstractFamily():
    """
    Interface for all matrix families, i.e. maps from a real parameter point to an N x N complex Hamiltonian H[R]
    """

    def __init__(self):
        self.name = 'abstract'
        self.dim = None
        self.dim_params = None
        self.hermitian = False
        self.symmetric = False

        # Known degeneracy points (parameter points), plus a human readable description of the EP locus
        self.ep_points = []
        self.ep_locus = None

    def matrix(self, point):
        """
        Evaluate the Hamiltonian at a parameter point

        :param point: A parameter point, of length `dim_params`
        :return: An N x N complex matrix
        :rtype: numpy.ndarray
        """
        raise NotImplementedError('Family: {} does not implement matrix()'.format(self.__class__))

    def __call__(self, point):
        return self.matrix(point)

    def traceless_entries(self, point):
        """
        Entries (a, b, c) of the traceless part [[a, b], [c, -a]] of a 2 x 2 Hamiltonian
        """
        self._check_two_level()
        matrix = self.matrix(point)
        return (matrix[0, 0] - matrix[1, 1]) / 2., matrix[0, 1], matrix[1, 0]

    def distance_to_ep(self, point):
        """
        Distance from `point` to the nearest known degeneracy, or None if the family does not know its EPs

        :rtype: float
        """
        if len(self.ep_points) == 0:
            return None
        point = lib.as_point(point)
        return float(min(map(lambda ep: numpy.linalg.norm(point - lib.as_point(ep)), self.ep_points)))

    def check_point(self, point):
        """
        Convert `point` to a parameter array, and check that it has `dim_params` coordinates

        :rtype: numpy.ndarray
        """
        point = lib.as_point(point)
        if len(point) != self.dim_params:
            raise InvalidParams('Family: {} expects {} parameters, got: {}'.format(self.name, self.dim_params, point))
        return point

    def _check_two_level(self):
        if self.dim != 2:
            raise ValueError('Family: {} is {} x {}, but a 2 x 2 family is required'.format(self.name, self.dim,
                                                                                          self.dim))
        return True

    def __repr__(self):
        return '{}(name={})'.format(self.__class__.__name__, self.name)


class ComplexParameterFamily(AbstractFamily):
    """
    A family of one complex parameter z, sampled on the real coordinates (Re z, Im z)
    """

    def __init__(self):
        super(ComplexParameterFamily, self).__init__()
        self.dim_params = 2

        # Degeneracies, as complex values of z
        self.ep_values = []

    def matrix(self, point):
        return numpy.array(self.matrix_at(self.to_complex(point)), dtype=complex)

    def matrix_at(self, z):
        raise NotImplementedError('Family: {} does not implement matrix_at()'.format(self.__class__))

    def to_complex(self, point):
        point = self.check_point(point)
        return complex(point[0], point[1])

    @staticmethod
    def to_point(z):
        return numpy.array([z.real, z.imag])

    @property
    def ep_points(self):
        return list(map(self.to_point, self.ep_values))

    @ep_points.setter
    def ep_points(self, value):
        # Complex families keep their degeneracies in `ep_values`
        pass


class MatrixFunction(AbstractFamily):
    """
    A family wrapping a plain callable, for ad hoc Hamiltonians
    """

    def __init__(self, function, dim, dim_params, name='function', hermitian=False, ep_points=None):
        super(MatrixFunction, self).__init__()
        self.function = function
        self.name = name
        self.dim = dim
        self.dim_params = dim_params
        self.hermitian = hermitian
        self.ep_points = list(ep_points or [])

    def matrix(self, point):
        return numpy.array(self.function(self.check_point(point)), dtype=complex)
