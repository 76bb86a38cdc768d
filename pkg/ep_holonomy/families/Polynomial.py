import logging

import numpy
from numpy.polynomial import polynomial

from ep_holonomy import lib
from ep_holonomy.exceptions import InvalidParams
from ep_holonomy.families.Abstract import AbstractFamily, ComplexParameterFamily


def _check_square_entries(entries):
    if len(entries) == 0 or any(len(row) != len(entries) for row in entries):
        raise InvalidParams('Polynomial entries must form a square N x N table, got {} rows'.format(len(entries)))
    return True


def _check_degree(degree):
    if degree > lib.MAX_POLYNOMIAL_DEGREE:
        raise InvalidParams('Polynomial degree: {} exceeds the maximum: {}'.format(degree,
                                                                                  lib.MAX_POLYNOMIAL_DEGREE))
    return True


class Polynomial(ComplexParameterFamily):
    """
    Family whose entries are polynomials in one complex parameter z

    :param entries: N x N table; each entry is a list of complex coefficients, lowest degree first, or a bare number
        for a constant entry. Coefficients may be numbers, `[re, im]` pairs or strings such as `1+2j`
    :param name: Family name, for reports
    """

    def __init__(self, entries, name='polynomial'):
        super(Polynomial, self).__init__()
        _check_square_entries(entries)
        self.coefficients = list()
        for row in entries:
            parsed_row = list()
            for entry in row:
                # A bare number is a constant entry
                entry = entry if isinstance(entry, (list, tuple)) else [entry]
                coefficients = numpy.array([lib.as_complex(c) for c in entry], dtype=complex)
                if len(coefficients) == 0:
                    coefficients = numpy.zeros(1, dtype=complex)
                _check_degree(len(coefficients) - 1)
                parsed_row.append(coefficients)
            self.coefficients.append(parsed_row)

        self.name = name
        self.dim = len(entries)
        if self.dim == 2:
            self.ep_values = self._discriminant_roots()
            self.ep_locus = 'roots of a^2 + bc: {}'.format(self.ep_values)

    def matrix_at(self, z):
        return [[polynomial.polyval(z, entry) for entry in row] for row in self.coefficients]

    def _discriminant_roots(self):
        (p00, p01), (p10, p11) = self.coefficients
        a = polynomial.polysub(p00, p11) / 2.
        discriminant = polynomial.polytrim(polynomial.polyadd(polynomial.polymul(a, a), polynomial.polymul(p01, p10)))
        if len(discriminant) < 2:
            if discriminant[0] == 0:
                logging.warning('Family: {} is degenerate for every z'.format(self.name))
            return []
        return list(polynomial.polyroots(discriminant))


class MultivariatePolynomial(AbstractFamily):
    """
    Family whose entries are polynomials in d real curve coordinates

    :param entries: N x N table; each entry is a list of `[coefficient, [p_1, ..., p_d]]` terms, the monomial
        coefficient * x_1^p_1 * ... * x_d^p_d
    :param dim_params: Number of real coordinates d
    """

    def __init__(self, entries, dim_params, name='polynomial'):
        super(MultivariatePolynomial, self).__init__()
        _check_square_entries(entries)
        self.name = name
        self.dim = len(entries)
        self.dim_params = int(dim_params)
        self.terms = list()
        for row in entries:
            parsed_row = list()
            for entry in row:
                parsed_entry = list()
                for coefficient, powers in entry:
                    powers = numpy.array(powers, dtype=int)
                    if len(powers) != self.dim_params or numpy.any(powers < 0):
                        raise InvalidParams('Monomial powers: {} do not match {} coordinates'.format(
                            list(powers), self.dim_params))
                    _check_degree(int(powers.sum()))
                    parsed_entry.append((lib.as_complex(coefficient), powers))
                parsed_row.append(parsed_entry)
            self.terms.append(parsed_row)

    def matrix(self, point):
        point = self.check_point(point)
        return numpy.array([[sum((coefficient * numpy.prod(point ** powers) for coefficient, powers in entry), 0j)
                             for entry in row] for row in self.terms], dtype=complex)


class Constant(AbstractFamily):
    """
    A parameter independent Hamiltonian. Its connection and curvature vanish identically.
    """

    def __init__(self, matrix=None, dim_params=2):
        super(Constant, self).__init__()
        if matrix is None:
            matrix = [[1, 0], [0, -1]]
        self.value = lib.check_square_matrix([[lib.as_complex(x) for x in row] for row in matrix])
        self.name = 'Constant'
        self.dim = self.value.shape[0]
        self.dim_params = int(dim_params)
        self.hermitian = bool(numpy.allclose(self.value, self.value.conj().T))

    def matrix(self, point):
        self.check_point(point)
        return self.value.copy()
