"""
Permutations of spectral labels, and the groups they generate
"""
from __future__ import annotations

import functools
import logging

from sympy.combinatorics import Permutation as SympyPermutation
from sympy.combinatorics import PermutationGroup


@functools.total_ordering
class Permutation():
    """
    A permutation of the labels {0, ..., N-1}, backed by a `sympy.combinatorics.Permutation`.

    The product `a * b` is the permutation that applies `a`, then `b` (sympy's convention). With this convention the
    monodromy of a curve is the product of its step matchings, in curve order.
    """

    __slots__ = ('_permutation', )

    def __init__(self, images):
        if isinstance(images, SympyPermutation):
            self._permutation = images
            return
        images = [int(i) for i in images]
        if sorted(images) != list(range(len(images))):
            raise ValueError('Not a permutation of 0..{}: {}'.format(len(images) - 1, images))
        self._permutation = SympyPermutation(images)

    @staticmethod
    def identity(size):
        return Permutation(range(size))

    @staticmethod
    def from_cycles(size, *cycles):
        """
        Build a permutation from zero-based cycles, e.g. `from_cycles(3, (1, 2))`
        """
        if len(cycles) == 0:
            return Permutation.identity(size)
        return Permutation(SympyPermutation([list(cycle) for cycle in cycles], size=size))

    @property
    def sympy(self):
        return self._permutation

    @property
    def images(self):
        return tuple(self._permutation.array_form)

    @property
    def size(self):
        return self._permutation.size

    def __call__(self, label):
        return self._permutation.array_form[label]

    def __len__(self):
        return self.size

    def __hash__(self):
        return hash(self.images)

    def __eq__(self, other):
        return isinstance(other, Permutation) and self.images == other.images

    def __lt__(self, other):
        return self.images < other.images

    def __mul__(self, other: Permutation) -> Permutation:
        if other.size != self.size:
            raise ValueError('Cannot compose permutations of sizes: {} and {}'.format(self.size, other.size))
        return Permutation(self._permutation * other._permutation)

    def __pow__(self, n: int) -> Permutation:
        return Permutation(self._permutation ** int(n))

    def inverse(self):
        return Permutation(~self._permutation)

    def is_identity(self):
        return self._permutation.is_Identity

    def cycles(self, include_fixed=True):
        """
        Cycle decomposition, each cycle starting at its smallest label

        :param include_fixed: Whether to include 1-cycles
        :return: Zero-based cycles
        :rtype: [(int)]
        """
        cycles = self._permutation.full_cyclic_form if include_fixed else self._permutation.cyclic_form
        return [tuple(cycle) for cycle in cycles]

    def periods(self):
        """
        Per-label period: the smallest k >= 1 with sigma^k(label) = label, i.e. the length of the label's cycle
        """
        periods = [1] * self.size
        for cycle in self.cycles(include_fixed=False):
            for label in cycle:
                periods[label] = len(cycle)
        return periods

    @property
    def order(self):
        return int(self._permutation.order())

    def notation(self):
        """
        One-based cycle notation, with fixed points, e.g. `(1)(2 3)`; the identity is written `id`
        """
        if self.is_identity():
            return 'id'
        return ''.join('(' + ' '.join(str(label + 1) for label in cycle) + ')' for cycle in self.cycles())

    @staticmethod
    def from_notation(notation, size):
        if notation.strip() == 'id':
            return Permutation.identity(size)
        cycles = []
        for chunk in notation.replace(')', '').split('('):
            if chunk.strip():
                cycles.append(tuple(int(label) - 1 for label in chunk.split()))
        return Permutation.from_cycles(size, *cycles)

    def __repr__(self):
        return 'Permutation({})'.format(self.notation())


def generate_group(generators, size):
    """
    The permutation group generated by a set of label permutations.

    :param generators: Permutations, all of the same size
    :param size: Number of labels; used for the trivial group when there are no generators
    :type size: int
    :rtype: sympy.combinatorics.PermutationGroup
    """
    # The identity fixes the degree when there are no generators
    group = PermutationGroup([Permutation.identity(size).sympy] + [generator.sympy for generator in generators])
    logging.info('Generated group of order: {} from: {} generators'.format(group.order(), len(generators)))
    return group


def elements(group):
    """
    :type group: sympy.combinatorics.PermutationGroup
    :rtype: {Permutation}
    """
    return {Permutation(element) for element in group.generate()}


def orbits(group):
    """
    Orbits of the labels under a permutation group, i.e. the labels that get mixed by going around loops

    :type group: sympy.combinatorics.PermutationGroup
    :rtype: [(int)]
    """
    return sorted(tuple(sorted(orbit)) for orbit in group.orbits())
