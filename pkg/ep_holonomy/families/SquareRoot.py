from ep_holonomy.families.Abstract import ComplexParameterFamily


class SquareRoot(ComplexParameterFamily):
    """
    The square root family [[0, 1], [z, 0]], with eigenvalues +-sqrt(z). Its EP at z = 0 is a branch point of order
    two: one loop around it swaps the two labels.
    """

    def __init__(self):
        super(SquareRoot, self).__init__()
        self.name = 'H1'
        self.dim = 2
        self.ep_values = [0j]
        self.ep_locus = 'z = 0'

    def matrix_at(self, z):
        return [[0, 1],
                [z, 0]]


class BlockSquareRoot(ComplexParameterFamily):
    """
    The 3 x 3 block family diag(z, [[0, 1], [z, 0]]), with eigenvalues z and +-sqrt(z).

    z = 0 is an EP of the lower block, and z = 1 is a diabolic crossing of z with sqrt(z). A loop of radius 2 around
    both fixes the eigenvalue z and swaps the other two.
    """

    def __init__(self):
        super(BlockSquareRoot, self).__init__()
        self.name = 'H2block'
        self.dim = 3
        self.ep_values = [0j, 1 + 0j]
        self.ep_locus = 'z = 0 (exceptional), z = 1 (diabolic)'

    def matrix_at(self, z):
        return [[z, 0, 0],
                [0, 0, 1],
                [0, z, 0]]
