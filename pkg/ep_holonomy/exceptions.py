"""
Errors raised by ep-holonomy.

Everything derives from `HolonomyError`. Errors that signal a bad argument also derive from `ValueError`.
"""


class HolonomyError(Exception):
    pass


class DegenerateInput(HolonomyError, ValueError):
    """
    Two eigenvalues coincide within tolerance (an exceptional or diabolic point)
    """
    pass


class NoConvergence(HolonomyError):
    pass


class SelfOrthogonal(HolonomyError, ValueError):
    """
    A left / right eigenvector pair has (numerically) vanishing overlap, which signals proximity to an EP
    """
    pass


class InvalidSampling(HolonomyError, ValueError):
    pass


class InvalidCurve(HolonomyError, ValueError):
    pass


class InvalidParams(HolonomyError, ValueError):
    pass


class NearEP(HolonomyError):
    """
    A sample along a curve came within the EP guard distance of a degeneracy

    :param t: Curve parameter of the offending sample, if known
    :type t: float
    """

    def __init__(self, message, t=None):
        super(NearEP, self).__init__(message)
        self.t = t


class AmbiguousMatching(HolonomyError):
    pass


class BranchAmbiguity(HolonomyError):
    pass


class OpenCurve(HolonomyError, ValueError):
    pass


class NonCyclicBranch(HolonomyError):
    pass


class PrecisionLoss(HolonomyError):
    """
    A single step of the discrete holonomy was too coarse to resolve

    :param suggested_samples: A sample count that should resolve the offending step
    :type suggested_samples: int
    """

    def __init__(self, message, suggested_samples=None):
        super(PrecisionLoss, self).__init__(message)
        self.suggested_samples = suggested_samples


class MismatchedJunction(HolonomyError):
    pass


class ZeroGauge(HolonomyError, ValueError):
    pass


class PatchSingular(HolonomyError):
    pass


class NotContractible(HolonomyError):
    pass


class StepUnderflow(HolonomyError):
    pass


class LowFidelity(HolonomyError):

    def __init__(self, message, fidelity=None):
        super(LowFidelity, self).__init__(message)
        self.fidelity = fidelity


class ConfigError(HolonomyError, ValueError):
    pass
