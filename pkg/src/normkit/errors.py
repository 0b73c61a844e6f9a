"""Exception hierarchy.

``UsageError`` subclasses map to CLI exit code 2; ``MathematicalFailure``
subclasses to exit code 1.
"""


class NormkitError(Exception):
    pass


class UsageError(NormkitError, ValueError):
    """Malformed input: bad shapes, bad exponents, unparsable fixtures."""


class DimensionError(UsageError):
    pass


class MathematicalFailure(NormkitError):
    """A precondition of the mathematics failed (not a programming error)."""


class InvalidNormError(MathematicalFailure):
    pass


class SingularBasisError(MathematicalFailure):
    pass


class ExtensionDirectionError(MathematicalFailure):
    pass


class SeparationError(MathematicalFailure):
    pass


class SolverFailure(MathematicalFailure):
    pass


class CauchyError(MathematicalFailure):
    def __init__(self, m, n, distance, bound):
        self.m, self.n, self.distance, self.bound = m, n, distance, bound
        super().__init__(
            f"not Cauchy: ||x_{m} - x_{n}||_2 = {distance:.6g} exceeds "
            f"eps[{min(m, n)}] = {bound:.6g}"
        )


class IncompleteSpecificationError(MathematicalFailure):
    pass
