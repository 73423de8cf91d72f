"""Exceptions raised by the FC-Gram library.

Library code raises these; the tool layer turns them into
``success=False`` results with the message attached.
"""

from typing import Optional


class FcGramError(Exception):
    """Base class for every error raised by this package"""


class NotInAdmissibleSet(FcGramError, ValueError):
    """n violates n >= d-1, n*b integer, n*b even"""


class BadPeriod(FcGramError, ValueError):
    """Extension period b is not a rational greater than 1"""


class BadBasisSize(FcGramError, ValueError):
    """Number of Gram polynomials outside 2..12"""


class LengthMismatch(FcGramError, ValueError):
    pass


class DomainError(FcGramError, ValueError):
    pass


class DegenerateNodes(FcGramError, ValueError):
    pass


class ConfigMismatch(FcGramError, ValueError):
    pass


class NonDyadicSequence(FcGramError, ValueError):
    pass


class RowMismatch(FcGramError, ValueError):
    pass


class IndexOutOfRange(FcGramError, IndexError):
    pass


class ZeroFunction(FcGramError, ArithmeticError):
    pass


class RankDeficient(FcGramError, ArithmeticError):
    """Least-squares matrix lost column rank"""

    def __init__(self, rank: int, columns: int, smallest: float):
        self.rank = rank
        self.columns = columns
        self.smallest = smallest
        super().__init__(
            f"Matrix is rank deficient: numerical rank {rank} of {columns} columns, "
            f"smallest retained diagonal {smallest:.3e}"
        )


class SingularBoundaryMatrix(FcGramError, ArithmeticError):
    def __init__(self, condition: float):
        self.condition = condition
        super().__init__(f"Boundary matrix is singular (condition number {condition:.3e})")


class UnknownFunction(FcGramError, LookupError):
    pass


class UnknownProblem(FcGramError, LookupError):
    pass


class SweepFailed(FcGramError, RuntimeError):
    def __init__(self, n: int, cause: Optional[BaseException] = None):
        self.n = n
        message = f"Convergence sweep failed at n={n}"
        if cause is not None:
            message += f": {cause}"
        super().__init__(message)
