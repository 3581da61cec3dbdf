"""Exception hierarchy shared by the package.

Every error raised on purpose derives from :class:`BallKernelError`, so the
CLI can map them all to exit code 2 in one place.
"""


class BallKernelError(Exception):
    """Base class for all deliberate failures."""


class DomainError(BallKernelError, ValueError):
    """An argument lies outside the domain where the operation is defined."""


class ContractError(BallKernelError, ValueError):
    """An input violates a structural precondition (e.g. not Hermitian)."""


class NotRankOne(BallKernelError):
    def __init__(self, rank):
        super().__init__(f"matrix has numerical rank {rank}, expected 1")
        self.rank = rank


class NotPositive(BallKernelError):
    """A diagonal entry that must be strictly positive is not."""


class NotIsometricData(BallKernelError):
    """Source and target vectors have different pairwise inner products."""


class DuplicatePoints(BallKernelError, ValueError):
    def __init__(self, i, j):
        super().__init__(f"points {i} and {j} coincide")
        self.pair = (i, j)


class InconsistentData(BallKernelError, ValueError):
    """The same source point is paired with two different targets."""


class NotAFunctionSpace(BallKernelError):
    def __init__(self, index, value):
        super().__init__(
            f"weights fail the radius-of-convergence guard at n={index} "
            f"(w_n^(-1/n) = {value:.6g})"
        )
        self.index = index
        self.value = value


class CapExceeded(BallKernelError):
    def __init__(self, size, cap):
        super().__init__(
            f"{size} points exceeds the assignment search cap of {cap}; "
            "refusing to enumerate"
        )
        self.size = size
        self.cap = cap


class Refusal(BallKernelError):
    """A construction that provably does not exist was requested."""
