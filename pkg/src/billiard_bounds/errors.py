"""Exception hierarchy shared by all modules."""


class BilliardError(Exception):
    """Base class for all package errors."""


class DimensionMismatch(BilliardError, ValueError):
    pass


class RankDeficientFrame(BilliardError, ValueError):
    pass


class DiagonalViolation(BilliardError, ValueError):
    """A configuration has a segment shorter than the diagonal guard."""


class NonUnitDirection(BilliardError, ValueError):
    pass


class HessianError(BilliardError, ArithmeticError):
    """Finite-difference Hessian failed its symmetry check."""


class NoConvergence(BilliardError, RuntimeError):
    pass


class DiagonalCollapse(BilliardError, RuntimeError):
    """Newton iterates entered the tube around the diagonal."""


class DegenerateInput(BilliardError, ValueError):
    pass


class NonPrimeP(BilliardError, ValueError):
    pass


class PTooSmall(BilliardError, ValueError):
    pass


class DualityViolation(BilliardError, ValueError):
    pass


class InvalidBetti(BilliardError, ValueError):
    pass


class DomainTooLarge(BilliardError, ValueError):
    pass


class BudgetExceeded(BilliardError, RuntimeError):
    def __init__(self, estimate: int, budget: int):
        super().__init__(f"estimated {estimate} cells exceeds budget {budget}")
        self.estimate = estimate
        self.budget = budget


class ChainComplexError(BilliardError, AssertionError):
    """A built complex failed a structural check (boundary of boundary, closure)."""


class UnsupportedAmbientDim(BilliardError, ValueError):
    pass


class ConfigInvalid(BilliardError, ValueError):
    def __init__(self, errors):
        self.errors = list(errors)
        msg = "; ".join(f"{e['field']}: {e['message']}" for e in self.errors)
        super().__init__(msg or "invalid configuration")
