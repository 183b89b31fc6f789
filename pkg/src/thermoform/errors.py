"""Exception hierarchy.

Two families matter to callers: :class:`InputError` (bad matrices, files,
parameters) and :class:`NumericalError` (an algorithm failed to converge or
produced a degenerate answer).  The CLI maps them to exit codes 1 and 2.
"""


class ThermoformError(Exception):
    """Base class for every error raised by this package."""


class InputError(ThermoformError, ValueError):
    pass


class NumericalError(ThermoformError, ArithmeticError):
    pass


# --- symbolic dynamics -------------------------------------------------------

class NonSquare(InputError):
    pass


class NonBinaryEntry(InputError):
    pass


class ZeroRow(InputError):
    def __init__(self, i):
        super().__init__(f"row {i} of the transition matrix is all zero")
        self.index = i


class ZeroColumn(InputError):
    def __init__(self, j):
        super().__init__(f"column {j} of the transition matrix is all zero")
        self.index = j


class NotPrimitive(InputError):
    pass


class BudgetExceeded(InputError):
    pass


class WordTooShort(InputError):
    pass


class InadmissibleWord(InputError):
    pass


class RangeShrink(InputError):
    pass


class DepthTooSmall(InputError):
    pass


class RangeTooLarge(InputError):
    pass


class DimensionTooLarge(InputError):
    pass


class ShiftMismatch(InputError):
    pass


class NotExpanding(InputError):
    pass


# --- smooth dynamics ---------------------------------------------------------

class NotHyperbolic(InputError):
    pass


class NotUnimodular(InputError):
    pass


class DomainError(InputError):
    pass


class CodingMismatch(InputError):
    pass


class ConeMarginViolated(InputError):
    pass


class NotOnCommonLeaf(InputError):
    pass


# --- numerical failures ------------------------------------------------------

class NoConvergence(NumericalError):
    pass


class ZeroMassCylinder(NumericalError):
    pass


class NegativeVariance(NumericalError):
    pass


class NoRootInRadius(NumericalError):
    pass


class NewtonDivergence(NumericalError):
    pass
