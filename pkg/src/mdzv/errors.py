"""Exception hierarchy.

Every error raised by the library derives from :class:`MDZVError`.  The four
intermediate classes group errors by the CLI exit code they map to.
"""


class MDZVError(Exception):
    exit_code = 1


class ConfigError(MDZVError):
    exit_code = 2


class ValidationError(MDZVError):
    """Invalid mathematical input or a violated domain precondition."""

    exit_code = 3


class ComparisonFailure(MDZVError):
    exit_code = 4


class BudgetExceeded(MDZVError):
    exit_code = 5


# numfield
class NotMonic(ValidationError):
    pass


class NotSquareFree(ValidationError):
    pass


class NotIrreducible(ValidationError):
    pass


class BasisSingular(ValidationError):
    pass


class FirstBasisElementNotOne(ValidationError):
    pass


class NonIntegralProduct(ValidationError):
    pass


class FieldMismatch(ValidationError):
    pass


class IndexOutOfRange(ValidationError):
    pass


class WrongTupleLength(ValidationError):
    pass


# algexp
class NonPositivePoint(ValidationError):
    pass


# cone
class NotLinearlyIndependent(ValidationError):
    pass


class NegativeEmbedding(ValidationError):
    def __init__(self, i, j, value):
        self.i = i
        self.j = j
        self.value = value
        super().__init__(f"Re sigma_{j}(e_{i}) = {value} is not positive (i={i}, j={j})")


class DomainError(ValidationError):
    pass


class NonTotallyReal(ValidationError):
    pass


# series
class EmptyComposition(ValidationError):
    pass


class LastExponentTooSmall(ValidationError):
    pass


class Overflow(BudgetExceeded):
    pass


# membrane
class DimensionBudgetExceeded(BudgetExceeded):
    pass


class StepTooLarge(ValidationError):
    pass


class EqualModulusEmbeddings(ValidationError):
    pass


# moduli_catalog
class DegenerateBlowupPoint(ValidationError):
    pass


class CountMismatch(MDZVError):
    pass


# cli
class ConfigParse(ConfigError):
    pass


class UnknownSuite(ConfigError):
    pass
