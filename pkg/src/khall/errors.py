"""Exception hierarchy for the kernel.

Every error carries a short machine-readable ``code`` which the CLI reports.
"""


class KhallError(Exception):
    code = "kernel-error"


class UnknownGenerator(KhallError):
    code = "unknown-generator"


class NameCollision(KhallError):
    code = "name-collision"


class NonInvertibleGenerator(KhallError):
    code = "non-invertible-generator"


class UnsupportedRelation(KhallError):
    code = "unsupported-relation"


class ExponentOverflow(KhallError):
    code = "exponent-overflow"


class DiagonalSquare(KhallError):
    code = "diagonal-square"


class DivisionByZero(KhallError, ZeroDivisionError):
    code = "division-by-zero"


class DenominatorVanishes(KhallError):
    code = "denominator-vanishes"


class NotPolynomial(KhallError):
    code = "not-polynomial"


class NotDivisible(KhallError):
    code = "not-divisible"


class UnfactoredDenominator(KhallError):
    code = "unfactored-denominator"


class TruncationError(KhallError):
    """A coefficient outside the certified window was requested."""
    code = "truncation"


class IncompatibleTruncation(KhallError):
    code = "incompatible-truncation"


class DeltaSquare(KhallError):
    code = "delta-square"


class InconsistentSupport(DeltaSquare):
    code = "inconsistent-support"


class IllDefinedProduct(KhallError):
    code = "ill-defined-product"


class RankNotZero(KhallError):
    code = "rank-not-zero"


class UnknownMonomial(KhallError):
    code = "unknown-monomial"


class NotSymmetric(KhallError):
    code = "not-symmetric"


class ExprSyntaxError(KhallError, SyntaxError):
    """Parse failure with a 1-based line/column position."""
    code = "syntax"

    def __init__(self, message, line=1, column=1):
        self.message = message
        self.line = line
        self.column = column
        KhallError.__init__(self, f"{message} (line {line}, column {column})")

    def __str__(self):
        return f"{self.message} (line {self.line}, column {self.column})"
