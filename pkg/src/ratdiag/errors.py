"""Exception hierarchy shared by all ratdiag modules.

Three broad classes matter to callers: validation errors (bad input, wrong
shape, failed precondition), resource errors (a computation would exceed an
explicit size limit), and internal invariant failures that indicate a bug
upstream rather than bad input.
"""


class RatdiagError(Exception):
    """Base class for all library errors."""


class ValidationError(RatdiagError):
    """Input rejected before any computation was attempted."""


class ExprSyntaxError(ValidationError):
    """Expression text does not conform to the grammar.

    ``offset`` is the byte offset of the first offending character.
    """

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (at offset {offset})")
        self.offset = offset


class UnknownVariableError(ValidationError):
    def __init__(self, name: str, offset: int = -1):
        msg = f"unknown variable {name!r}"
        if offset >= 0:
            msg += f" (at offset {offset})"
        super().__init__(msg)
        self.name = name
        self.offset = offset


class MalformedExponentError(ExprSyntaxError):
    """A ^ exponent was not an integer or a parenthesised rational."""


class DenominatorVanishesAtOrigin(ValidationError):
    """A quotient's denominator has zero constant term."""


class PowBaseConstantTermNotOne(ValidationError):
    """A fractional power's base must have constant term exactly 1."""


class NonzeroConstantTerm(ValidationError):
    """Series composition requires the inner series to vanish at 0."""


class TruncationError(ValidationError):
    """A requested operation needs more retained coefficients than given."""


class UnsupportedShape(ValidationError):
    """Expression is outside the P^(a/b)*R/Q family handled here."""


class DegenerateParameters(ValidationError):
    """Hypergeometric parameters produce an undefined series."""


class EtaleFailure(RatdiagError):
    """The shifted minimal polynomial still has vanishing f-derivative at 0."""


class DivisionNotExact(RatdiagError):
    """An exact polynomial division left a remainder; upstream bug."""


class OrderExceeded(RatdiagError):
    """No telescoping recurrence found up to the requested order."""


class PoleOnGrid(ValidationError):
    """A certificate was evaluated at a pole of its rational function."""


class PrecisionExhausted(RatdiagError):
    """p-adic working precision was too small for the valuation swing."""


class NonIntegralCoefficient(ValidationError):
    """A coefficient has negative p-adic valuation; choose another scale."""


class ResourceLimit(RatdiagError):
    """A computation would allocate more than the configured cell budget."""
