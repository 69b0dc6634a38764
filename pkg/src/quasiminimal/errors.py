"""Exception hierarchy.

Every error carries a short ``condition`` name and optional numeric details so
that the command-line layer can turn it into a structured JSON object.
"""


class GeometryError(Exception):
    """Base class for all errors raised by the package."""

    condition = "GeometryError"

    def __init__(self, message="", **details):
        super().__init__(message)
        self.message = message
        self.details = details

    def to_json(self):
        out = {"error": self.condition, "message": self.message}
        if self.details:
            out["details"] = {k: _plain(v) for k, v in self.details.items()}
        return out


def _plain(value):
    try:
        return float(value)
    except (TypeError, ValueError):
        return str(value)


# algebra
class DegenerateSpan(GeometryError):
    condition = "DegenerateSpan"


# jets and expressions
class DomainError(GeometryError, ValueError):
    condition = "DomainError"


class DivisionBySingularJet(DomainError):
    condition = "DivisionBySingularJet"


class OutOfDomain(GeometryError):
    condition = "OutOfDomain"


class ExprSyntaxError(GeometryError, ValueError):
    condition = "SyntaxError"

    def __init__(self, message, offset):
        super().__init__(f"{message} at offset {offset}", offset=offset)
        self.offset = offset


class UnknownIdentifier(GeometryError, ValueError):
    condition = "UnknownIdentifier"


class ChartSpecError(GeometryError, ValueError):
    condition = "InvalidChartSpec"


# surface kernel
class NotNullCoordinates(GeometryError):
    condition = "NotNullCoordinates"


class MinimalPoint(GeometryError):
    condition = "MinimalPoint"


class NotQuasiMinimal(GeometryError):
    condition = "NotQuasiMinimal"


# classifier
class InsufficientSamples(GeometryError):
    condition = "InsufficientSamples"


class IllConditionedFit(GeometryError):
    condition = "IllConditionedFit"


# families
class QuasiMinimalityViolated(GeometryError):
    condition = "QuasiMinimalityViolated"


class PicardDivergence(GeometryError):
    condition = "PicardDivergence"


class CornerMismatch(GeometryError):
    condition = "CornerMismatch"


class ConstraintDrift(GeometryError):
    condition = "ConstraintDrift"


class DomainViolation(GeometryError):
    condition = "DomainViolation"


class InvalidFamilySpec(GeometryError, ValueError):
    condition = "InvalidFamilySpec"
