class GeometryError(ValueError):
    """Base class for invalid geometric input."""


class NotPositiveDefinite(GeometryError):
    pass


class JacobiViolation(GeometryError):
    pass


class MixedSummand(GeometryError):
    """Operands of a Λ²± operation live in different summands."""


class NotVertical(GeometryError):
    """A vector is not tangent to the twistor fibre at the given point."""


class NotAntisymmetric(GeometryError):
    pass


class NotOrthogonalComplexStructure(GeometryError):
    pass


class NonConstantGauge(GeometryError):
    pass


class DomainViolation(GeometryError):
    pass


class InconsistentInput(GeometryError):
    pass


class NoSolution(GeometryError):
    pass


class ParseError(ValueError):
    """Malformed geometry document or CLI expression."""

    def __init__(self, message: str, field: str | None = None, line: int | None = None):
        self.field = field
        self.line = line
        where = []
        if line is not None:
            where.append(f"line {line}")
        if field is not None:
            where.append(f"field {field!r}")
        super().__init__(f"{message} ({', '.join(where)})" if where else message)
