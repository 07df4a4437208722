"""Exception hierarchy shared by every fanstalk module."""


class FanstalkError(Exception):
    """Base class for all errors raised by fanstalk."""


# parser ---------------------------------------------------------------------

class ParseError(FanstalkError, ValueError):
    """Raised for malformed binomial text.

    ``line`` is set when the error was raised while reading a system file,
    ``position`` is the 0-based column inside the offending expression.
    """

    def __init__(self, message, position=None, line=None):
        self.message = message
        self.position = position
        self.line = line
        super().__init__(self._render())

    def _render(self):
        where = []
        if self.line is not None:
            where.append(f"line {self.line}")
        if self.position is not None:
            where.append(f"col {self.position}")
        if where:
            return f"{self.message} ({', '.join(where)})"
        return self.message

    def at_line(self, line):
        self.line = line
        self.args = (self._render(),)
        return self


class ExpressionSyntaxError(ParseError):
    pass


class UnknownVariable(ParseError):
    pass


class NotBinomial(ParseError):
    pass


class NegativeExponent(ParseError):
    pass


class EmptySystem(ParseError):
    pass


# polyhedra ------------------------------------------------------------------

class GeometryError(FanstalkError, ValueError):
    pass


class ZeroVector(GeometryError):
    pass


class NotPointed(GeometryError):
    pass


class NotFullDimensional(GeometryError):
    pass


class OutsideOrthant(GeometryError):
    pass


class RayOutsideSupport(GeometryError):
    pass


class NotMaximal(GeometryError):
    pass


class AmbiguousVertex(GeometryError):
    pass


# fantastack -----------------------------------------------------------------

class MissingUnitRay(GeometryError):
    pass


class RankDeficient(GeometryError):
    pass


class NotPure(FanstalkError, ValueError):
    pass


class OneSidedBinomial(FanstalkError, ValueError):
    pass


# transform / arrangement / ideals -------------------------------------------

class DimensionMismatch(FanstalkError, ValueError):
    pass


class IrrationalRoot(FanstalkError, ArithmeticError):
    """lambda has no exact rational p^k-th root."""


class NotSchoen(FanstalkError):
    pass


class TooManyMembers(FanstalkError, ValueError):
    pass


class Inconsistent(FanstalkError, ValueError):
    pass


class NotSimple(FanstalkError):
    pass


class NotTotallyOrdered(FanstalkError):
    pass


# oracle ---------------------------------------------------------------------

class FieldTooLarge(FanstalkError, ValueError):
    pass


class TooManyCoordinates(FanstalkError, ValueError):
    pass


class BadReduction(FanstalkError, ArithmeticError):
    """A coefficient's denominator vanishes modulo the field characteristic."""
