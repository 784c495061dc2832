"""Exception types shared across the engine."""


class EngineError(Exception):
    """Base class for every error raised by this package."""


class DivisionByZero(EngineError):
    """Division by the identically-zero scalar."""


class UnknownCoordinate(EngineError):
    """A coordinate name does not belong to the chart at hand."""


class PoleAtPoint(EngineError):
    """A denominator vanishes at the requested sample point."""


class ParseError(EngineError):
    """Malformed expression text; carries the offending position."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


class ChartMismatch(EngineError):
    """Operands live on different charts."""


class DegreeMismatch(EngineError):
    """Operands have incompatible degrees."""


class DegreeUnderflow(EngineError):
    """Contraction into a form of too low a degree."""


class Degenerate(EngineError):
    """An operation that presumes nondegeneracy met a kernel."""


class NotHamiltonian(EngineError):
    """No vector field solves the contraction equation; carries a certificate.

    The certificate is a left-null covector y of the contraction matrix M
    with y.b nonzero, proving inconsistency of the linear system.
    """

    def __init__(self, message: str, certificate):
        super().__init__(message)
        self.certificate = tuple(certificate)


class FrameDependent(EngineError):
    """Declared frame sections are generically linearly dependent."""


class ProjectionNotInjective(EngineError):
    """The projection of a frame onto its form parts drops rank."""


class NotInD(EngineError):
    """A form lies outside the span of the declared form subbundle."""


class PointNotOnLeafSpan(EngineError):
    """A requested direction is not tangent to the leaf at the point."""


class MissingUnitComplement(EngineError):
    """Groupoid data lacks the frame of the algebroid along units."""


class MissingRightExtension(EngineError):
    """Groupoid data lacks right-extended frame vector fields."""


class ComplementNotInKernel(EngineError):
    """A declared unit complement does not sit inside ker(ds) along units."""


class NonConstantFrame(EngineError):
    """A constructor needed constant-coefficient forms."""


class JacobiFails(EngineError):
    """Structure constants violate the Jacobi identity."""


class PairingNotInvariant(EngineError):
    """The declared pairing is not invariant under the bracket."""


class BadDegree(EngineError):
    """Degree parameters out of range for a constructor."""


class BadParameters(EngineError):
    """Catalog parameters malformed or out of range."""


class UnknownCatalogName(EngineError):
    """Requested catalog entry does not exist."""


class InvariantViolation(EngineError):
    """An internal consistency assertion failed on given data."""


class ScenarioError(EngineError):
    """A scenario file fails to parse or validate."""


class UnknownName(ScenarioError):
    """A scenario references an undeclared object."""
