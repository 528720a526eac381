"""Exception hierarchy shared by all graphdyn modules."""


class GraphdynError(Exception):
    """Base class for numeric and structural failures."""


class DomainError(GraphdynError, ValueError):
    """Argument outside the domain of a kernel or operation."""


class SingularKernelError(GraphdynError):
    """Normalising degree too small to divide by."""


class AssumptionViolation(GraphdynError):
    """A graphon fails a structural requirement (e.g. zero degree infimum)."""


class DegenerateDegreeError(GraphdynError):
    """Some node has zero expected degree / zero node weight."""


class DimensionError(GraphdynError, ValueError):
    """State vector and operator sizes disagree."""


class QuadratureError(GraphdynError):
    """Refinement levels of the fallback quadrature disagree."""


class BlowUpError(GraphdynError):
    """Integrated state left the admissible range."""


class IntegrabilityError(GraphdynError):
    """Graphon lacks the integrability class the operation needs."""


class ConfigError(GraphdynError):
    """Invalid study or CLI configuration."""


class FormatError(GraphdynError):
    """Malformed graph file; carries the offending line number."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
