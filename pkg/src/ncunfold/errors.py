"""Exception types shared across the library."""


class UnfoldError(Exception):
    """Base class for all library errors."""


class ContextMismatch(UnfoldError):
    """Operands belong to different polynomial rings."""


class ParseError(UnfoldError):
    """Syntax or semantic error in expression text; carries a 0-based offset."""

    def __init__(self, message: str, position: int):
        super().__init__(f"syntax error at offset {position}: {message}")
        self.position = position
        self.reason = message


class DegreeGuardExceeded(UnfoldError):
    """A Groebner computation exceeded the configured degree limit."""


class NotIsolated(UnfoldError):
    """The singularity is not isolated (infinite Milnor number)."""


class NotACycle(UnfoldError):
    """The element is not closed under the Koszul differential."""


class QCInvalid(UnfoldError):
    """Quasiclassical datum validation failed; carries the violation list."""

    def __init__(self, violations):
        super().__init__("; ".join(v.message for v in violations))
        self.violations = list(violations)
