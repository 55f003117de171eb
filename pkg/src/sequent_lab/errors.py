from typing import Optional


class SequentLabError(Exception):
    """Base class of every error raised by sequent-lab"""


class ParseError(SequentLabError):
    """Input text does not match the grammar"""

    def __init__(self, message: str, line: Optional[int] = None, column: Optional[int] = None) -> None:
        self.line = line
        self.column = column
        if line is not None:
            message = f"{message} (line {line}, column {column})"
        super().__init__(message)


class ArityMismatch(SequentLabError):
    pass


class LevelViolation(SequentLabError):
    """A formula, abstract or derivation exceeds the allowed parameter-free level"""


class InvalidDerivation(SequentLabError):
    """A derivation handed to a transformation does not pass the checker"""

    def __init__(self, message: str, violations: Optional[list] = None) -> None:
        self.violations = violations or []
        super().__init__(message)


class NotCutFree(SequentLabError):
    pass


class InvalidPartition(SequentLabError):
    pass


class MissingPremise(SequentLabError):
    pass


class InvalidCertificate(SequentLabError):
    pass


class SizeBoundExceeded(SequentLabError):
    pass


class IndexOutOfRange(SequentLabError):
    pass


class NotAHeytingFrame(SequentLabError):
    """Raised with the name of the first frame law found violated"""

    def __init__(self, law: str, detail: str = "") -> None:
        self.law = law
        super().__init__(f"{law}: {detail}" if detail else law)


class NotAPartialOrder(SequentLabError):
    pass


class NotALattice(SequentLabError):
    pass


class NotHeyting(SequentLabError):
    pass


class UncoveredVariable(SequentLabError):
    pass


class OutsideUniverse(SequentLabError):
    """A term evaluates outside the depth-bounded term universe"""


class NotPositive(SequentLabError):
    pass


class UnknownFunctionSymbol(SequentLabError):
    pass
