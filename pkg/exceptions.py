"""
Exception hierarchy shared by the library, the CLI and the HTTP routes
"""

from typing import List, Optional


class OperatorAlgebraError(Exception):
    """Base class for every error raised on invalid input"""


class FamilyFileError(OperatorAlgebraError):
    """Family file could not be parsed or failed validation"""

    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class AdmissibilityError(OperatorAlgebraError):
    """The pi table violates adjoint symmetry or chain propagation"""

    def __init__(self, violations: List[str]):
        self.violations = list(violations)
        super().__init__("invalid pi table: " + "; ".join(self.violations))


class GraphError(OperatorAlgebraError):
    pass


class GroupoidError(OperatorAlgebraError):
    pass


class MatrixError(OperatorAlgebraError):
    pass
